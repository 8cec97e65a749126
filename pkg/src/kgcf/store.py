"""Typed, confidence-weighted triple store with a status lifecycle.

Entities are typed nodes; triples are (subject, predicate, object) edges
whose object is either another entity or a literal string. Every triple
carries a confidence in [0, 1] (kept as an exact ``Fraction`` so that
repeated adjustments are reversible) and a status that walks the lifecycle
candidate -> accepted / eliminated, with eliminated triples eligible for
recirculation.

Persistence is a line-oriented UTF-8 format, header ``kgcf/1``, one
self-describing record per line; see ``dumps``/``loads``.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    ConfidenceOutOfRange,
    DanglingReference,
    EmptyLabel,
    EntityInUse,
    IllegalTransition,
    InvalidKind,
    ParseError,
    UnknownEntity,
    UnknownTarget,
    UnknownTriple,
)

FORMAT_HEADER = "kgcf/1"

STATUS_CANDIDATE = "candidate"
STATUS_ACCEPTED = "accepted"
STATUS_ELIMINATED = "eliminated"
STATUSES = (STATUS_CANDIDATE, STATUS_ACCEPTED, STATUS_ELIMINATED)

# Allowed status transitions: accept/eliminate candidates, recirculate
# eliminated ones, send accepted back for re-verification.
ALLOWED_TRANSITIONS = frozenset({
    (STATUS_CANDIDATE, STATUS_ACCEPTED),
    (STATUS_CANDIDATE, STATUS_ELIMINATED),
    (STATUS_ELIMINATED, STATUS_CANDIDATE),
    (STATUS_ACCEPTED, STATUS_CANDIDATE),
})

SOURCE_IMPORT = "import"
SOURCE_CROWD = "crowd"
SOURCE_SYSTEM = "system"
SOURCES = (SOURCE_IMPORT, SOURCE_CROWD, SOURCE_SYSTEM)

DEFAULT_CONFIDENCE = {
    SOURCE_IMPORT: Fraction(1),
    SOURCE_CROWD: Fraction(1, 2),   # maximum-uncertainty prior
    SOURCE_SYSTEM: Fraction(1, 2),
}


def as_fraction(value) -> Fraction:
    """Exact conversion; floats go through their decimal repr so 0.1 -> 1/10."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


@dataclass(frozen=True)
class Literal:
    """A literal string in object position."""

    text: str


@dataclass(frozen=True)
class Provenance:
    source: str
    user: str | None
    logical_time: int


@dataclass
class Entity:
    id: str
    kind: str
    label: str
    attrs: dict[str, str] = field(default_factory=dict)


@dataclass
class Triple:
    id: str
    subject: str
    predicate: str
    object: str | Literal
    confidence: Fraction
    status: str
    provenance: list[Provenance] = field(default_factory=list)

    @property
    def object_is_literal(self) -> bool:
        return isinstance(self.object, Literal)

    @property
    def live(self) -> bool:
        return self.status != STATUS_ELIMINATED


@dataclass(frozen=True)
class Pattern:
    """Conjunctive match over entities and triples.

    ``kind`` alone selects entities of that kind; with triple fields present
    it restricts triples to those touching an entity of that kind. Triple
    fields never match entities. An ``object`` given as a plain string
    matches either an entity reference or a literal of equal text.
    """

    kind: str | None = None
    subject: str | None = None
    predicate: str | None = None
    object: str | Literal | None = None
    status: str | None = None

    @property
    def has_triple_fields(self) -> bool:
        return any(v is not None for v in
                   (self.subject, self.predicate, self.object, self.status))

    def to_dict(self) -> dict:
        out = {}
        for name in ("kind", "subject", "predicate", "status"):
            v = getattr(self, name)
            if v is not None:
                out[name] = v
        if self.object is not None:
            if isinstance(self.object, Literal):
                out["object"] = {"literal": self.object.text}
            else:
                out["object"] = self.object
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Pattern":
        obj = data.get("object")
        if isinstance(obj, dict):
            obj = Literal(obj["literal"])
        return cls(kind=data.get("kind"), subject=data.get("subject"),
                   predicate=data.get("predicate"), object=obj,
                   status=data.get("status"))


def id_sort_key(ident: str) -> tuple[int, str]:
    """Numeric-faithful order for counter-suffixed ids (e2 < e10)."""
    return (len(ident), ident)


@dataclass(frozen=True)
class StoreConfig:
    # Confidence at or above which a live triple counts as settled knowledge.
    theta_accept: Fraction = Fraction(4, 5)


@dataclass(frozen=True)
class AuditEntry:
    logical_time: int
    actor: str | None
    action: str
    target: str


class GraphStore:
    """In-memory graph with a single-writer mutation lock.

    All mutations bump ``logical_clock``; readers see whole mutations only.
    """

    def __init__(self, config: StoreConfig | None = None):
        self.config = config or StoreConfig()
        self.entities: dict[str, Entity] = {}
        self.triples: dict[str, Triple] = {}
        self.logical_clock = 0
        self.audit: list[AuditEntry] = []
        self._next_entity = 1
        self._next_triple = 1
        self._lock = threading.RLock()

    # -- clock / audit ----------------------------------------------------

    def _tick(self) -> int:
        self.logical_clock += 1
        return self.logical_clock

    def _record(self, actor: str | None, action: str, target: str) -> None:
        self.audit.append(AuditEntry(self.logical_clock, actor, action, target))

    # -- lookups -----------------------------------------------------------

    def entity(self, entity_id: str) -> Entity:
        try:
            return self.entities[entity_id]
        except KeyError:
            raise UnknownEntity(entity_id) from None

    def triple(self, triple_id: str) -> Triple:
        try:
            return self.triples[triple_id]
        except KeyError:
            raise UnknownTriple(triple_id) from None

    def find_entity(self, kind: str, label: str) -> Entity | None:
        for eid in sorted(self.entities, key=id_sort_key):
            e = self.entities[eid]
            if e.kind == kind and e.label == label:
                return e
        return None

    def live_triples(self) -> list[Triple]:
        return [t for tid, t in sorted(self.triples.items(), key=lambda kv: id_sort_key(kv[0]))
                if t.live]

    def confident_triples(self) -> list[Triple]:
        """Live triples at or above the knowledge threshold."""
        return [t for t in self.live_triples()
                if t.confidence >= self.config.theta_accept]

    def incident_triples(self, entity_id: str, live_only: bool = True) -> list[Triple]:
        out = []
        for tid in sorted(self.triples, key=id_sort_key):
            t = self.triples[tid]
            if live_only and not t.live:
                continue
            if t.subject == entity_id or (not t.object_is_literal and t.object == entity_id):
                out.append(t)
        return out

    # -- mutations ----------------------------------------------------------

    def add_entity(self, kind: str, label: str, attrs: dict[str, str] | None = None,
                   actor: str | None = None) -> Entity:
        if not label or not label.strip():
            raise EmptyLabel("entity label must be non-empty")
        if not kind or kind != kind.lower() or any(c.isspace() for c in kind):
            raise InvalidKind(f"kind must be lowercase without whitespace: {kind!r}")
        with self._lock:
            eid = f"e{self._next_entity}"
            self._next_entity += 1
            ent = Entity(id=eid, kind=kind, label=label.strip(), attrs=dict(attrs or {}))
            self.entities[eid] = ent
            self._tick()
            self._record(actor, "add_entity", eid)
            return ent

    def _check_endpoint(self, ref: str) -> None:
        if ref not in self.entities:
            raise DanglingReference(ref)

    def _find_live(self, subject: str, predicate: str, obj: str | Literal) -> Triple | None:
        for tid in sorted(self.triples, key=id_sort_key):
            t = self.triples[tid]
            if t.live and t.subject == subject and t.predicate == predicate and t.object == obj:
                return t
        return None

    def add_triple(self, subject: str, predicate: str, obj: str | Literal,
                   source: str = SOURCE_CROWD, user: str | None = None,
                   confidence: Fraction | float | None = None) -> Triple:
        if not predicate:
            raise InvalidKind("predicate must be non-empty")
        if source not in SOURCES:
            raise InvalidKind(f"unknown provenance source {source!r}")
        self._check_endpoint(subject)
        if not isinstance(obj, Literal):
            self._check_endpoint(obj)
        conf = DEFAULT_CONFIDENCE[source] if confidence is None else as_fraction(confidence)
        if not 0 <= conf <= 1:
            raise ConfidenceOutOfRange(str(conf))
        with self._lock:
            existing = self._find_live(subject, predicate, obj)
            if existing is not None:
                existing.provenance.append(Provenance(source, user, self._tick()))
                self._record(user, "merge_triple", existing.id)
                return existing
            tid = f"t{self._next_triple}"
            self._next_triple += 1
            status = STATUS_ACCEPTED if source == SOURCE_IMPORT else STATUS_CANDIDATE
            t = Triple(id=tid, subject=subject, predicate=predicate, object=obj,
                       confidence=conf, status=status,
                       provenance=[Provenance(source, user, self._tick())])
            self.triples[tid] = t
            self._record(user, "add_triple", tid)
            return t

    def adjust_confidence(self, triple_id: str, delta: Fraction | float) -> Fraction:
        t = self.triple(triple_id)
        with self._lock:
            new = t.confidence + as_fraction(delta)
            t.confidence = min(Fraction(1), max(Fraction(0), new))
            self._tick()
            self._record(None, "adjust_confidence", triple_id)
            return t.confidence

    def set_status(self, triple_id: str, new_status: str, actor: str | None = None) -> Triple:
        t = self.triple(triple_id)
        if new_status not in STATUSES:
            raise IllegalTransition(f"unknown status {new_status!r}")
        if (t.status, new_status) not in ALLOWED_TRANSITIONS:
            raise IllegalTransition(f"{t.status} -> {new_status}")
        with self._lock:
            t.status = new_status
            self._tick()
            self._record(actor, "set_status", triple_id)
            return t

    def edit_entity(self, actor: str | None, entity_id: str,
                    label: str | None = None,
                    attrs: dict[str, str] | None = None) -> Entity:
        try:
            ent = self.entity(entity_id)
        except UnknownEntity:
            raise UnknownTarget(entity_id) from None
        if label is not None and not label.strip():
            raise EmptyLabel("entity label must be non-empty")
        with self._lock:
            if label is not None:
                ent.label = label.strip()
            if attrs:
                ent.attrs.update(attrs)
            self._tick()
            self._record(actor, "edit_entity", entity_id)
            return ent

    def delete_triple(self, actor: str | None, triple_id: str) -> None:
        if triple_id not in self.triples:
            raise UnknownTarget(triple_id)
        with self._lock:
            del self.triples[triple_id]
            self._tick()
            self._record(actor, "delete_triple", triple_id)

    def delete_entity(self, actor: str | None, entity_id: str) -> None:
        if entity_id not in self.entities:
            raise UnknownTarget(entity_id)
        if self.incident_triples(entity_id, live_only=True):
            raise EntityInUse(entity_id)
        with self._lock:
            # Dead incident triples go with the entity so no endpoint dangles.
            for t in self.incident_triples(entity_id, live_only=False):
                del self.triples[t.id]
            del self.entities[entity_id]
            self._tick()
            self._record(actor, "delete_entity", entity_id)

    # -- queries -----------------------------------------------------------

    def _entity_matches(self, e: Entity, p: Pattern) -> bool:
        if p.has_triple_fields:
            return False
        return p.kind is None or e.kind == p.kind

    def _triple_matches(self, t: Triple, p: Pattern) -> bool:
        if p.subject is not None and t.subject != p.subject:
            return False
        if p.predicate is not None and t.predicate != p.predicate:
            return False
        if p.status is not None and t.status != p.status:
            return False
        if p.object is not None:
            if isinstance(p.object, Literal):
                if t.object != p.object:
                    return False
            else:
                ref_match = (not t.object_is_literal and t.object == p.object)
                lit_match = (t.object_is_literal and t.object.text == p.object)
                if not (ref_match or lit_match):
                    return False
        if p.kind is not None:
            kinds = {self.entities[t.subject].kind}
            if not t.object_is_literal and t.object in self.entities:
                kinds.add(self.entities[t.object].kind)
            if p.kind not in kinds:
                return False
        return True

    def query(self, pattern: Pattern) -> list[Entity | Triple]:
        """All entities and triples matching every supplied pattern field."""
        matches: list[Entity | Triple] = [
            e for e in self.entities.values() if self._entity_matches(e, pattern)
        ]
        matches.extend(t for t in self.triples.values() if self._triple_matches(t, pattern))
        matches.sort(key=lambda m: id_sort_key(m.id))
        return matches

    def top_and_bottom(self, n: int) -> tuple[list[Triple], list[Triple]]:
        if n < 1:
            raise ValueError("n must be >= 1")
        live = self.live_triples()
        by_top = sorted(live, key=lambda t: (-t.confidence, id_sort_key(t.id)))
        by_bottom = sorted(live, key=lambda t: (t.confidence, id_sort_key(t.id)))
        return by_top[:n], by_bottom[:n]

    # -- persistence ---------------------------------------------------------

    def dumps(self) -> str:
        lines = [FORMAT_HEADER]
        for eid in sorted(self.entities, key=id_sort_key):
            e = self.entities[eid]
            lines.append("\t".join([
                "entity", _esc(e.id), _esc(e.kind), _esc(e.label),
                json.dumps(e.attrs, sort_keys=True),
            ]))
        for tid in sorted(self.triples, key=id_sort_key):
            t = self.triples[tid]
            okind, oval = ("literal", t.object.text) if t.object_is_literal else ("entity", t.object)
            prov = [{"source": p.source, "user": p.user, "logicalTime": p.logical_time}
                    for p in t.provenance]
            lines.append("\t".join([
                "triple", _esc(t.id), _esc(t.subject), _esc(t.predicate),
                okind, _esc(oval), str(t.confidence), t.status,
                json.dumps(prov, sort_keys=True),
            ]))
        lines.append(f"clock\t{self.logical_clock}")
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str, config: StoreConfig | None = None) -> "GraphStore":
        store = cls(config=config)
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines:
            raise ParseError("empty stream", 1)
        if lines[0] != FORMAT_HEADER:
            raise ParseError(f"unknown format version {lines[0]!r}", 1)
        max_e = 0
        max_t = 0
        for no, raw in enumerate(lines[1:], start=2):
            fields = raw.split("\t")
            rectype = fields[0]
            try:
                if rectype == "entity":
                    if len(fields) != 5:
                        raise ValueError("entity record needs 5 fields")
                    eid = _unesc(fields[1])
                    ent = Entity(id=eid, kind=_unesc(fields[2]), label=_unesc(fields[3]),
                                 attrs=json.loads(fields[4]))
                    store.entities[eid] = ent
                    max_e = max(max_e, _counter_of(eid, "e"))
                elif rectype == "triple":
                    if len(fields) != 9:
                        raise ValueError("triple record needs 9 fields")
                    tid = _unesc(fields[1])
                    okind = fields[4]
                    if okind not in ("entity", "literal"):
                        raise ValueError(f"bad object kind {okind!r}")
                    oval = _unesc(fields[5])
                    obj: str | Literal = Literal(oval) if okind == "literal" else oval
                    status = fields[7]
                    if status not in STATUSES:
                        raise ValueError(f"bad status {status!r}")
                    prov = [Provenance(p["source"], p.get("user"), p["logicalTime"])
                            for p in json.loads(fields[8])]
                    t = Triple(id=tid, subject=_unesc(fields[2]), predicate=_unesc(fields[3]),
                               object=obj, confidence=Fraction(fields[6]), status=status,
                               provenance=prov)
                    store.triples[tid] = t
                    max_t = max(max_t, _counter_of(tid, "t"))
                elif rectype == "clock":
                    if len(fields) != 2:
                        raise ValueError("clock record needs 2 fields")
                    store.logical_clock = int(fields[1])
                else:
                    raise ValueError(f"unknown record type {rectype!r}")
            except ParseError:
                raise
            except (ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
                raise ParseError(str(exc), no) from None
        for no, t in enumerate(store.triples.values()):
            if t.subject not in store.entities or (
                    not t.object_is_literal and t.object not in store.entities):
                raise ParseError(f"dangling endpoint in triple {t.id}", 1)
        store._next_entity = max_e + 1
        store._next_triple = max_t + 1
        return store

    @classmethod
    def load(cls, path, config: StoreConfig | None = None) -> "GraphStore":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read(), config=config)

    def structurally_equal(self, other: "GraphStore") -> bool:
        return (self.entities == other.entities
                and self.triples == other.triples
                and self.logical_clock == other.logical_clock)


def _counter_of(ident: str, prefix: str) -> int:
    if ident.startswith(prefix) and ident[len(prefix):].isdigit():
        return int(ident[len(prefix):])
    return 0


def _esc(s: str) -> str:
    return s.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def _unesc(s: str) -> str:
    out = []
    i = 0
    while i < len(s):
        c = s[i]
        if c == "\\":
            if i + 1 >= len(s):
                raise ValueError("truncated escape")
            nxt = s[i + 1]
            if nxt == "\\":
                out.append("\\")
            elif nxt == "t":
                out.append("\t")
            elif nxt == "n":
                out.append("\n")
            else:
                raise ValueError(f"bad escape \\{nxt}")
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)
