"""Relaxation-style answer aggregation for fill-in-the-blank slots.

Free-text answers accumulate per slot in a ledger. Every ``cycle_length``
submissions the lowest-count candidate is dropped (the Top-2 are protected).
Once at most two candidates survive, the pair goes to an "unequal?" crowd
vote: a strict majority fraction above the threshold keeps both answers,
otherwise the runner-up becomes an alias of the winner and future
occurrences of it count toward the winner.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    EmptyLedger,
    LedgerNotCollecting,
    NotInAmbiguityVote,
    ParseError,
    SameAnswer,
    SlotAlreadyFilled,
    TooFewVotes,
    UnknownLedger,
)
from .store import GraphStore, Literal, STATUS_ACCEPTED, as_fraction, _esc, _unesc

CONSENSUS_HEADER = "kgcf-consensus/1"

STATE_COLLECTING = "collecting"
STATE_AMBIGUITY = "ambiguityVote"
STATE_RESOLVED = "resolved"

SLOT_SUBJECT = "subject"
SLOT_OBJECT = "object"


def slot_id(triple_id: str, slot: str) -> str:
    return f"{triple_id}:{slot}"


def normalize(answer: str) -> str:
    """Trim, case-fold, collapse internal whitespace."""
    return " ".join(answer.split()).casefold()


@dataclass
class Candidate:
    count: int = 0
    score: Fraction = Fraction(1)  # the default score allocated at creation

    def effective_score(self) -> Fraction:
        # presentation only; elimination and Top-2 rank by count alone
        return self.score + self.count


@dataclass
class AnswerLedger:
    slot_id: str
    cycle_length: int
    candidates: dict[str, Candidate] = field(default_factory=dict)
    eliminated: set[str] = field(default_factory=set)
    submissions_this_cycle: int = 0
    total_submissions: int = 0
    cycles_completed: int = 0
    state: str = STATE_COLLECTING


@dataclass(frozen=True)
class Resolution:
    kind: str  # "single" | "multi"
    primary: str
    secondary: str | None = None
    alias_map: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ConsensusConfig:
    s0: Fraction = Fraction(1)
    unequal_threshold: Fraction = Fraction(7, 20)  # 35%, self-defined
    cycle_length: int = 20
    min_votes_for_resolve: int = 10

    def __post_init__(self):
        object.__setattr__(self, "s0", as_fraction(self.s0))
        object.__setattr__(self, "unequal_threshold", as_fraction(self.unequal_threshold))
        if not 0 < self.unequal_threshold < 1:
            raise ValueError("unequal_threshold must be in (0,1)")
        if self.cycle_length < 2:
            raise ValueError("cycle_length must be >= 2")


def ambiguity_prompt(primary: str, secondary: str) -> str:
    if primary == secondary:
        raise SameAnswer(primary)
    return f'Is "{primary}" unequal to "{secondary}"? (unequal/equal)'


def decide_kind(unequal_votes: int, total_votes: int, threshold: Fraction) -> str:
    """Pure threshold decision; exactly at the threshold resolves single."""
    fraction = Fraction(unequal_votes, total_votes)
    return "multi" if fraction > threshold else "single"


class ConsensusEngine:
    def __init__(self, config: ConsensusConfig | None = None):
        self.config = config or ConsensusConfig()
        self.ledgers: dict[str, AnswerLedger] = {}
        self.aliases: dict[str, str] = {}  # normalized answer -> canonical answer
        self.resolutions: dict[str, Resolution] = {}
        self.applied: set[str] = set()

    # -- ledger lifecycle ---------------------------------------------------

    def open_ledger(self, slot: str) -> AnswerLedger:
        if slot not in self.ledgers:
            self.ledgers[slot] = AnswerLedger(slot_id=slot,
                                              cycle_length=self.config.cycle_length)
        return self.ledgers[slot]

    def ledger(self, slot: str) -> AnswerLedger:
        try:
            return self.ledgers[slot]
        except KeyError:
            raise UnknownLedger(slot) from None

    def canonical(self, answer: str) -> str:
        seen = set()
        while answer in self.aliases and answer not in seen:
            seen.add(answer)
            answer = self.aliases[answer]
        return answer

    def record_occurrence(self, ledger: AnswerLedger, answer: str) -> AnswerLedger:
        if ledger.state != STATE_COLLECTING:
            raise LedgerNotCollecting(ledger.slot_id)
        ans = self.canonical(normalize(answer))
        if ans not in ledger.eliminated:
            # once judged irrelevant, an answer stays out of this slot's race
            cand = ledger.candidates.get(ans)
            if cand is None:
                cand = Candidate(count=0, score=self.config.s0)
                ledger.candidates[ans] = cand
            cand.count += 1
        ledger.submissions_this_cycle += 1
        ledger.total_submissions += 1
        if ledger.submissions_this_cycle >= ledger.cycle_length:
            self.end_cycle(ledger)
            self._maybe_advance(ledger)
        return ledger

    def end_cycle(self, ledger: AnswerLedger) -> AnswerLedger:
        if not ledger.candidates:
            raise EmptyLedger(ledger.slot_id)
        if len(ledger.candidates) > 2:
            min_count = min(c.count for c in ledger.candidates.values())
            tied = sorted(a for a, c in ledger.candidates.items() if c.count == min_count)
            victim = tied[-1]  # tie: lexicographically last goes
            del ledger.candidates[victim]
            ledger.eliminated.add(victim)
        ledger.submissions_this_cycle = 0
        ledger.cycles_completed += 1
        return ledger

    def _maybe_advance(self, ledger: AnswerLedger) -> None:
        # leave collection once the field has narrowed and enough signal exists
        if ledger.total_submissions < self.config.min_votes_for_resolve:
            return
        if len(ledger.candidates) == 2:
            ledger.state = STATE_AMBIGUITY
        elif len(ledger.candidates) == 1:
            primary, _ = self.top2(ledger)
            ledger.state = STATE_RESOLVED
            self.resolutions[ledger.slot_id] = Resolution(kind="single", primary=primary)

    # -- extraction -----------------------------------------------------------

    def top2(self, ledger: AnswerLedger) -> tuple[str, str | None]:
        if not ledger.candidates:
            raise EmptyLedger(ledger.slot_id)
        ranked = sorted(ledger.candidates.items(), key=lambda kv: (-kv[1].count, kv[0]))
        primary = ranked[0][0]
        secondary = ranked[1][0] if len(ranked) > 1 else None
        return primary, secondary

    def open_ambiguity(self, ledger: AnswerLedger) -> str:
        if ledger.state == STATE_RESOLVED:
            raise LedgerNotCollecting(ledger.slot_id)
        primary, secondary = self.top2(ledger)
        if secondary is None:
            raise SameAnswer(primary)
        prompt = ambiguity_prompt(primary, secondary)
        ledger.state = STATE_AMBIGUITY
        return prompt

    def resolve(self, ledger: AnswerLedger, unequal_votes: int, total_votes: int) -> Resolution:
        if ledger.state != STATE_AMBIGUITY:
            raise NotInAmbiguityVote(ledger.slot_id)
        if total_votes < self.config.min_votes_for_resolve:
            raise TooFewVotes(f"{total_votes} < {self.config.min_votes_for_resolve}")
        primary, secondary = self.top2(ledger)
        kind = decide_kind(unequal_votes, total_votes, self.config.unequal_threshold)
        if kind == "multi":
            res = Resolution(kind="multi", primary=primary, secondary=secondary)
        else:
            alias = {secondary: primary} if secondary is not None else {}
            res = Resolution(kind="single", primary=primary, secondary=secondary,
                             alias_map=alias)
            self.aliases.update(alias)
        ledger.state = STATE_RESOLVED
        self.resolutions[ledger.slot_id] = res
        return res

    def resolution(self, slot: str) -> Resolution:
        try:
            return self.resolutions[slot]
        except KeyError:
            raise UnknownLedger(slot) from None

    # -- application ------------------------------------------------------------

    def apply_resolution(self, store: GraphStore, ledger: AnswerLedger,
                         resolution: Resolution) -> list[str]:
        if ledger.state != STATE_RESOLVED:
            raise NotInAmbiguityVote(ledger.slot_id)
        if ledger.slot_id in self.applied:
            raise SlotAlreadyFilled(ledger.slot_id)
        triple_id, _, slot = ledger.slot_id.rpartition(":")
        target = store.triple(triple_id)
        answers = [resolution.primary]
        if resolution.kind == "multi" and resolution.secondary is not None:
            answers.append(resolution.secondary)
        created = []
        for ans in answers:
            if slot == SLOT_OBJECT:
                t = store.add_triple(target.subject, target.predicate, Literal(ans),
                                     source="system", confidence=1)
            else:
                subj = self._entity_for_answer(store, ans, store.entity(target.subject).kind)
                t = store.add_triple(subj, target.predicate, target.object,
                                     source="system", confidence=1)
            if t.status != STATUS_ACCEPTED:
                store.set_status(t.id, STATUS_ACCEPTED)
            created.append(t.id)
        self.aliases.update(resolution.alias_map)
        self.applied.add(ledger.slot_id)
        return created

    @staticmethod
    def _entity_for_answer(store: GraphStore, answer: str, kind: str) -> str:
        for eid in sorted(store.entities, key=lambda i: (len(i), i)):
            if store.entities[eid].label.casefold() == answer:
                return eid
        return store.add_entity(kind, answer).id

    # -- persistence ---------------------------------------------------------------

    def dumps(self) -> str:
        lines = [CONSENSUS_HEADER]
        for slot in sorted(self.ledgers):
            led = self.ledgers[slot]
            cands = {a: {"count": c.count, "score": str(c.score)}
                     for a, c in led.candidates.items()}
            lines.append("\t".join([
                "ledger", _esc(slot), led.state, str(led.cycle_length),
                str(led.submissions_this_cycle), str(led.total_submissions),
                str(led.cycles_completed), json.dumps(cands, sort_keys=True),
                json.dumps(sorted(led.eliminated)),
            ]))
        for src in sorted(self.aliases):
            lines.append("\t".join(["alias", _esc(src), _esc(self.aliases[src])]))
        for slot in sorted(self.resolutions):
            res = self.resolutions[slot]
            lines.append("\t".join(["resolution", _esc(slot), json.dumps({
                "kind": res.kind, "primary": res.primary,
                "secondary": res.secondary, "aliasMap": res.alias_map,
            }, sort_keys=True)]))
        for slot in sorted(self.applied):
            lines.append(f"applied\t{_esc(slot)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, config: ConsensusConfig | None = None) -> "ConsensusEngine":
        engine = cls(config=config)
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines or lines[0] != CONSENSUS_HEADER:
            raise ParseError("unknown consensus format version", 1)
        for no, raw in enumerate(lines[1:], start=2):
            fields = raw.split("\t")
            try:
                if fields[0] == "ledger":
                    cands = {a: Candidate(count=v["count"], score=Fraction(v["score"]))
                             for a, v in json.loads(fields[7]).items()}
                    led = AnswerLedger(slot_id=_unesc(fields[1]), state=fields[2],
                                       cycle_length=int(fields[3]),
                                       submissions_this_cycle=int(fields[4]),
                                       total_submissions=int(fields[5]),
                                       cycles_completed=int(fields[6]),
                                       candidates=cands,
                                       eliminated=set(json.loads(fields[8])))
                    engine.ledgers[led.slot_id] = led
                elif fields[0] == "alias":
                    engine.aliases[_unesc(fields[1])] = _unesc(fields[2])
                elif fields[0] == "resolution":
                    d = json.loads(fields[2])
                    engine.resolutions[_unesc(fields[1])] = Resolution(
                        kind=d["kind"], primary=d["primary"],
                        secondary=d.get("secondary"), alias_map=d.get("aliasMap", {}))
                elif fields[0] == "applied":
                    engine.applied.add(_unesc(fields[1]))
                else:
                    raise ValueError(f"unknown record type {fields[0]!r}")
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise ParseError(str(exc), no) from None
        return engine
