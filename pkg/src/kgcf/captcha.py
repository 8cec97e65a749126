"""Reverse captchas: login challenges generated from stored triples.

Instead of distorted text, a login prompt asks about a triple drawn from
the most- and least-trusted ends of the store. Confirmatory answers move
the triple's confidence; fill-in-the-blank answers feed an answer ledger.
Participation, not correctness, unlocks the login: the ground truth is
exactly what the crowd is being asked to establish.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .consensus import (
    ConsensusEngine,
    SLOT_OBJECT,
    SLOT_SUBJECT,
    STATE_COLLECTING,
    slot_id,
)
from .errors import (
    ChallengeClosed,
    EmptyAnswer,
    EmptyStore,
    InvalidAnswer,
    UnknownChallenge,
)
from .store import GraphStore, STATUS_CANDIDATE, STATUS_ELIMINATED, as_fraction, id_sort_key

KIND_FILL_BLANK = "fillBlank"
KIND_CONFIRMATORY = "confirmatory"

FORM_CONCEPT = "conceptCatechism"
FORM_ATTRIBUTE = "attributeQuestion"
FORM_RELATION = "relationJudgment"


@dataclass(frozen=True)
class CaptchaConfig:
    n: int = 5                       # Top-N window on each end of the ranking
    p_fill_blank: float = 0.5
    delta_consistent: float = 0.1
    delta_inconsistent: float = 0.1
    rng_seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 <= self.p_fill_blank <= 1:
            raise ValueError("p_fill_blank must be in [0,1]")
        if as_fraction(self.delta_consistent) < 0 or as_fraction(self.delta_inconsistent) < 0:
            raise ValueError("deltas must be >= 0")


@dataclass
class Challenge:
    id: str
    kind: str
    question_form: str
    target_triple_id: str
    prompt: str
    blanked_slot: str | None = None
    ledger_id: str | None = None
    open: bool = True


@dataclass(frozen=True)
class Outcome:
    proceed: bool
    kind: str
    new_confidence: float | None = None
    recorded_answer: str | None = None
    ledger_id: str | None = None


def render(store: GraphStore, triple_id: str, kind: str, question_form: str,
           blanked_slot: str | None) -> str:
    """Deterministic prompt templates; byte-identical for identical inputs."""
    t = store.triple(triple_id)
    subj = store.entity(t.subject).label
    obj = t.object.text if t.object_is_literal else store.entity(t.object).label
    if kind == KIND_CONFIRMATORY:
        return f"Is it true that {subj} {t.predicate} {obj}? (yes/no)"
    if question_form == FORM_ATTRIBUTE:
        return f"What is the {t.predicate} of {subj}?"
    if blanked_slot == SLOT_SUBJECT:
        return f"____ {t.predicate} {obj} ?"
    return f"{subj} {t.predicate} ____ ?"


def question_form_for(store: GraphStore, triple_id: str, kind: str,
                      blanked_slot: str | None) -> str:
    if kind == KIND_CONFIRMATORY:
        return FORM_RELATION
    t = store.triple(triple_id)
    if blanked_slot == SLOT_OBJECT and t.object_is_literal:
        return FORM_ATTRIBUTE
    return FORM_CONCEPT


class CaptchaEngine:
    """Generates challenges and routes answers into confidence or ledgers.

    ``crowd`` is optional; when present, every submission is rewarded as a
    completed micro-task through ``crowd.reward_user``.
    """

    def __init__(self, store: GraphStore, consensus: ConsensusEngine,
                 config: CaptchaConfig | None = None, crowd=None):
        self.store = store
        self.consensus = consensus
        self.config = config or CaptchaConfig()
        self.crowd = crowd
        self.challenges: dict[str, Challenge] = {}
        self._next = 1

    # -- construction --------------------------------------------------------

    def _new_id(self) -> str:
        cid = f"c{self._next}"
        self._next += 1
        return cid

    def make_confirmatory(self, triple_id: str) -> Challenge:
        form = question_form_for(self.store, triple_id, KIND_CONFIRMATORY, None)
        ch = Challenge(id=self._new_id(), kind=KIND_CONFIRMATORY, question_form=form,
                       target_triple_id=triple_id,
                       prompt=render(self.store, triple_id, KIND_CONFIRMATORY, form, None))
        self.challenges[ch.id] = ch
        return ch

    def make_fill_blank(self, triple_id: str, slot: str = SLOT_OBJECT) -> Challenge:
        self.store.triple(triple_id)
        sid = slot_id(triple_id, slot)
        ledger = self.consensus.open_ledger(sid)
        if ledger.state != STATE_COLLECTING:
            # slot no longer collects answers; fall back to a confirmatory check
            return self.make_confirmatory(triple_id)
        form = question_form_for(self.store, triple_id, KIND_FILL_BLANK, slot)
        ch = Challenge(id=self._new_id(), kind=KIND_FILL_BLANK, question_form=form,
                       target_triple_id=triple_id, blanked_slot=slot, ledger_id=sid,
                       prompt=render(self.store, triple_id, KIND_FILL_BLANK, form, slot))
        self.challenges[ch.id] = ch
        return ch

    def generate(self, rng: random.Random) -> Challenge:
        live = self.store.live_triples()
        if not live:
            raise EmptyStore("no live triples to ask about")
        top, bottom = self.store.top_and_bottom(self.config.n)
        pool = sorted({t.id for t in top} | {t.id for t in bottom}, key=id_sort_key)
        target = rng.choice(pool)
        if rng.random() < self.config.p_fill_blank:
            return self.make_fill_blank(target, SLOT_OBJECT)
        return self.make_confirmatory(target)

    def challenge(self, challenge_id: str) -> Challenge:
        try:
            return self.challenges[challenge_id]
        except KeyError:
            raise UnknownChallenge(challenge_id) from None

    def render(self, challenge: Challenge) -> str:
        return render(self.store, challenge.target_triple_id, challenge.kind,
                      challenge.question_form, challenge.blanked_slot)

    # -- answering --------------------------------------------------------------

    def submit(self, challenge: Challenge, user: str | None, answer: str) -> Outcome:
        if not challenge.open:
            raise ChallengeClosed(challenge.id)
        if not answer or not answer.strip():
            raise EmptyAnswer(challenge.id)
        if challenge.kind == KIND_CONFIRMATORY:
            vote = answer.strip().casefold()
            if vote not in ("yes", "no"):
                raise InvalidAnswer(f"expected yes/no, got {answer!r}")
            delta = (as_fraction(self.config.delta_consistent) if vote == "yes"
                     else -as_fraction(self.config.delta_inconsistent))
            conf = self.store.adjust_confidence(challenge.target_triple_id, delta)
            outcome = Outcome(proceed=True, kind=challenge.kind, new_confidence=float(conf))
        else:
            ledger = self.consensus.ledger(challenge.ledger_id)
            self.consensus.record_occurrence(ledger, answer)
            outcome = Outcome(proceed=True, kind=challenge.kind,
                              recorded_answer=answer, ledger_id=challenge.ledger_id)
        challenge.open = False
        if self.crowd is not None and user is not None:
            self.crowd.reward_user(user)
        return outcome


def recirculate_eliminated(store: GraphStore) -> list[str]:
    """Return every eliminated triple to the candidate pool (the new round)."""
    flipped = []
    for t in sorted(store.triples.values(), key=lambda t: id_sort_key(t.id)):
        if t.status == STATUS_ELIMINATED:
            store.set_status(t.id, STATUS_CANDIDATE)
            flipped.append(t.id)
    return flipped
