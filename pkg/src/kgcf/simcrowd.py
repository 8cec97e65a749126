"""Deterministic simulated-annotator harness.

Drives the captcha -> ledger -> ambiguity-vote pipeline against a graph
whose slots have known true answers, measuring how often the crowd
converges on the truth. Annotators answer with the truth at probability
``accuracy`` and otherwise pick uniformly from a fixed distractor pool;
ambiguity votes say "unequal" with probability ``unequal_bias`` when the
paired answers really are two distinct truths, and with the complementary
probability when they are not. Identical (config, seed) pairs produce
byte-identical reports.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .captcha import CaptchaConfig, CaptchaEngine
from .consensus import (
    ConsensusConfig,
    ConsensusEngine,
    STATE_COLLECTING,
    STATE_RESOLVED,
    normalize,
)
from .crowd import CrowdEngine
from .errors import InvalidConfig
from .store import GraphStore, Literal


@dataclass(frozen=True)
class AnnotatorProfile:
    accuracy: float = 0.8
    unequal_bias: float = 0.9

    def __post_init__(self):
        if not 0 <= self.accuracy <= 1 or not 0 <= self.unequal_bias <= 1:
            raise InvalidConfig("annotator probabilities must be in [0,1]")


@dataclass(frozen=True)
class SimConfig:
    population: int = 100
    slots: int = 50
    submissions_per_slot: int = 120
    two_truth_slots: int = 0
    rng_seed: int = 0
    distractors_per_slot: int = 5
    annotator: AnnotatorProfile = field(default_factory=AnnotatorProfile)
    consensus: ConsensusConfig = field(default_factory=ConsensusConfig)
    captcha: CaptchaConfig = field(default_factory=CaptchaConfig)

    def __post_init__(self):
        if self.population < 1 or self.slots < 1 or self.submissions_per_slot < 1:
            raise InvalidConfig("population, slots and submissions must be >= 1")
        if not 0 <= self.two_truth_slots <= self.slots:
            raise InvalidConfig("two_truth_slots must be within the slot count")
        if self.distractors_per_slot < 1:
            raise InvalidConfig("need at least one distractor per slot")


@dataclass(frozen=True)
class SlotTruth:
    triple_id: str
    slot: str
    truths: tuple[str, ...]
    distractors: tuple[str, ...]


@dataclass
class GroundTruth:
    store: GraphStore
    slots: list[SlotTruth]


@dataclass
class SlotResult:
    slot_id: str
    truths: tuple[str, ...]
    resolved: bool
    kind: str | None
    primary: str | None
    secondary: str | None
    correct_top1: bool
    cycles: int
    interactions: int


@dataclass
class ConvergenceReport:
    fraction_top1_correct: float
    multi_answer_rate: float
    mean_cycles_to_resolve: float
    slots: list[SlotResult]

    def to_json(self) -> str:
        payload = {
            "fractionTop1Correct": self.fraction_top1_correct,
            "multiAnswerRate": self.multi_answer_rate,
            "meanCyclesToResolve": self.mean_cycles_to_resolve,
            "slots": [{
                "slot": s.slot_id,
                "truths": list(s.truths),
                "resolved": s.resolved,
                "kind": s.kind,
                "primary": s.primary,
                "secondary": s.secondary,
                "correctTop1": s.correct_top1,
                "cycles": s.cycles,
                "interactions": s.interactions,
            } for s in self.slots],
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def build_ground_truth(config: SimConfig) -> GroundTruth:
    """Systematic slots: the first ``two_truth_slots`` carry two true answers."""
    store = GraphStore()
    slots: list[SlotTruth] = []
    for i in range(config.slots):
        subject = store.add_entity("question", f"question {i}")
        truths = (f"truth-{i}-a", f"truth-{i}-b") if i < config.two_truth_slots \
            else (f"truth-{i}-a",)
        distractors = tuple(f"noise-{i}-{k}" for k in range(config.distractors_per_slot))
        triple = store.add_triple(subject.id, "expects", Literal(truths[0]),
                                  source="import")
        slots.append(SlotTruth(triple_id=triple.id, slot="object",
                               truths=truths, distractors=distractors))
    return GroundTruth(store=store, slots=slots)


def run(ground_truth: GroundTruth, config: SimConfig) -> ConvergenceReport:
    rng = random.Random(config.rng_seed)
    crowd = CrowdEngine()
    annotators = [crowd.register_user("common").id for _ in range(config.population)]
    consensus = ConsensusEngine(config.consensus)
    captcha = CaptchaEngine(ground_truth.store, consensus, config.captcha, crowd=crowd)
    p = config.annotator.accuracy
    q = config.annotator.unequal_bias
    results: list[SlotResult] = []

    for slot in ground_truth.slots:
        truths = tuple(normalize(t) for t in slot.truths)
        sid = f"{slot.triple_id}:{slot.slot}"
        interactions = 0
        unequal = total = 0
        while interactions < config.submissions_per_slot:
            ledger = consensus.ledgers.get(sid)
            state = ledger.state if ledger is not None else STATE_COLLECTING
            if state == STATE_RESOLVED:
                break
            annotator = annotators[rng.randrange(len(annotators))]
            if state == STATE_COLLECTING:
                challenge = captcha.make_fill_blank(slot.triple_id, slot.slot)
                if rng.random() < p:
                    answer = slot.truths[rng.randrange(len(slot.truths))]
                else:
                    answer = slot.distractors[rng.randrange(len(slot.distractors))]
                captcha.submit(challenge, annotator, answer)
            else:  # ambiguity vote on the surviving pair
                primary, secondary = consensus.top2(ledger)
                pair_is_two_truths = secondary is not None and \
                    {primary, secondary} <= set(truths)
                p_unequal = q if pair_is_two_truths else 1 - q
                if rng.random() < p_unequal:
                    unequal += 1
                total += 1
                if total >= config.consensus.min_votes_for_resolve:
                    res = consensus.resolve(ledger, unequal, total)
                    consensus.apply_resolution(ground_truth.store, ledger, res)
            interactions += 1

        ledger = consensus.ledgers.get(sid)
        resolution = consensus.resolutions.get(sid)
        if resolution is not None and sid not in consensus.applied:
            # unanimous single resolved inside collection; persist it
            consensus.apply_resolution(ground_truth.store, ledger, resolution)
        resolved = resolution is not None
        results.append(SlotResult(
            slot_id=sid,
            truths=truths,
            resolved=resolved,
            kind=resolution.kind if resolved else None,
            primary=resolution.primary if resolved else None,
            secondary=resolution.secondary if resolved else None,
            correct_top1=resolved and resolution.primary in truths,
            cycles=ledger.cycles_completed if ledger is not None else 0,
            interactions=interactions,
        ))

    n = len(results)
    resolved = [r for r in results if r.resolved]
    return ConvergenceReport(
        fraction_top1_correct=sum(r.correct_top1 for r in results) / n,
        multi_answer_rate=sum(r.kind == "multi" for r in results) / n,
        mean_cycles_to_resolve=(sum(r.cycles for r in resolved) / len(resolved)
                                if resolved else 0.0),
        slots=results,
    )


def simulate(config: SimConfig) -> ConvergenceReport:
    return run(build_ground_truth(config), config)
