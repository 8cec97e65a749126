"""Personalized exercise recommendation.

The learning-situation score of an exercise is LS = E / R, where E is the
learner's error rate on that exercise node and R the fraction of the
topic's resources the learner has finished (the leading 100% in display is
presentation only). Low completion inflates LS, pushing under-practiced
material up; exercises whose topic the learner has not started at all rank
above every finite LS. Scores are exact rationals end to end.

Incremental recommendation walks the learned/unlearned course split into
four buckets keyed by (characteristic | one-hop-related knowledge point) x
(learned "specific" | knowledge-point-sharing "related" course).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import schema
from .analytics import accepted_triples, student_overview
from .errors import InvalidRecord, NoResources, UnknownCourse, UnstartedTopic
from .store import GraphStore, as_fraction, id_sort_key

BUCKET_NAMES = (
    "charKP-specificCourse",
    "relatedKP-specificCourse",
    "charKP-relatedCourse",
    "relatedKP-relatedCourse",
)


@dataclass
class LearnerRecord:
    student_id: str
    # course id -> resource-type bucket -> finished resource ids
    finished: dict[str, dict[str, set[str]]] = field(default_factory=dict)
    error_rates: dict[str, Fraction] = field(default_factory=dict)


@dataclass(frozen=True)
class RecommendConfig:
    p: Fraction = Fraction(1, 5)  # the 20% comparison threshold

    def __post_init__(self):
        object.__setattr__(self, "p", as_fraction(self.p))
        if not 0 < self.p < 1:
            raise ValueError("p must be in (0,1)")


@dataclass(frozen=True)
class PastItem:
    exercise_id: str
    ls: Fraction | None  # None = unstarted topic, ranks above any finite LS


@dataclass
class RecommendationReport:
    student_id: str
    p: Fraction
    past: list[PastItem]
    incremental: dict[str, list[str]]
    unstarted_learner: bool = False


def resources_of_course(store: GraphStore, course_id: str) -> set[str]:
    """Exercise and resource nodes attached to the course."""
    out = set()
    for t in accepted_triples(store):
        if (t.predicate == schema.PRED_RESOURCE_OF and not t.object_is_literal
                and t.object == course_id):
            kind = store.entities[t.subject].kind
            if kind in (schema.KIND_EXERCISE, schema.KIND_RESOURCE):
                out.add(t.subject)
    return out


def courses_of_resource(store: GraphStore, resource_id: str) -> set[str]:
    return {
        t.object for t in accepted_triples(store)
        if t.predicate == schema.PRED_RESOURCE_OF and t.subject == resource_id
        and not t.object_is_literal
    }


def validate_record(store: GraphStore, record: LearnerRecord) -> None:
    seen: set[str] = set()
    for course_id, buckets in record.finished.items():
        if course_id not in store.entities:
            raise InvalidRecord(f"unknown course {course_id}")
        attached = resources_of_course(store, course_id)
        for rtype, ids in buckets.items():
            if rtype not in schema.RESOURCE_TYPES:
                raise InvalidRecord(f"unknown resource type {rtype!r}")
            for rid in ids:
                if rid not in attached:
                    raise InvalidRecord(f"{rid} is not a resource of {course_id}")
                if rid in seen:
                    raise InvalidRecord(f"{rid} finished twice")
                seen.add(rid)
    for ex_id, rate in record.error_rates.items():
        if ex_id not in store.entities:
            raise InvalidRecord(f"unknown exercise {ex_id}")
        if not 0 <= rate <= 1:
            raise InvalidRecord(f"error rate out of range for {ex_id}")


def completion_rate(store: GraphStore, record: LearnerRecord,
                    topic: set[str]) -> Fraction:
    """Finished resources over all resources attached to the topic's courses."""
    total = set()
    for course_id in topic:
        if course_id not in store.entities:
            raise UnknownCourse(course_id)
        total |= resources_of_course(store, course_id)
    if not total:
        raise NoResources(f"topic {sorted(topic)} has no resources")
    finished = 0
    for course_id in topic:
        for ids in record.finished.get(course_id, {}).values():
            finished += len(set(ids) & total)
    return Fraction(finished, len(total))


def learning_situation(r: Fraction, e: Fraction) -> Fraction:
    r = as_fraction(r)
    e = as_fraction(e)
    if r == 0:
        raise UnstartedTopic("completion rate is zero")
    if not 0 < r <= 1 or not 0 <= e <= 1:
        raise ValueError("R must be in (0,1], E in [0,1]")
    return e / r


def past_recommend(store: GraphStore, record: LearnerRecord,
                   config: RecommendConfig | None = None) -> list[PastItem]:
    config = config or RecommendConfig()
    items: list[PastItem] = []
    for ex_id in sorted(record.error_rates, key=id_sort_key):
        e = as_fraction(record.error_rates[ex_id])
        topic = courses_of_resource(store, ex_id)
        if not topic:
            raise InvalidRecord(f"exercise {ex_id} is attached to no course")
        r = completion_rate(store, record, topic)
        if r == 0:
            items.append(PastItem(ex_id, None))  # unstarted: maximal priority
            continue
        ls = learning_situation(r, e)
        if ls > config.p:
            items.append(PastItem(ex_id, ls))
    items.sort(key=lambda it: (it.ls is not None,
                               -(it.ls if it.ls is not None else 0),
                               id_sort_key(it.exercise_id)))
    return items


def _kps_of_course(store: GraphStore, course_id: str) -> set[str]:
    out = set()
    for t in accepted_triples(store):
        if t.object_is_literal or t.predicate != schema.PRED_COVERS:
            continue
        if t.subject == course_id and store.entities[t.object].kind == schema.KIND_KNOWLEDGE_POINT:
            out.add(t.object)
    return out


def _related_kps(store: GraphStore, kps: set[str]) -> set[str]:
    out = set()
    for t in accepted_triples(store):
        if t.object_is_literal or t.predicate != schema.PRED_RELATED_TO:
            continue
        if t.subject in kps:
            out.add(t.object)
        if t.object in kps:
            out.add(t.subject)
    return out - kps


def _exercises_of_kps(store: GraphStore, kps: set[str]) -> set[str]:
    out = set()
    for t in accepted_triples(store):
        if t.object_is_literal or t.predicate != schema.PRED_PRACTICES:
            continue
        if t.object in kps and store.entities[t.subject].kind == schema.KIND_EXERCISE:
            out.add(t.subject)
    return out


def incremental_recommend(store: GraphStore, student_id: str) -> tuple[dict[str, list[str]], bool]:
    """Four exercise buckets; returns (buckets, unstarted_learner)."""
    overview = student_overview(store, student_id)
    learned = overview["learned"]
    empty = {name: [] for name in BUCKET_NAMES}
    if not learned:
        return empty, True
    specific_kps = set()
    for c in learned:
        specific_kps |= _kps_of_course(store, c)
    related_courses = {
        c for c in overview["unlearned"]
        if _kps_of_course(store, c) & specific_kps
    }
    related_course_kps = set()
    for c in related_courses:
        related_course_kps |= _kps_of_course(store, c)
    kp_sets = [
        specific_kps,
        _related_kps(store, specific_kps),
        related_course_kps,
        _related_kps(store, related_course_kps),
    ]
    buckets: dict[str, list[str]] = {}
    claimed: set[str] = set()
    for name, kps in zip(BUCKET_NAMES, kp_sets):
        exercises = sorted(_exercises_of_kps(store, kps) - claimed, key=id_sort_key)
        claimed.update(exercises)
        buckets[name] = exercises
    return buckets, False


def build_report(store: GraphStore, record: LearnerRecord,
                 config: RecommendConfig | None = None) -> RecommendationReport:
    config = config or RecommendConfig()
    validate_record(store, record)
    buckets, unstarted = incremental_recommend(store, record.student_id)
    return RecommendationReport(
        student_id=record.student_id,
        p=config.p,
        past=past_recommend(store, record, config),
        incremental=buckets,
        unstarted_learner=unstarted,
    )
