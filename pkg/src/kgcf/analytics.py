"""Read-side views over accepted knowledge: subgraphs, teacher profiles,
student overviews, and course-to-course learning routes.

Only live *accepted* triples contribute; candidate and eliminated edges are
crowd noise until verified. Routes run over the undirected course /
knowledge-point incidence graph: ``covers`` edges join a course to its
knowledge points, ``prerequisite`` edges join courses directly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from . import schema
from .errors import NoRoute, UnknownCourse, UnknownStudent
from .store import GraphStore, STATUS_ACCEPTED, Triple, id_sort_key

SUBGRAPH_TAGS: dict[str, frozenset[str]] = {
    "teacherCourseType": frozenset({schema.KIND_TEACHER, schema.KIND_COURSE,
                                    schema.KIND_CATEGORY}),
    "studentCourseType": frozenset({schema.KIND_STUDENT, schema.KIND_COURSE,
                                    schema.KIND_CATEGORY}),
    "knowledgeCourseType": frozenset({schema.KIND_KNOWLEDGE_POINT, schema.KIND_COURSE,
                                      schema.KIND_CATEGORY}),
}


@dataclass
class Subgraph:
    kind: str
    node_ids: set[str] = field(default_factory=set)
    triple_ids: set[str] = field(default_factory=set)


@dataclass
class TeacherProfile:
    teacher_id: str
    course_ids: set[str] = field(default_factory=set)
    category_counts: dict[str, int] = field(default_factory=dict)
    cooperative: bool = False


@dataclass
class Route:
    from_course_id: str
    to_course_id: str
    path: list[str]
    length: int


def accepted_triples(store: GraphStore) -> list[Triple]:
    return [t for t in store.live_triples() if t.status == STATUS_ACCEPTED]


def extract_subgraph(store: GraphStore, kind: str) -> Subgraph:
    tags = SUBGRAPH_TAGS[kind]
    nodes = {eid for eid, e in store.entities.items() if e.kind in tags}
    triples = {
        t.id for t in accepted_triples(store)
        if t.subject in nodes and not t.object_is_literal and t.object in nodes
    }
    return Subgraph(kind=kind, node_ids=nodes, triple_ids=triples)


def classify_teachers(store: GraphStore) -> list[TeacherProfile]:
    offers: dict[str, set[str]] = {}
    for t in accepted_triples(store):
        if t.predicate == schema.PRED_OFFERS and not t.object_is_literal:
            offers.setdefault(t.subject, set()).add(t.object)
    categories: dict[str, list[str]] = {}
    for t in accepted_triples(store):
        if t.predicate == schema.PRED_HAS_CATEGORY and not t.object_is_literal:
            label = store.entities[t.object].label
            categories.setdefault(t.subject, []).append(label)
    profiles = []
    for tid in sorted(store.entities, key=id_sort_key):
        if store.entities[tid].kind != schema.KIND_TEACHER:
            continue
        courses = offers.get(tid, set())
        counts: dict[str, int] = {}
        for course in sorted(courses, key=id_sort_key):
            for label in categories.get(course, []):
                counts[label] = counts.get(label, 0) + 1
        cooperative = any(
            courses & offers.get(other, set())
            for other in offers if other != tid
        )
        profiles.append(TeacherProfile(teacher_id=tid, course_ids=courses,
                                       category_counts=counts, cooperative=cooperative))
    return profiles


def student_overview(store: GraphStore, student_id: str) -> dict[str, set[str]]:
    ent = store.entities.get(student_id)
    if ent is None or ent.kind != schema.KIND_STUDENT:
        raise UnknownStudent(student_id)
    learned = {
        t.object for t in accepted_triples(store)
        if t.subject == student_id and t.predicate == schema.PRED_LEARNED
        and not t.object_is_literal
        and store.entities[t.object].kind == schema.KIND_COURSE
    }
    all_courses = {eid for eid, e in store.entities.items()
                   if e.kind == schema.KIND_COURSE}
    return {"learned": learned, "unlearned": all_courses - learned}


def _route_adjacency(store: GraphStore) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {}

    def connect(a: str, b: str) -> None:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)

    for t in accepted_triples(store):
        if t.object_is_literal:
            continue
        if t.predicate in (schema.PRED_COVERS, schema.PRED_PREREQUISITE):
            connect(t.subject, t.object)
    return adj


def learning_route(store: GraphStore, from_course: str, to_course: str) -> Route:
    for cid in (from_course, to_course):
        ent = store.entities.get(cid)
        if ent is None or ent.kind != schema.KIND_COURSE:
            raise UnknownCourse(cid)
    if from_course == to_course:
        return Route(from_course, to_course, [from_course], 0)
    adj = _route_adjacency(store)
    parent: dict[str, str] = {from_course: from_course}
    queue = deque([from_course])
    while queue:
        node = queue.popleft()
        if node == to_course:
            break
        for nxt in sorted(adj.get(node, ()), key=id_sort_key):
            if nxt not in parent:
                parent[nxt] = node
                queue.append(nxt)
    if to_course not in parent:
        raise NoRoute(f"{from_course} -> {to_course}")
    path = [to_course]
    while path[-1] != from_course:
        path.append(parent[path[-1]])
    path.reverse()
    return Route(from_course, to_course, path, len(path) - 1)
