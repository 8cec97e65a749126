"""Demo graph: a small education campus plus the classical-poem corner.

Used by the demo scripts and the frontend fixture recorder; tests build
their own minimal graphs.
"""

from __future__ import annotations

from . import schema
from .store import GraphStore, Literal


def seed_demo(store: GraphStore | None = None) -> GraphStore:
    store = store or GraphStore()
    ent = store.add_entity
    imp = lambda s, p, o: store.add_triple(s.id, p, o.id, source="import")

    # education domain
    subject = ent(schema.KIND_SUBJECT, "educational technology")
    isd = ent(schema.KIND_COURSE, "instructional system design")
    db = ent(schema.KIND_COURSE, "database curriculum")
    ls = ent(schema.KIND_COURSE, "learning sciences")
    design = ent(schema.KIND_CATEGORY, "design")
    tech = ent(schema.KIND_CATEGORY, "technology")
    lin = ent(schema.KIND_TEACHER, "Teacher Lin")
    chen = ent(schema.KIND_TEACHER, "Teacher Chen")
    zhou = ent(schema.KIND_TEACHER, "Teacher Zhou")
    ming = ent(schema.KIND_STUDENT, "Xiao Ming")
    hong = ent(schema.KIND_STUDENT, "Xiao Hong")
    k_models = ent(schema.KIND_KNOWLEDGE_POINT, "instructional design models")
    k_learner = ent(schema.KIND_KNOWLEDGE_POINT, "learner analysis")
    k_modeling = ent(schema.KIND_KNOWLEDGE_POINT, "knowledge modeling")
    k_sql = ent(schema.KIND_KNOWLEDGE_POINT, "sql basics")

    for course in (isd, db, ls):
        imp(course, schema.PRED_COURSE_SUBJECT, subject)
    imp(isd, schema.PRED_HAS_CATEGORY, design)
    imp(ls, schema.PRED_HAS_CATEGORY, design)
    imp(db, schema.PRED_HAS_CATEGORY, tech)
    imp(lin, schema.PRED_OFFERS, isd)
    imp(chen, schema.PRED_OFFERS, isd)
    imp(lin, schema.PRED_OFFERS, ls)
    imp(zhou, schema.PRED_OFFERS, db)
    imp(isd, schema.PRED_COVERS, k_models)
    imp(isd, schema.PRED_COVERS, k_learner)
    imp(isd, schema.PRED_COVERS, k_modeling)
    imp(db, schema.PRED_COVERS, k_modeling)
    imp(db, schema.PRED_COVERS, k_sql)
    imp(k_learner, schema.PRED_RELATED_TO, k_models)
    imp(k_modeling, schema.PRED_RELATED_TO, k_sql)
    imp(ming, schema.PRED_LEARNED, isd)

    ex_story = ent(schema.KIND_EXERCISE, "storyboard an intro lesson")
    ex_er = ent(schema.KIND_EXERCISE, "draw an ER diagram")
    ex_sql = ent(schema.KIND_EXERCISE, "write a join query")
    vid_isd = ent(schema.KIND_RESOURCE, "ADDIE walkthrough", {"type": "video"})
    note_db = ent(schema.KIND_RESOURCE, "normal forms cheat sheet", {"type": "note"})
    imp(ex_story, schema.PRED_PRACTICES, k_models)
    imp(ex_er, schema.PRED_PRACTICES, k_modeling)
    imp(ex_sql, schema.PRED_PRACTICES, k_sql)
    imp(ex_story, schema.PRED_RESOURCE_OF, isd)
    imp(vid_isd, schema.PRED_RESOURCE_OF, isd)
    imp(ex_er, schema.PRED_RESOURCE_OF, db)
    imp(ex_sql, schema.PRED_RESOURCE_OF, db)
    imp(note_db, schema.PRED_RESOURCE_OF, db)

    # classical-poem corner, crowd-flavored confidences
    mudu = ent("author", "Mu Du")
    poem = ent("poem", "Jiang Nan Spring")
    tang = ent("dynasty", "tang dynasty")
    libai = ent("author", "Li Bai")
    jingye = ent("poem", "Jing Ye Si")
    moon = ent("entity", "bright moon")
    imp(mudu, "wrote", poem)
    imp(poem, "dynasty", tang)
    imp(libai, "wrote", jingye)
    store.add_triple(moon.id, "conveys", Literal("homesickness"),
                     source="crowd", confidence=0.7)
    store.add_triple(moon.id, "conveys", Literal("helplessness"),
                     source="crowd", confidence=0.4)
    store.add_triple(poem.id, "mentions", Literal("temples"),
                     source="crowd", confidence=0.3)
    return store
