import os

import hypothesis
import hypothesis.strategies as st

from kgcf.store import GraphStore, Literal, STATUSES

hypothesis.settings.register_profile("fast", max_examples=25, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=200, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "fast"))

KINDS = ["course", "teacher", "student", "poem", "author", "knowledgepoint",
         "exercise", "category", "resource"]

labels = st.text(
    alphabet=st.characters(codec="utf-8", exclude_categories=("Cs", "Cc")),
    min_size=1, max_size=12,
).filter(lambda s: s.strip())

attr_text = st.text(min_size=0, max_size=8)


@st.composite
def graph_stores(draw, max_entities=20, max_triples=30):
    """Random store: typed entities, mixed entity/literal objects, any status."""
    store = GraphStore()
    n_entities = draw(st.integers(min_value=0, max_value=max_entities))
    for _ in range(n_entities):
        attrs = draw(st.dictionaries(st.text(min_size=1, max_size=6), attr_text, max_size=3))
        store.add_entity(draw(st.sampled_from(KINDS)), draw(labels), attrs)
    ids = sorted(store.entities)
    if ids:
        n_triples = draw(st.integers(min_value=0, max_value=max_triples))
        for _ in range(n_triples):
            subj = draw(st.sampled_from(ids))
            pred = draw(st.sampled_from(["wrote", "offers", "learned", "covers", "conveys"]))
            if draw(st.booleans()):
                obj = draw(st.sampled_from(ids))
            else:
                obj = Literal(draw(st.text(min_size=1, max_size=10)))
            conf = draw(st.fractions(min_value=0, max_value=1, max_denominator=100))
            t = store.add_triple(subj, pred, obj, source="crowd", confidence=conf)
            t.status = draw(st.sampled_from(STATUSES))
    return store
