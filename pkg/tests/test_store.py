"""Triple store behavior: lifecycle, queries, persistence round trips."""

import random
from fractions import Fraction

import pytest
from hypothesis import given
import hypothesis.strategies as st

from kgcf import errors
from kgcf.store import (
    ALLOWED_TRANSITIONS,
    GraphStore,
    Literal,
    Pattern,
    STATUSES,
    STATUS_ACCEPTED,
    STATUS_CANDIDATE,
    STATUS_ELIMINATED,
    id_sort_key,
)

from conftest import graph_stores


@pytest.fixture
def store():
    return GraphStore()


def poem_fixture(store):
    author = store.add_entity("author", "Mu Du", {})
    poem = store.add_entity("poem", "Jiang Nan Spring", {})
    return author, poem


# -- entities ----------------------------------------------------------------

def test_add_entity_basic(store):
    e = store.add_entity("author", "Mu Du", {})
    assert e.id and store.entity(e.id) is e
    assert store.find_entity("author", "Mu Du") is e

    c = store.add_entity("course", "database curriculum", {})
    assert c.kind == "course"


def test_add_entity_empty_label(store):
    with pytest.raises(errors.EmptyLabel):
        store.add_entity("course", "", {})
    with pytest.raises(errors.EmptyLabel):
        store.add_entity("course", "   ", {})


def test_add_entity_invalid_kind(store):
    with pytest.raises(errors.InvalidKind):
        store.add_entity("Course", "x", {})
    with pytest.raises(errors.InvalidKind):
        store.add_entity("two words", "x", {})
    with pytest.raises(errors.InvalidKind):
        store.add_entity("", "x", {})


def test_entity_ids_unique(store):
    a = store.add_entity("course", "a")
    b = store.add_entity("course", "a")
    assert a.id != b.id


# -- triples -----------------------------------------------------------------

def test_add_triple_import_is_accepted(store):
    author, poem = poem_fixture(store)
    t = store.add_triple(author.id, "wrote", poem.id, source="import", confidence=1)
    assert t.status == STATUS_ACCEPTED
    assert t.confidence == 1


def test_add_triple_crowd_is_candidate_with_prior(store):
    author, poem = poem_fixture(store)
    t = store.add_triple(author.id, "wrote", poem.id, source="crowd")
    assert t.status == STATUS_CANDIDATE
    assert t.confidence == Fraction(1, 2)


def test_add_triple_duplicate_merges_provenance(store):
    author, poem = poem_fixture(store)
    t1 = store.add_triple(author.id, "wrote", poem.id, source="import", confidence=1)
    t2 = store.add_triple(author.id, "wrote", poem.id, source="import", confidence=1)
    assert t1.id == t2.id
    assert len(t1.provenance) == 2
    assert t1.confidence == 1  # unchanged by the merge


def test_add_triple_dangling(store):
    author, _ = poem_fixture(store)
    with pytest.raises(errors.DanglingReference):
        store.add_triple(author.id, "wrote", "e999", source="crowd", confidence=0.5)
    with pytest.raises(errors.DanglingReference):
        store.add_triple("e999", "wrote", author.id)


def test_add_triple_confidence_range(store):
    author, poem = poem_fixture(store)
    with pytest.raises(errors.ConfidenceOutOfRange):
        store.add_triple(author.id, "wrote", poem.id, confidence=1.5)


def test_coexisting_crowd_views(store):
    # two users attach different meanings to the same subject; both live
    moon = store.add_entity("entity", "bright moon")
    a = store.add_triple(moon.id, "conveys", Literal("homesickness"), user="ua")
    b = store.add_triple(moon.id, "conveys", Literal("helplessness"), user="ub")
    assert a.id != b.id
    assert {t.id for t in store.live_triples()} == {a.id, b.id}


# -- confidence adjustment -----------------------------------------------------

def test_adjust_confidence_exact(store):
    author, poem = poem_fixture(store)
    t = store.add_triple(author.id, "wrote", poem.id, confidence=0.5)
    assert store.adjust_confidence(t.id, 0.1) == Fraction(3, 5)


def test_adjust_confidence_clamps(store):
    author, poem = poem_fixture(store)
    hi = store.add_triple(author.id, "wrote", poem.id, confidence=0.95)
    assert store.adjust_confidence(hi.id, 0.1) == 1
    lo = store.add_triple(author.id, "cites", poem.id, confidence=0.05)
    assert store.adjust_confidence(lo.id, -0.1) == 0


def test_adjust_confidence_unknown(store):
    with pytest.raises(errors.UnknownTriple):
        store.adjust_confidence("t404", 0.1)


@given(deltas=st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=20),
                       max_size=30))
def test_confidence_stays_in_range(deltas):
    store = GraphStore()
    a = store.add_entity("author", "a")
    p = store.add_entity("poem", "p")
    t = store.add_triple(a.id, "wrote", p.id, confidence=Fraction(1, 2))
    for d in deltas:
        c = store.adjust_confidence(t.id, d)
        assert 0 <= c <= 1


# -- status machine -------------------------------------------------------------

def test_status_transitions_match_table(store):
    author, poem = poem_fixture(store)
    for old in STATUSES:
        for new in STATUSES:
            t = store.add_triple(author.id, f"p-{old}-{new}", poem.id)
            t.status = old
            if (old, new) in ALLOWED_TRANSITIONS:
                assert store.set_status(t.id, new).status == new
            else:
                with pytest.raises(errors.IllegalTransition):
                    store.set_status(t.id, new)
                assert t.status == old


def test_status_clock_bump(store):
    author, poem = poem_fixture(store)
    t = store.add_triple(author.id, "wrote", poem.id)
    before = store.logical_clock
    store.set_status(t.id, STATUS_ACCEPTED)
    assert store.logical_clock == before + 1


# -- edit / delete ---------------------------------------------------------------

def test_delete_triple_then_query(store):
    author, poem = poem_fixture(store)
    t = store.add_triple(author.id, "wrote", poem.id)
    store.delete_triple("u1", t.id)
    assert store.query(Pattern(predicate="wrote")) == []
    with pytest.raises(errors.UnknownTarget):
        store.delete_triple("u1", t.id)


def test_delete_entity_in_use(store):
    author, poem = poem_fixture(store)
    store.add_triple(author.id, "wrote", poem.id)
    with pytest.raises(errors.EntityInUse):
        store.delete_entity("u1", poem.id)


def test_delete_entity_cascades_dead_triples(store):
    author, poem = poem_fixture(store)
    t = store.add_triple(author.id, "wrote", poem.id)
    store.set_status(t.id, STATUS_ELIMINATED)
    store.delete_entity("u1", poem.id)
    assert t.id not in store.triples
    assert poem.id not in store.entities


def test_edit_entity(store):
    author, _ = poem_fixture(store)
    store.edit_entity("u1", author.id, attrs={"era": "tang"})
    assert store.entity(author.id).attrs["era"] == "tang"
    with pytest.raises(errors.EmptyLabel):
        store.edit_entity("u1", author.id, label=" ")
    with pytest.raises(errors.UnknownTarget):
        store.edit_entity("u1", "e404", label="x")


# -- queries ----------------------------------------------------------------------

def test_query_singleton_predicate(store):
    author, poem = poem_fixture(store)
    t = store.add_triple(author.id, "wrote", poem.id)
    assert store.query(Pattern(predicate="wrote")) == [t]


def test_query_by_kind(store):
    c1 = store.add_entity("course", "db")
    c2 = store.add_entity("course", "isd")
    store.add_entity("teacher", "t")
    got = store.query(Pattern(kind="course"))
    assert got == sorted([c1, c2], key=lambda e: id_sort_key(e.id))


def test_query_empty_result(store):
    author, poem = poem_fixture(store)
    store.add_triple(author.id, "wrote", poem.id)
    assert store.query(Pattern(subject=author.id, status=STATUS_ELIMINATED)) == []


def test_query_by_object(store):
    author, poem = poem_fixture(store)
    t_ref = store.add_triple(author.id, "wrote", poem.id)
    t_lit = store.add_triple(poem.id, "dynasty", Literal("tang dynasty"))
    assert store.query(Pattern(object=poem.id)) == [t_ref]
    assert store.query(Pattern(object=Literal("tang dynasty"))) == [t_lit]
    # a bare string also reaches literals of equal text
    assert store.query(Pattern(object="tang dynasty")) == [t_lit]


def test_confident_triples_respect_threshold(store):
    author, poem = poem_fixture(store)
    hi = store.add_triple(author.id, "wrote", poem.id, confidence=0.9)
    store.add_triple(author.id, "cites", poem.id, confidence=0.7)
    assert store.confident_triples() == [hi]  # theta_accept defaults to 0.8


def brute_force_query(store, pattern):
    out = [e for e in store.entities.values() if store._entity_matches(e, pattern)]
    out += [t for t in store.triples.values() if store._triple_matches(t, pattern)]
    return sorted(out, key=lambda m: id_sort_key(m.id))


@given(store=graph_stores(), data=st.data())
def test_query_equals_linear_filter(store, data):
    # independent oracle: filter entities on kind, triples field-by-field
    pattern = Pattern(
        kind=data.draw(st.none() | st.sampled_from(["course", "poem", "teacher"])),
        predicate=data.draw(st.none() | st.sampled_from(["wrote", "offers"])),
        status=data.draw(st.none() | st.sampled_from(STATUSES)),
    )
    expected = []
    for e in store.entities.values():
        if pattern.predicate is None and pattern.status is None:
            if pattern.kind is None or e.kind == pattern.kind:
                expected.append(e)
    for t in store.triples.values():
        if pattern.predicate is not None and t.predicate != pattern.predicate:
            continue
        if pattern.status is not None and t.status != pattern.status:
            continue
        if pattern.kind is not None:
            ks = {store.entities[t.subject].kind}
            if not t.object_is_literal:
                ks.add(store.entities[t.object].kind)
            if pattern.kind not in ks:
                continue
        expected.append(t)
    expected.sort(key=lambda m: id_sort_key(m.id))
    assert store.query(pattern) == expected


# -- top / bottom -------------------------------------------------------------------

def three_conf_store():
    store = GraphStore()
    a = store.add_entity("x", "a")
    b = store.add_entity("x", "b")
    ta = store.add_triple(a.id, "p", b.id, confidence=0.9)
    tb = store.add_triple(a.id, "q", b.id, confidence=0.5)
    tc = store.add_triple(a.id, "r", b.id, confidence=0.1)
    return store, ta, tb, tc


def test_top_and_bottom_basic():
    store, ta, tb, tc = three_conf_store()
    top, bottom = store.top_and_bottom(1)
    assert top == [ta] and bottom == [tc]


def test_top_and_bottom_overlap(store):
    a = store.add_entity("x", "a")
    b = store.add_entity("x", "b")
    t = store.add_triple(a.id, "p", b.id, confidence=0.4)
    top, bottom = store.top_and_bottom(3)
    assert top == [t] and bottom == [t]


def test_top_and_bottom_tie_by_id(store):
    a = store.add_entity("x", "a")
    b = store.add_entity("x", "b")
    t1 = store.add_triple(a.id, "p", b.id, confidence=0.5)
    t2 = store.add_triple(a.id, "q", b.id, confidence=0.5)
    top, bottom = store.top_and_bottom(1)
    assert top == [t1] and bottom == [t1]
    assert id_sort_key(t1.id) < id_sort_key(t2.id)


def test_top_and_bottom_excludes_eliminated():
    store, ta, tb, tc = three_conf_store()
    store.set_status(ta.id, STATUS_ELIMINATED)
    top, bottom = store.top_and_bottom(1)
    assert top == [tb] and bottom == [tc]


@given(store=graph_stores(), n=st.integers(min_value=1, max_value=8))
def test_top_and_bottom_equals_sort_slice(store, n):
    live = [t for t in store.triples.values() if t.live]
    want_top = sorted(live, key=lambda t: (-t.confidence, id_sort_key(t.id)))[:n]
    want_bot = sorted(live, key=lambda t: (t.confidence, id_sort_key(t.id)))[:n]
    top, bottom = store.top_and_bottom(n)
    assert top == want_top and bottom == want_bot


# -- persistence ---------------------------------------------------------------------

def test_round_trip_empty():
    store = GraphStore()
    again = GraphStore.loads(store.dumps())
    assert again.structurally_equal(store)
    assert store.dumps() == "kgcf/1\nclock\t0\n"


def test_round_trip_small():
    store = GraphStore()
    a = store.add_entity("author", "Mu Du", {"era": "tang"})
    p = store.add_entity("poem", "Jiang Nan Spring")
    d = store.add_entity("dynasty", "tang dynasty")
    store.add_triple(a.id, "wrote", p.id, source="import", confidence=1)
    store.add_triple(p.id, "dynasty", d.id, confidence=Fraction(2, 3))
    again = GraphStore.loads(store.dumps())
    assert again.structurally_equal(store)
    assert again.dumps() == store.dumps()


def test_round_trip_escaping():
    store = GraphStore()
    a = store.add_entity("note", "line\none\ttab \\slash")
    store.add_triple(a.id, "says", Literal("a\tb\nc"))
    again = GraphStore.loads(store.dumps())
    assert again.structurally_equal(store)


def test_parse_error_reports_line():
    store = GraphStore()
    a = store.add_entity("author", "Mu Du")
    p = store.add_entity("poem", "Jiang Nan Spring")
    store.add_triple(a.id, "wrote", p.id)
    text = store.dumps()
    lines = text.splitlines()
    # truncate the triple record (line 4: header, 2 entities, then the triple)
    lines[3] = lines[3].rsplit("\t", 3)[0]
    with pytest.raises(errors.ParseError) as ei:
        GraphStore.loads("\n".join(lines) + "\n")
    assert ei.value.line == 4


def test_import_rejects_unknown_version():
    with pytest.raises(errors.ParseError) as ei:
        GraphStore.loads("kgcf/99\nclock\t0\n")
    assert ei.value.line == 1


def test_loads_continues_id_counters():
    store = GraphStore()
    a = store.add_entity("x", "a")
    b = store.add_entity("x", "b")
    store.add_triple(a.id, "p", b.id)
    again = GraphStore.loads(store.dumps())
    c = again.add_entity("x", "c")
    assert c.id not in (a.id, b.id)


@given(store=graph_stores())
def test_round_trip_random(store):
    again = GraphStore.loads(store.dumps())
    assert again.structurally_equal(store)


# -- referential integrity fuzz ---------------------------------------------------------

def check_integrity(store):
    for t in store.triples.values():
        assert t.subject in store.entities
        if not t.object_is_literal:
            assert t.object in store.entities


def test_fuzz_1000_ops_integrity():
    rng = random.Random(1234)
    store = GraphStore()
    store.add_entity("seed", "seed")
    for step in range(1000):
        op = rng.random()
        ents = sorted(store.entities)
        trips = sorted(store.triples)
        try:
            if op < 0.25 or not ents:
                store.add_entity(rng.choice(["a", "b", "c"]), f"n{step}")
            elif op < 0.5:
                subj = rng.choice(ents)
                obj = rng.choice(ents) if rng.random() < 0.7 else Literal(f"lit{step}")
                store.add_triple(subj, rng.choice(["p", "q"]), obj,
                                 confidence=rng.random())
            elif op < 0.6 and trips:
                store.adjust_confidence(rng.choice(trips), rng.uniform(-0.3, 0.3))
            elif op < 0.7 and trips:
                store.set_status(rng.choice(trips), rng.choice(STATUSES))
            elif op < 0.8 and trips:
                store.delete_triple("fuzz", rng.choice(trips))
            elif op < 0.9 and ents:
                store.delete_entity("fuzz", rng.choice(ents))
            elif trips:
                store.edit_entity("fuzz", rng.choice(ents), attrs={"k": str(step)})
        except errors.KgcfError:
            pass  # rejected ops must leave the graph intact
        check_integrity(store)
    assert store.logical_clock > 0
