"""User/group lifecycle, proportional allocation, and the reward path."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given
import hypothesis.strategies as st

from kgcf import errors
from kgcf.crowd import (
    AttributePatch,
    CrowdConfig,
    CrowdEngine,
    TASK_ASSIGNED,
    TASK_ATTRIBUTE,
    TASK_COMPLETED,
    TASK_CONCEPT,
    TASK_EXPAND,
    TASK_OPEN,
    TASK_VERIFY,
    TripleProposal,
    VerificationVote,
    apportion,
)
from kgcf.store import GraphStore, Pattern


@pytest.fixture
def engine():
    return CrowdEngine()


def poem_graph():
    store = GraphStore()
    author = store.add_entity("poem", "Jiang Nan Spring")
    other = store.add_entity("author", "Mu Du", {"era": "tang", "style": "jueju"})
    t = store.add_triple(other.id, "wrote", author.id, confidence=0.4)
    return store, author, other, t


# -- registration -----------------------------------------------------------

def test_register_user_zero_score(engine):
    u = engine.register_user("common")
    assert u.score == 0 and u.role == "common"


def test_register_distinct_ids(engine):
    assert engine.register_user("common").id != engine.register_user("common").id


def test_register_bad_role(engine):
    with pytest.raises(errors.Unauthorized):
        engine.register_user("root")


# -- groups ---------------------------------------------------------------------

def test_create_group(engine):
    admin = engine.register_user("groupAdmin")
    g = engine.create_group(admin.id, Pattern(kind="poem"))
    assert g.score == 0
    assert g.admin_user_id == admin.id
    assert admin.group_id == g.id


def test_create_group_requires_admin_role(engine):
    u = engine.register_user("common")
    with pytest.raises(errors.Unauthorized):
        engine.create_group(u.id, Pattern(kind="poem"))


def test_join_twice_rejected(engine):
    admin = engine.register_user("groupAdmin")
    g = engine.create_group(admin.id, Pattern(kind="poem"))
    u = engine.register_user("common")
    engine.join_group(u.id, g.id)
    with pytest.raises(errors.AlreadyInGroup):
        engine.join_group(u.id, g.id)


def test_common_user_cannot_dissolve(engine):
    admin = engine.register_user("groupAdmin")
    g = engine.create_group(admin.id, Pattern(kind="poem"))
    u = engine.register_user("common")
    with pytest.raises(errors.Unauthorized):
        engine.dissolve_group(u.id, g.id)


def test_system_admin_dissolves_any(engine):
    admin = engine.register_user("groupAdmin")
    sysadmin = engine.register_user("systemAdmin")
    g = engine.create_group(admin.id, Pattern(kind="poem"))
    engine.dissolve_group(sysadmin.id, g.id)
    assert g.id not in engine.groups
    assert admin.group_id is None


def test_dissolution_reopens_assigned_tasks(engine):
    store, *_ = poem_graph()
    admin = engine.register_user("groupAdmin")
    g = engine.create_group(admin.id, Pattern(kind="poem"))
    member = engine.register_user("common")
    engine.join_group(member.id, g.id)
    tasks = engine.generate_and_allocate(store, 2)
    engine.assign_task(admin.id, tasks[0].id, member.id)
    engine.dissolve_group(admin.id, g.id)
    assert tasks[0].status == TASK_OPEN
    assert tasks[0].assignee_id is None
    assert tasks[0].group_id is None


# -- apportionment -----------------------------------------------------------------

def test_apportion_spec_example():
    assert apportion({"g1": 10, "g2": 30}, 40) == {"g1": 11, "g2": 29}


def test_apportion_single_group():
    assert apportion({"g1": 7}, 5) == {"g1": 5}


def test_apportion_even_split():
    assert apportion({"g1": 5, "g2": 5}, 10) == {"g1": 5, "g2": 5}


@given(scores=st.lists(st.integers(min_value=0, max_value=1000), min_size=1, max_size=12),
       batch=st.integers(min_value=1, max_value=500))
def test_apportion_conserves_and_proportional(scores, batch):
    table = {f"g{i}": s for i, s in enumerate(scores)}
    counts = apportion(table, batch)
    assert sum(counts.values()) == batch
    total_weight = sum(s + 1 for s in scores)
    for gid, score in table.items():
        quota = Fraction(batch * (score + 1), total_weight)
        assert abs(counts[gid] - quota) < 1


# -- allocation over the store --------------------------------------------------------

def test_allocate_single_group_gets_batch(engine):
    store, *_ = poem_graph()
    admin = engine.register_user("groupAdmin")
    engine.create_group(admin.id, Pattern(kind="poem"))
    tasks = engine.generate_and_allocate(store, 5)
    assert 1 <= len(tasks) <= 5  # capped by available items
    assert all(t.status == TASK_OPEN for t in tasks)


def test_allocate_no_eligible_groups(engine):
    store, *_ = poem_graph()
    admin = engine.register_user("groupAdmin")
    engine.create_group(admin.id, Pattern(kind="unmatched-topic"))
    with pytest.raises(errors.NoEligibleGroups):
        engine.generate_and_allocate(store, 5)


def test_allocate_task_kinds_by_target_state(engine):
    store = GraphStore()
    bare = store.add_entity("poem", "no attrs at all")
    thin = store.add_entity("poem", "one attr", {"era": "tang"})
    rich = store.add_entity("poem", "full attrs", {"era": "tang", "style": "jueju"})
    admin = engine.register_user("groupAdmin")
    engine.create_group(admin.id, Pattern(kind="poem"))
    tasks = engine.generate_and_allocate(store, 10)
    kinds = {t.target: t.kind for t in tasks}
    assert kinds[bare.id] == TASK_CONCEPT
    assert kinds[thin.id] == TASK_ATTRIBUTE
    assert kinds[rich.id] == TASK_EXPAND  # attrs fine, links sparse


def test_allocate_verification_for_candidate_triples(engine):
    store, poem, author, t = poem_graph()
    admin = engine.register_user("groupAdmin")
    engine.create_group(admin.id, Pattern(predicate="wrote"))
    tasks = engine.generate_and_allocate(store, 5)
    assert any(task.kind == TASK_VERIFY and task.target == t.id for task in tasks)


def test_auto_assign_round_robin():
    engine = CrowdEngine(CrowdConfig(auto_assign=True))
    store, *_ = poem_graph()
    admin = engine.register_user("groupAdmin")
    g = engine.create_group(admin.id, Pattern(kind="poem"))
    member = engine.register_user("common")
    engine.join_group(member.id, g.id)
    tasks = engine.generate_and_allocate(store, 2)
    assert all(t.status == TASK_ASSIGNED for t in tasks)
    assert {t.assignee_id for t in tasks} <= {admin.id, member.id}


# -- completion --------------------------------------------------------------------------

def assigned_task(engine, store, kind_pattern=Pattern(predicate="wrote")):
    admin = engine.register_user("groupAdmin")
    g = engine.create_group(admin.id, kind_pattern)
    member = engine.register_user("common")
    engine.join_group(member.id, g.id)
    tasks = engine.generate_and_allocate(store, 1)
    engine.assign_task(admin.id, tasks[0].id, member.id)
    return g, member, tasks[0]


def test_complete_verification_rewards(engine):
    store = GraphStore()
    a = store.add_entity("x", "a")
    b = store.add_entity("x", "b")
    t = store.add_triple(a.id, "wrote", b.id, confidence=0.5)
    g, member, task = assigned_task(engine, store)
    engine.complete_task(store, member.id, task.id, VerificationVote(valid=True))
    assert t.confidence == Fraction(3, 5)
    assert member.score == 1
    assert g.score == 1
    assert task.status == TASK_COMPLETED


def test_complete_expansion_adds_candidate_triple(engine):
    store = GraphStore()
    a = store.add_entity("poem", "a", {"x": "1", "y": "2"})
    b = store.add_entity("poem", "b", {"x": "1", "y": "2"})
    admin = engine.register_user("groupAdmin")
    g = engine.create_group(admin.id, Pattern(kind="poem"))
    member = engine.register_user("common")
    engine.join_group(member.id, g.id)
    tasks = engine.generate_and_allocate(store, 2)
    expand = next(t for t in tasks if t.kind == TASK_EXPAND)
    engine.assign_task(admin.id, expand.id, member.id)
    engine.complete_task(store, member.id, expand.id,
                         TripleProposal(a.id, "echoes", b.id))
    added = store.query(Pattern(predicate="echoes"))
    assert len(added) == 1
    assert added[0].status == "candidate"
    assert added[0].provenance[0].user == member.id


def test_complete_not_assignee(engine):
    store = GraphStore()
    a = store.add_entity("x", "a")
    b = store.add_entity("x", "b")
    store.add_triple(a.id, "wrote", b.id, confidence=0.5)
    g, member, task = assigned_task(engine, store)
    outsider = engine.register_user("common")
    with pytest.raises(errors.NotAssignee):
        engine.complete_task(store, outsider.id, task.id, VerificationVote(valid=True))


def test_complete_wrong_payload(engine):
    store = GraphStore()
    a = store.add_entity("x", "a")
    b = store.add_entity("x", "b")
    store.add_triple(a.id, "wrote", b.id, confidence=0.5)
    g, member, task = assigned_task(engine, store)
    with pytest.raises(errors.WrongPayloadKind):
        engine.complete_task(store, member.id, task.id, AttributePatch({"k": "v"}))


def test_double_completion_rejected(engine):
    store = GraphStore()
    a = store.add_entity("x", "a")
    b = store.add_entity("x", "b")
    store.add_triple(a.id, "wrote", b.id, confidence=0.5)
    g, member, task = assigned_task(engine, store)
    engine.complete_task(store, member.id, task.id, VerificationVote(valid=True))
    with pytest.raises(errors.WrongState):
        engine.complete_task(store, member.id, task.id, VerificationVote(valid=True))


def test_n_completions_yield_n_rewards(engine):
    store = GraphStore()
    ids = [store.add_entity("poem", f"p{i}").id for i in range(6)]
    for i in range(0, 6, 2):
        store.add_triple(ids[i], "wrote", ids[i + 1], confidence=0.4)
    admin = engine.register_user("groupAdmin")
    g = engine.create_group(admin.id, Pattern(predicate="wrote"))
    member = engine.register_user("common")
    engine.join_group(member.id, g.id)
    tasks = engine.generate_and_allocate(store, 3)
    n = 0
    before = member.score
    for task in tasks:
        if task.kind == TASK_VERIFY:
            engine.assign_task(admin.id, task.id, member.id)
            engine.complete_task(store, member.id, task.id, VerificationVote(valid=True))
            n += 1
    assert member.score == before + n * engine.config.reward
    assert g.score == engine.replay_group_score(g.id)


def test_group_score_matches_completion_history(engine):
    store = GraphStore()
    a = store.add_entity("poem", "a")
    b = store.add_entity("poem", "b")
    store.add_triple(a.id, "wrote", b.id, confidence=0.3)
    g, member, task = assigned_task(engine, store)
    engine.complete_task(store, member.id, task.id, VerificationVote(valid=False))
    assert g.score == engine.replay_group_score(g.id)


# -- task state machine ----------------------------------------------------------------

def test_task_state_machine_exhaustive(engine):
    # no transition may skip or go backwards: enumerate all short traces
    store = GraphStore()
    a = store.add_entity("poem", "a")
    b = store.add_entity("poem", "b")
    store.add_triple(a.id, "wrote", b.id, confidence=0.3)
    admin = engine.register_user("groupAdmin")
    g = engine.create_group(admin.id, Pattern(predicate="wrote"))
    member = engine.register_user("common")
    engine.join_group(member.id, g.id)

    for trace in itertools.product(["assign", "complete"], repeat=3):
        eng = CrowdEngine()
        st2 = GraphStore()
        x = st2.add_entity("poem", "x")
        y = st2.add_entity("poem", "y")
        st2.add_triple(x.id, "wrote", y.id, confidence=0.3)
        adm = eng.register_user("groupAdmin")
        grp = eng.create_group(adm.id, Pattern(predicate="wrote"))
        mem = eng.register_user("common")
        eng.join_group(mem.id, grp.id)
        task = eng.generate_and_allocate(st2, 1)[0]
        seen = [task.status]
        for step in trace:
            try:
                if step == "assign":
                    eng.assign_task(adm.id, task.id, mem.id)
                else:
                    eng.complete_task(st2, mem.id, task.id, VerificationVote(valid=True))
            except errors.KgcfError:
                pass
            seen.append(task.status)
        order = {TASK_OPEN: 0, TASK_ASSIGNED: 1, TASK_COMPLETED: 2}
        for prev, cur in zip(seen, seen[1:]):
            assert order[cur] - order[prev] in (0, 1)


def test_persistence_round_trip(engine):
    store, *_ = poem_graph()
    admin = engine.register_user("groupAdmin")
    g = engine.create_group(admin.id, Pattern(kind="poem"))
    member = engine.register_user("common")
    engine.join_group(member.id, g.id)
    engine.generate_and_allocate(store, 2)
    text = engine.dumps()
    again = CrowdEngine.loads(text)
    assert again.dumps() == text
    assert again.users.keys() == engine.users.keys()
    assert again.groups[g.id].member_ids == g.member_ids
