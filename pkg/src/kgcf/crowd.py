"""Users, groups, tasks: score-proportional work allocation and rewards.

Groups accumulate score as their members complete tasks, and that score
drives how much of each future task batch they receive. Allocation is
proportional to (score + 1) — the +1 keeps brand-new groups in the game —
with exact conservation of the batch size.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import (
    AlreadyInGroup,
    NoEligibleGroups,
    NotAssignee,
    ParseError,
    Unauthorized,
    UnknownGroup,
    UnknownTask,
    UnknownUser,
    WrongPayloadKind,
    WrongState,
)
from .store import (
    GraphStore,
    Literal,
    Pattern,
    STATUS_CANDIDATE,
    as_fraction,
    id_sort_key,
    _esc,
    _unesc,
)

CROWD_HEADER = "kgcf-crowd/1"

ROLE_COMMON = "common"
ROLE_GROUP_ADMIN = "groupAdmin"
ROLE_SYSTEM_ADMIN = "systemAdmin"
ROLES = (ROLE_COMMON, ROLE_GROUP_ADMIN, ROLE_SYSTEM_ADMIN)

TASK_VERIFY = "tripleVerification"
TASK_CONCEPT = "conceptPerfection"
TASK_ATTRIBUTE = "attributePerfection"
TASK_EXPAND = "relationExpansion"
TASK_KINDS = (TASK_VERIFY, TASK_CONCEPT, TASK_ATTRIBUTE, TASK_EXPAND)

TASK_OPEN = "open"
TASK_ASSIGNED = "assigned"
TASK_COMPLETED = "completed"


@dataclass
class User:
    id: str
    role: str
    score: int = 0
    group_id: str | None = None


@dataclass
class Group:
    id: str
    admin_user_id: str
    topic: Pattern
    score: int = 0
    member_ids: set[str] = field(default_factory=set)


@dataclass
class Task:
    id: str
    kind: str
    target: str            # triple id or entity id
    group_id: str | None
    assignee_id: str | None = None
    status: str = TASK_OPEN
    result: dict | None = None


@dataclass(frozen=True)
class VerificationVote:
    valid: bool


@dataclass(frozen=True)
class AttributePatch:
    attrs: dict


@dataclass(frozen=True)
class TripleProposal:
    subject: str
    predicate: str
    object: str | Literal


@dataclass(frozen=True)
class CrowdConfig:
    reward: int = 1                    # score per completed task
    delta_task: float = 0.1            # confidence step for verification votes
    low_confidence: Fraction = Fraction(1, 2)
    sparse_attrs: int = 2
    sparse_links: int = 2
    auto_assign: bool = False


def apportion(scores: Mapping[str, int], batch: int) -> dict[str, int]:
    """Split ``batch`` across groups proportionally to (score + 1).

    Exact quotas are floored; leftover units go one per group by largest
    quota-relative remainder (a fractional seat matters most to the group
    with the smallest share), ties by ascending group id. Counts always sum
    to ``batch`` and each differs from its exact quota by less than 1.
    """
    if not scores:
        raise NoEligibleGroups("no groups to allocate to")
    if batch < 1:
        raise ValueError("batch must be >= 1")
    weights = {g: s + 1 for g, s in scores.items()}
    total = sum(weights.values())
    quotas = {g: Fraction(batch * w, total) for g, w in weights.items()}
    counts = {g: int(q) for g, q in quotas.items()}
    fracs = {g: quotas[g] - counts[g] for g in quotas}
    leftover = batch - sum(counts.values())
    priority = sorted(quotas, key=lambda g: (-(fracs[g] / weights[g]), id_sort_key(g)))
    for g in priority[:leftover]:
        counts[g] += 1
    return counts


class CrowdEngine:
    def __init__(self, config: CrowdConfig | None = None):
        self.config = config or CrowdConfig()
        self.users: dict[str, User] = {}
        self.groups: dict[str, Group] = {}
        self.tasks: dict[str, Task] = {}
        self.completions: list[tuple[str, str, int]] = []  # (task, user, reward)
        self._next_user = 1
        self._next_group = 1
        self._next_task = 1

    # -- lookups ---------------------------------------------------------------

    def user(self, user_id: str) -> User:
        try:
            return self.users[user_id]
        except KeyError:
            raise UnknownUser(user_id) from None

    def group(self, group_id: str) -> Group:
        try:
            return self.groups[group_id]
        except KeyError:
            raise UnknownGroup(group_id) from None

    def task(self, task_id: str) -> Task:
        try:
            return self.tasks[task_id]
        except KeyError:
            raise UnknownTask(task_id) from None

    # -- users and groups ---------------------------------------------------------

    def register_user(self, role: str) -> User:
        if role not in ROLES:
            raise Unauthorized(f"unknown role {role!r}")
        user = User(id=f"u{self._next_user}", role=role)
        self._next_user += 1
        self.users[user.id] = user
        return user

    def reward_user(self, user_id: str) -> None:
        self.user(user_id).score += self.config.reward

    def create_group(self, actor_id: str, topic: Pattern) -> Group:
        actor = self.user(actor_id)
        if actor.role not in (ROLE_GROUP_ADMIN, ROLE_SYSTEM_ADMIN):
            raise Unauthorized("only group or system administrators create groups")
        if actor.role == ROLE_GROUP_ADMIN and actor.group_id is not None:
            raise AlreadyInGroup(actor_id)
        group = Group(id=f"g{self._next_group}", admin_user_id=actor_id, topic=topic)
        self._next_group += 1
        if actor.role == ROLE_GROUP_ADMIN:
            actor.group_id = group.id
            group.member_ids.add(actor_id)
        self.groups[group.id] = group
        return group

    def join_group(self, user_id: str, group_id: str) -> Group:
        user = self.user(user_id)
        group = self.group(group_id)
        if user.role == ROLE_SYSTEM_ADMIN:
            raise Unauthorized("system administrators do not join groups")
        if user.group_id is not None:
            raise AlreadyInGroup(user_id)
        user.group_id = group_id
        group.member_ids.add(user_id)
        return group

    def dissolve_group(self, actor_id: str, group_id: str) -> None:
        actor = self.user(actor_id)
        group = self.group(group_id)
        if not (actor.role == ROLE_SYSTEM_ADMIN
                or (actor.role == ROLE_GROUP_ADMIN and group.admin_user_id == actor_id)):
            raise Unauthorized("dissolution requires the group's admin or a system admin")
        for task in self.tasks.values():
            if task.group_id == group_id and task.status != TASK_COMPLETED:
                task.status = TASK_OPEN
                task.assignee_id = None
                task.group_id = None
        for member_id in group.member_ids:
            member = self.users.get(member_id)
            if member is not None and member.group_id == group_id:
                member.group_id = None
        del self.groups[group_id]

    # -- task generation --------------------------------------------------------------

    def _candidate_items(self, store: GraphStore) -> list[tuple[str, str]]:
        items: list[tuple[str, str]] = []
        for t in store.live_triples():
            if t.status == STATUS_CANDIDATE or t.confidence < self.config.low_confidence:
                items.append(("triple", t.id))
        for eid in sorted(store.entities, key=id_sort_key):
            ent = store.entities[eid]
            if (len(ent.attrs) < self.config.sparse_attrs
                    or len(store.incident_triples(eid)) < self.config.sparse_links):
                items.append(("entity", eid))
        return items

    def _item_matches(self, store: GraphStore, item: tuple[str, str], topic: Pattern) -> bool:
        kind, ident = item
        if kind == "triple":
            return store._triple_matches(store.triple(ident), topic)
        if topic.has_triple_fields:
            return False
        return store._entity_matches(store.entities[ident], topic)

    def _task_kind(self, store: GraphStore, item: tuple[str, str]) -> str:
        kind, ident = item
        if kind == "triple":
            return TASK_VERIFY
        ent = store.entities[ident]
        if not ent.attrs:
            return TASK_CONCEPT
        if len(ent.attrs) < self.config.sparse_attrs:
            return TASK_ATTRIBUTE
        return TASK_EXPAND

    def generate_and_allocate(self, store: GraphStore, batch: int) -> list[Task]:
        if batch < 1:
            raise ValueError("batch must be >= 1")
        items = self._candidate_items(store)
        matches: dict[str, list[tuple[str, str]]] = {}
        for gid in sorted(self.groups, key=id_sort_key):
            topic = self.groups[gid].topic
            matched = [it for it in items if self._item_matches(store, it, topic)]
            if matched:
                matches[gid] = matched
        if not matches:
            raise NoEligibleGroups("no group topic matches any pending item")
        counts = apportion({g: self.groups[g].score for g in matches}, batch)
        created: list[Task] = []
        claimed: set[tuple[str, str]] = set()
        for gid in sorted(matches, key=id_sort_key):
            take = counts[gid]
            for item in matches[gid]:
                if take == 0:
                    break
                if item in claimed:
                    continue
                claimed.add(item)
                task = Task(id=f"task{self._next_task}", kind=self._task_kind(store, item),
                            target=item[1], group_id=gid)
                self._next_task += 1
                self.tasks[task.id] = task
                created.append(task)
                take -= 1
        if self.config.auto_assign:
            self._auto_assign(created)
        return created

    def _auto_assign(self, tasks: list[Task]) -> None:
        cursor: dict[str, int] = {}
        for task in tasks:
            group = self.groups[task.group_id]
            members = sorted(group.member_ids, key=id_sort_key)
            if not members:
                continue
            i = cursor.get(group.id, 0)
            task.assignee_id = members[i % len(members)]
            task.status = TASK_ASSIGNED
            cursor[group.id] = i + 1

    def assign_task(self, actor_id: str, task_id: str, member_id: str) -> Task:
        actor = self.user(actor_id)
        task = self.task(task_id)
        if task.status != TASK_OPEN:
            raise WrongState(f"task {task_id} is {task.status}")
        if task.group_id is None:
            raise UnknownGroup("task has no group")
        group = self.group(task.group_id)
        if not (actor.role == ROLE_SYSTEM_ADMIN
                or (actor.role == ROLE_GROUP_ADMIN and group.admin_user_id == actor_id)):
            raise Unauthorized("assignment requires the group's admin or a system admin")
        if member_id not in group.member_ids:
            raise Unauthorized(f"{member_id} is not a member of {group.id}")
        task.assignee_id = member_id
        task.status = TASK_ASSIGNED
        return task

    # -- completion ----------------------------------------------------------------------

    def complete_task(self, store: GraphStore, user_id: str, task_id: str, payload) -> Task:
        user = self.user(user_id)
        task = self.task(task_id)
        if task.status == TASK_COMPLETED:
            raise WrongState(f"task {task_id} already completed")
        if task.status != TASK_ASSIGNED or task.assignee_id != user_id:
            raise NotAssignee(task_id)
        if task.kind == TASK_VERIFY:
            if not isinstance(payload, VerificationVote):
                raise WrongPayloadKind(task.kind)
            delta = as_fraction(self.config.delta_task)
            store.adjust_confidence(task.target, delta if payload.valid else -delta)
            task.result = {"vote": "valid" if payload.valid else "invalid"}
        elif task.kind in (TASK_CONCEPT, TASK_ATTRIBUTE):
            if not isinstance(payload, AttributePatch):
                raise WrongPayloadKind(task.kind)
            store.edit_entity(user_id, task.target, attrs=payload.attrs)
            task.result = {"attrs": dict(payload.attrs)}
        elif task.kind == TASK_EXPAND:
            if not isinstance(payload, TripleProposal):
                raise WrongPayloadKind(task.kind)
            t = store.add_triple(payload.subject, payload.predicate, payload.object,
                                 source="crowd", user=user_id)
            task.result = {"triple": t.id}
        else:
            raise WrongPayloadKind(task.kind)
        task.status = TASK_COMPLETED
        reward = self.config.reward
        user.score += reward
        if task.group_id is not None and task.group_id in self.groups:
            self.groups[task.group_id].score += reward
        self.completions.append((task_id, user_id, reward))
        return task

    def replay_group_score(self, group_id: str) -> int:
        """Recompute a group's score from the completion history."""
        total = 0
        for task_id, _user, reward in self.completions:
            task = self.tasks.get(task_id)
            if task is not None and task.group_id == group_id:
                total += reward
        return total

    # -- persistence -------------------------------------------------------------------------

    def dumps(self) -> str:
        lines = [CROWD_HEADER]
        for uid in sorted(self.users, key=id_sort_key):
            u = self.users[uid]
            lines.append("\t".join(["user", _esc(u.id), u.role, str(u.score),
                                    _esc(u.group_id or "")]))
        for gid in sorted(self.groups, key=id_sort_key):
            g = self.groups[gid]
            lines.append("\t".join([
                "group", _esc(g.id), _esc(g.admin_user_id), str(g.score),
                json.dumps(g.topic.to_dict(), sort_keys=True),
                json.dumps(sorted(g.member_ids), sort_keys=True),
            ]))
        for tid in sorted(self.tasks, key=id_sort_key):
            t = self.tasks[tid]
            lines.append("\t".join([
                "task", _esc(t.id), t.kind, _esc(t.target), _esc(t.group_id or ""),
                _esc(t.assignee_id or ""), t.status,
                json.dumps(t.result, sort_keys=True),
            ]))
        for task_id, user_id, reward in self.completions:
            lines.append("\t".join(["completion", _esc(task_id), _esc(user_id), str(reward)]))
        lines.append(f"counters\t{self._next_user}\t{self._next_group}\t{self._next_task}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, config: CrowdConfig | None = None) -> "CrowdEngine":
        engine = cls(config=config)
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines or lines[0] != CROWD_HEADER:
            raise ParseError("unknown crowd format version", 1)
        for no, raw in enumerate(lines[1:], start=2):
            f = raw.split("\t")
            try:
                if f[0] == "user":
                    u = User(id=_unesc(f[1]), role=f[2], score=int(f[3]),
                             group_id=_unesc(f[4]) or None)
                    engine.users[u.id] = u
                elif f[0] == "group":
                    g = Group(id=_unesc(f[1]), admin_user_id=_unesc(f[2]), score=int(f[3]),
                              topic=Pattern.from_dict(json.loads(f[4])),
                              member_ids=set(json.loads(f[5])))
                    engine.groups[g.id] = g
                elif f[0] == "task":
                    t = Task(id=_unesc(f[1]), kind=f[2], target=_unesc(f[3]),
                             group_id=_unesc(f[4]) or None, assignee_id=_unesc(f[5]) or None,
                             status=f[6], result=json.loads(f[7]))
                    engine.tasks[t.id] = t
                elif f[0] == "completion":
                    engine.completions.append((_unesc(f[1]), _unesc(f[2]), int(f[3])))
                elif f[0] == "counters":
                    engine._next_user = int(f[1])
                    engine._next_group = int(f[2])
                    engine._next_task = int(f[3])
                else:
                    raise ValueError(f"unknown record type {f[0]!r}")
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise ParseError(str(exc), no) from None
        return engine
