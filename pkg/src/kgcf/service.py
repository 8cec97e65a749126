"""Role-authenticated HTTP API over the whole engine.

Every mutation funnels through ``AppState.execute`` under a single writer
lock and is appended to the event log; replaying the log (plus the latest
snapshot) reproduces the exact pre-restart state, logical clocks included.
Login attaches a reverse captcha; the session is unusable until the
challenge is answered.
"""

from __future__ import annotations

import json
import random
import threading
from dataclasses import dataclass, field
from fractions import Fraction

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import errors
from .captcha import CaptchaConfig, CaptchaEngine, KIND_FILL_BLANK
from .consensus import ConsensusConfig, ConsensusEngine, SLOT_OBJECT
from .crowd import (
    AttributePatch,
    CrowdConfig,
    CrowdEngine,
    ROLE_COMMON,
    ROLE_GROUP_ADMIN,
    ROLE_SYSTEM_ADMIN,
    TripleProposal,
    VerificationVote,
)
from .errors import KgcfError
from .events import EventLog
from .recommend import LearnerRecord, RecommendConfig, build_report, validate_record
from .store import GraphStore, Literal, Pattern, StoreConfig, as_fraction, id_sort_key
from . import analytics

ERROR_STATUS = {
    "Unauthenticated": 401, "UnknownUser": 401,
    "Unauthorized": 403, "NotAssignee": 403, "ChallengePending": 403,
    "UnknownEntity": 404, "UnknownTriple": 404, "UnknownTarget": 404,
    "UnknownGroup": 404, "UnknownTask": 404, "UnknownStudent": 404,
    "UnknownCourse": 404, "NoRoute": 404, "UnknownChallenge": 404,
    "UnknownLedger": 404,
    "IllegalTransition": 409, "EntityInUse": 409, "AlreadyInGroup": 409,
    "WrongState": 409, "ChallengeClosed": 409, "NoEligibleGroups": 409,
    "LedgerNotCollecting": 409, "NotInAmbiguityVote": 409,
    "SlotAlreadyFilled": 409, "TooFewVotes": 409, "EmptyStore": 409,
    "EmptyLedger": 409,
    "ParseError": 400,
}
# anything unlisted (EmptyLabel, InvalidKind, DanglingReference, ...) is a 422
DEFAULT_ERROR_STATUS = 422


@dataclass(frozen=True)
class ServiceConfig:
    store: StoreConfig = field(default_factory=StoreConfig)
    crowd: CrowdConfig = field(default_factory=CrowdConfig)
    consensus: ConsensusConfig = field(default_factory=ConsensusConfig)
    captcha: CaptchaConfig = field(default_factory=CaptchaConfig)
    recommend_p: Fraction = Fraction(1, 5)
    snapshot_every: int = 100


@dataclass
class Session:
    token: str
    user_id: str
    issued_at: int
    pending_challenge_id: str | None = None


class AppState:
    def __init__(self, config: ServiceConfig | None = None, log_path: str | None = None):
        self.config = config or ServiceConfig()
        self.store = GraphStore(self.config.store)
        self.crowd = CrowdEngine(self.config.crowd)
        self.consensus = ConsensusEngine(self.config.consensus)
        self.captcha = CaptchaEngine(self.store, self.consensus,
                                     self.config.captcha, crowd=self.crowd)
        self.sessions: dict[str, Session] = {}
        self.records: dict[str, LearnerRecord] = {}
        self.votes: dict[str, dict[str, int]] = {}  # slot -> {unequal, total}
        self.rng = random.Random(self.config.captcha.rng_seed)
        self.lock = threading.RLock()
        self.log = EventLog(log_path)
        self._next_session = 1
        self._events_since_snapshot = 0

    # -- event execution ---------------------------------------------------

    def execute(self, kind: str, payload: dict):
        """Validate+apply one event atomically, then append it to the log."""
        with self.lock:
            result = self._apply(kind, payload)
            self.log.append_event(kind, payload)
            self._events_since_snapshot += 1
            if (self.config.snapshot_every
                    and self._events_since_snapshot >= self.config.snapshot_every):
                self.log.append_snapshot(self.snapshot_payload())
                self._events_since_snapshot = 0
            return result

    def _apply(self, kind: str, payload: dict):
        handler = getattr(self, f"_apply_{kind}", None)
        if handler is None:
            raise errors.InvalidConfig(f"unknown event kind {kind!r}")
        return handler(payload)

    # -- individual events ---------------------------------------------------

    def _apply_register_user(self, p):
        return self.crowd.register_user(p["role"])

    def _apply_login(self, p):
        user = self.crowd.user(p["userId"])
        token = f"tok{self._next_session}"
        self._next_session += 1
        challenge = None
        ch = p.get("challenge")
        if ch is not None:
            if ch["kind"] == KIND_FILL_BLANK:
                challenge = self.captcha.make_fill_blank(ch["target"], ch["slot"])
            else:
                challenge = self.captcha.make_confirmatory(ch["target"])
        session = Session(token=token, user_id=user.id,
                          issued_at=self.store.logical_clock,
                          pending_challenge_id=challenge.id if challenge else None)
        self.sessions[token] = session
        return session, challenge

    def _apply_captcha_answer(self, p):
        session = self.sessions[p["token"]]
        challenge = self.captcha.challenge(p["challengeId"])
        outcome = self.captcha.submit(challenge, session.user_id, p["answer"])
        if session.pending_challenge_id == challenge.id:
            session.pending_challenge_id = None
        slot = challenge.ledger_id
        if slot is not None and slot not in self.consensus.applied:
            resolution = self.consensus.resolutions.get(slot)
            if resolution is not None:
                # the answer closed the slot unanimously; materialize it
                self.consensus.apply_resolution(self.store,
                                                self.consensus.ledger(slot),
                                                resolution)
        return outcome

    def _apply_create_group(self, p):
        return self.crowd.create_group(p["actorId"], Pattern.from_dict(p["topic"]))

    def _apply_join_group(self, p):
        return self.crowd.join_group(p["userId"], p["groupId"])

    def _apply_dissolve_group(self, p):
        return self.crowd.dissolve_group(p["actorId"], p["groupId"])

    def _apply_allocate(self, p):
        return self.crowd.generate_and_allocate(self.store, p["batch"])

    def _apply_assign_task(self, p):
        return self.crowd.assign_task(p["actorId"], p["taskId"], p["memberId"])

    def _apply_complete_task(self, p):
        body = p["payload"]
        if "vote" in body:
            payload = VerificationVote(valid=body["vote"] == "valid")
        elif "attrs" in body:
            payload = AttributePatch(attrs=dict(body["attrs"]))
        elif "triple" in body:
            t = body["triple"]
            payload = TripleProposal(subject=t["subject"], predicate=t["predicate"],
                                     object=_object_from_json(t["object"]))
        else:
            raise errors.WrongPayloadKind("unrecognized completion payload")
        return self.crowd.complete_task(self.store, p["userId"], p["taskId"], payload)

    def _apply_add_entity(self, p):
        return self.store.add_entity(p["kind"], p["label"], p.get("attrs") or {},
                                     actor=p.get("actorId"))

    def _apply_add_triple(self, p):
        conf = p.get("confidence")
        return self.store.add_triple(
            p["subject"], p["predicate"], _object_from_json(p["object"]),
            source=p.get("source", "crowd"), user=p.get("actorId"),
            confidence=None if conf is None else as_fraction(conf))

    def _apply_patch_triple(self, p):
        t = self.store.triple(p["tripleId"])
        if p.get("status") is not None:
            self.store.set_status(t.id, p["status"], actor=p.get("actorId"))
        if p.get("confidenceDelta") is not None:
            self.store.adjust_confidence(t.id, as_fraction(p["confidenceDelta"]))
        return t

    def _apply_delete_triple(self, p):
        self.store.delete_triple(p.get("actorId"), p["tripleId"])

    def _apply_delete_entity(self, p):
        self.store.delete_entity(p.get("actorId"), p["entityId"])

    def _apply_put_record(self, p):
        record = LearnerRecord(
            student_id=p["studentId"],
            finished={c: {rt: set(ids) for rt, ids in buckets.items()}
                      for c, buckets in p.get("finished", {}).items()},
            error_rates={e: as_fraction(v) for e, v in p.get("errorRates", {}).items()},
        )
        validate_record(self.store, record)
        self.records[p["studentId"]] = record
        return record

    def _apply_ambiguity_vote(self, p):
        slot = p["slot"]
        ledger = self.consensus.ledger(slot)
        if ledger.state != "ambiguityVote":
            raise errors.NotInAmbiguityVote(slot)
        if p["vote"] not in ("unequal", "equal"):
            raise errors.InvalidAnswer(p["vote"])
        tally = self.votes.setdefault(slot, {"unequal": 0, "total": 0})
        if p["vote"] == "unequal":
            tally["unequal"] += 1
        tally["total"] += 1
        if tally["total"] >= self.config.consensus.min_votes_for_resolve:
            res = self.consensus.resolve(ledger, tally["unequal"], tally["total"])
            self.consensus.apply_resolution(self.store, ledger, res)
            return {"resolved": True, "resolution": res, "tally": dict(tally)}
        return {"resolved": False, "resolution": None, "tally": dict(tally)}

    def _apply_import_graph(self, p):
        self.store = GraphStore.loads(p["text"], config=self.config.store)
        self.captcha.store = self.store
        return self.store

    # -- login challenge drawing (records the outcome into the event) ----------

    def draw_challenge(self) -> dict | None:
        with self.lock:
            if not self.store.live_triples():
                return None
            top, bottom = self.store.top_and_bottom(self.config.captcha.n)
            pool = sorted({t.id for t in top} | {t.id for t in bottom}, key=id_sort_key)
            target = self.rng.choice(pool)
            if self.rng.random() < self.config.captcha.p_fill_blank:
                return {"kind": KIND_FILL_BLANK, "target": target, "slot": SLOT_OBJECT}
            return {"kind": "confirmatory", "target": target, "slot": None}

    # -- snapshot / restore --------------------------------------------------------

    def snapshot_payload(self) -> dict:
        return {
            "graph": self.store.dumps(),
            "crowd": self.crowd.dumps(),
            "consensus": self.consensus.dumps(),
            "sessions": [{
                "token": s.token, "userId": s.user_id, "issuedAt": s.issued_at,
                "pendingChallengeId": s.pending_challenge_id,
            } for s in self.sessions.values()],
            "nextSession": self._next_session,
            "challenges": [{
                "id": c.id, "kind": c.kind, "questionForm": c.question_form,
                "target": c.target_triple_id, "blankedSlot": c.blanked_slot,
                "ledgerId": c.ledger_id, "prompt": c.prompt, "open": c.open,
            } for c in self.captcha.challenges.values()],
            "nextChallenge": self.captcha._next,
            "votes": self.votes,
            "records": {
                sid: {
                    "finished": {c: {rt: sorted(ids) for rt, ids in b.items()}
                                 for c, b in r.finished.items()},
                    "errorRates": {e: str(v) for e, v in r.error_rates.items()},
                } for sid, r in self.records.items()
            },
        }

    def load_snapshot(self, payload: dict) -> None:
        from .captcha import Challenge

        self.store = GraphStore.loads(payload["graph"], config=self.config.store)
        self.crowd = CrowdEngine.loads(payload["crowd"], config=self.config.crowd)
        self.consensus = ConsensusEngine.loads(payload["consensus"],
                                               config=self.config.consensus)
        self.captcha = CaptchaEngine(self.store, self.consensus,
                                     self.config.captcha, crowd=self.crowd)
        for c in payload["challenges"]:
            self.captcha.challenges[c["id"]] = Challenge(
                id=c["id"], kind=c["kind"], question_form=c["questionForm"],
                target_triple_id=c["target"], blanked_slot=c["blankedSlot"],
                ledger_id=c["ledgerId"], prompt=c["prompt"], open=c["open"])
        self.captcha._next = payload["nextChallenge"]
        self.sessions = {
            s["token"]: Session(token=s["token"], user_id=s["userId"],
                                issued_at=s["issuedAt"],
                                pending_challenge_id=s["pendingChallengeId"])
            for s in payload["sessions"]
        }
        self._next_session = payload["nextSession"]
        self.votes = {k: dict(v) for k, v in payload["votes"].items()}
        self.records = {
            sid: LearnerRecord(
                student_id=sid,
                finished={c: {rt: set(ids) for rt, ids in b.items()}
                          for c, b in r["finished"].items()},
                error_rates={e: Fraction(v) for e, v in r["errorRates"].items()},
            ) for sid, r in payload["records"].items()
        }

    @classmethod
    def open(cls, path: str, config: ServiceConfig | None = None) -> "AppState":
        import os

        state = cls(config=config)
        if os.path.exists(path):
            snapshot, events_after, last_seq = EventLog.read(path)
            if snapshot is not None:
                state.load_snapshot(snapshot)
            for ev in events_after:
                state._apply(ev["kind"], ev["payload"])
            state.log = EventLog(path)
            state.log.seq = last_seq
        else:
            state.log = EventLog(path)
        return state

    def state_digest(self) -> dict:
        """Canonical textual form of everything replay must reproduce."""
        return {
            "graph": self.store.dumps(),
            "crowd": self.crowd.dumps(),
            "consensus": self.consensus.dumps(),
            "sessions": sorted((s.token, s.user_id, s.issued_at, s.pending_challenge_id)
                               for s in self.sessions.values()),
            "votes": json.dumps(self.votes, sort_keys=True),
        }


def _object_from_json(obj) -> str | Literal:
    if isinstance(obj, dict):
        if "literal" in obj:
            return Literal(str(obj["literal"]))
        if "entity" in obj:
            return str(obj["entity"])
    raise errors.InvalidAnswer("object must be {\"entity\": id} or {\"literal\": text}")


# -- JSON views --------------------------------------------------------------------

def entity_json(e) -> dict:
    return {"id": e.id, "kind": e.kind, "label": e.label, "attrs": dict(e.attrs)}


def triple_json(t) -> dict:
    obj = {"literal": t.object.text} if t.object_is_literal else {"entity": t.object}
    return {
        "id": t.id, "subject": t.subject, "predicate": t.predicate, "object": obj,
        "confidence": float(t.confidence), "status": t.status,
        "provenance": [{"source": p.source, "user": p.user, "logicalTime": p.logical_time}
                       for p in t.provenance],
    }


def user_json(u) -> dict:
    return {"id": u.id, "role": u.role, "score": u.score, "groupId": u.group_id}


def group_json(g) -> dict:
    return {"id": g.id, "adminUserId": g.admin_user_id, "score": g.score,
            "topic": g.topic.to_dict(), "memberIds": sorted(g.member_ids)}


def task_json(t) -> dict:
    return {"id": t.id, "kind": t.kind, "target": t.target, "groupId": t.group_id,
            "assigneeId": t.assignee_id, "status": t.status, "result": t.result}


def challenge_json(c) -> dict | None:
    if c is None:
        return None
    return {"id": c.id, "kind": c.kind, "questionForm": c.question_form,
            "prompt": c.prompt, "targetTripleId": c.target_triple_id,
            "blankedSlot": c.blanked_slot, "ledgerId": c.ledger_id}


def report_json(report) -> dict:
    return {
        "student": report.student_id,
        "p": float(report.p),
        "past": [{"exercise": it.exercise_id,
                  "ls": None if it.ls is None else float(it.ls),
                  "unstarted": it.ls is None}
                 for it in report.past],
        "incremental": report.incremental,
        "unstartedLearner": report.unstarted_learner,
    }


# -- FastAPI app -----------------------------------------------------------------------

def create_app(state: AppState) -> FastAPI:
    app = FastAPI(title="kgcf", docs_url=None, redoc_url=None)
    app.state.kgcf = state

    @app.exception_handler(KgcfError)
    async def domain_error(request: Request, exc: KgcfError):
        status = ERROR_STATUS.get(exc.code, DEFAULT_ERROR_STATUS)
        return JSONResponse(status_code=status,
                            content={"code": exc.code, "message": str(exc)})

    @app.exception_handler(StarletteHTTPException)
    async def http_error(request: Request, exc: StarletteHTTPException):
        code = "NotFound" if exc.status_code == 404 else "HttpError"
        return JSONResponse(status_code=exc.status_code,
                            content={"code": code, "message": str(exc.detail)})

    @app.exception_handler(RequestValidationError)
    async def body_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=422,
                            content={"code": "InvalidBody", "message": str(exc)})

    def auth(request: Request) -> Session:
        header = request.headers.get("authorization", "")
        if not header.startswith("Bearer "):
            raise errors.Unauthenticated("missing bearer token")
        token = header.removeprefix("Bearer ")
        session = state.sessions.get(token)
        if session is None:
            raise errors.Unauthenticated("unknown token")
        return session

    def gated(request: Request) -> Session:
        session = auth(request)
        if session.pending_challenge_id is not None:
            raise errors.ChallengePending(session.pending_challenge_id)
        return session

    def require_role(session: Session, *roles: str):
        user = state.crowd.user(session.user_id)
        if user.role not in roles:
            raise errors.Unauthorized(f"{user.role} may not call this endpoint")
        return user

    ANY_ROLE = (ROLE_COMMON, ROLE_GROUP_ADMIN, ROLE_SYSTEM_ADMIN)

    # -- unauthenticated -------------------------------------------------------

    @app.post("/users", status_code=201)
    async def register_user(body: dict):
        user = state.execute("register_user", {"role": body.get("role", ROLE_COMMON)})
        return user_json(user)

    @app.post("/login")
    async def login(body: dict):
        with state.lock:
            state.crowd.user(body.get("userId", ""))  # 401 before drawing
            challenge = state.draw_challenge()
            session, ch = state.execute("login", {"userId": body["userId"],
                                                  "challenge": challenge})
        return {"token": session.token, "challenge": challenge_json(ch)}

    # -- captcha ---------------------------------------------------------------

    @app.post("/captcha/{challenge_id}/answer")
    async def answer_captcha(challenge_id: str, body: dict, request: Request):
        session = auth(request)
        challenge = state.captcha.challenge(challenge_id)
        if session.pending_challenge_id not in (None, challenge_id):
            raise errors.ChallengePending(session.pending_challenge_id)
        outcome = state.execute("captcha_answer", {
            "token": session.token, "challengeId": challenge_id,
            "answer": body.get("answer", "")})
        return {"proceed": outcome.proceed, "kind": outcome.kind,
                "newConfidence": outcome.new_confidence,
                "ledgerId": outcome.ledger_id}

    # -- tasks --------------------------------------------------------------------

    @app.get("/tasks")
    async def list_tasks(request: Request):
        session = gated(request)
        user = state.crowd.user(session.user_id)
        with state.lock:
            tasks = [state.crowd.tasks[tid]
                     for tid in sorted(state.crowd.tasks, key=id_sort_key)]
            if user.role == ROLE_SYSTEM_ADMIN:
                visible = tasks
            elif user.role == ROLE_GROUP_ADMIN:
                admined = {g.id for g in state.crowd.groups.values()
                           if g.admin_user_id == user.id}
                visible = [t for t in tasks
                           if t.group_id in admined or t.assignee_id == user.id]
            else:
                visible = [t for t in tasks if t.assignee_id == user.id]
        return {"tasks": [task_json(t) for t in visible]}

    @app.post("/tasks/allocate")
    async def allocate(body: dict, request: Request):
        session = gated(request)
        require_role(session, ROLE_SYSTEM_ADMIN)
        tasks = state.execute("allocate", {"actorId": session.user_id,
                                           "batch": int(body.get("batch", 1))})
        return {"tasks": [task_json(t) for t in tasks]}

    @app.post("/tasks/{task_id}/complete")
    async def complete(task_id: str, body: dict, request: Request):
        session = gated(request)
        require_role(session, *ANY_ROLE)
        task = state.execute("complete_task", {
            "userId": session.user_id, "taskId": task_id,
            "payload": body.get("payload", body)})
        return task_json(task)

    # -- groups ---------------------------------------------------------------------

    @app.post("/groups", status_code=201)
    async def create_group(body: dict, request: Request):
        session = gated(request)
        require_role(session, ROLE_GROUP_ADMIN, ROLE_SYSTEM_ADMIN)
        group = state.execute("create_group", {"actorId": session.user_id,
                                               "topic": body.get("topic", {})})
        return group_json(group)

    @app.post("/groups/{group_id}/members")
    async def join_group(group_id: str, body: dict, request: Request):
        session = gated(request)
        require_role(session, ROLE_COMMON, ROLE_GROUP_ADMIN)
        group = state.execute("join_group", {
            "userId": body.get("userId", session.user_id), "groupId": group_id})
        return group_json(group)

    @app.post("/groups/{group_id}/assign")
    async def assign(group_id: str, body: dict, request: Request):
        session = gated(request)
        require_role(session, ROLE_GROUP_ADMIN, ROLE_SYSTEM_ADMIN)
        task = state.crowd.task(body["taskId"])
        if task.group_id != group_id:
            raise errors.UnknownTask(f"{body['taskId']} not in group {group_id}")
        updated = state.execute("assign_task", {
            "actorId": session.user_id, "taskId": body["taskId"],
            "memberId": body["memberId"]})
        return task_json(updated)

    @app.delete("/groups/{group_id}")
    async def dissolve(group_id: str, request: Request):
        session = gated(request)
        require_role(session, ROLE_GROUP_ADMIN, ROLE_SYSTEM_ADMIN)
        state.execute("dissolve_group", {"actorId": session.user_id,
                                         "groupId": group_id})
        return {"dissolved": group_id}

    # -- graph -----------------------------------------------------------------------

    @app.get("/graph")
    async def get_graph(request: Request):
        gated(request)
        with state.lock:
            return {
                "logicalClock": state.store.logical_clock,
                "entities": [entity_json(state.store.entities[eid])
                             for eid in sorted(state.store.entities, key=id_sort_key)],
                "triples": [triple_json(state.store.triples[tid])
                            for tid in sorted(state.store.triples, key=id_sort_key)],
            }

    @app.post("/graph/entities", status_code=201)
    async def add_entity(body: dict, request: Request):
        session = gated(request)
        require_role(session, *ANY_ROLE)
        entity = state.execute("add_entity", {
            "actorId": session.user_id, "kind": body.get("kind", ""),
            "label": body.get("label", ""), "attrs": body.get("attrs") or {}})
        return entity_json(entity)

    @app.post("/graph/triples", status_code=201)
    async def add_triple(body: dict, request: Request):
        session = gated(request)
        require_role(session, *ANY_ROLE)
        triple = state.execute("add_triple", {
            "actorId": session.user_id, "subject": body.get("subject", ""),
            "predicate": body.get("predicate", ""), "object": body.get("object"),
            "confidence": body.get("confidence"), "source": "crowd"})
        return triple_json(triple)

    @app.patch("/graph/triples/{triple_id}")
    async def patch_triple(triple_id: str, body: dict, request: Request):
        session = gated(request)
        require_role(session, ROLE_SYSTEM_ADMIN)
        triple = state.execute("patch_triple", {
            "actorId": session.user_id, "tripleId": triple_id,
            "status": body.get("status"),
            "confidenceDelta": body.get("confidenceDelta")})
        return triple_json(triple)

    @app.delete("/graph/triples/{triple_id}")
    async def delete_triple(triple_id: str, request: Request):
        session = gated(request)
        require_role(session, *ANY_ROLE)
        state.execute("delete_triple", {"actorId": session.user_id,
                                        "tripleId": triple_id})
        return {"deleted": triple_id}

    @app.delete("/graph/entities/{entity_id}")
    async def delete_entity(entity_id: str, request: Request):
        session = gated(request)
        require_role(session, *ANY_ROLE)
        state.execute("delete_entity", {"actorId": session.user_id,
                                        "entityId": entity_id})
        return {"deleted": entity_id}

    # -- analytics ----------------------------------------------------------------------

    @app.get("/subgraphs/{kind}")
    async def subgraph(kind: str, request: Request):
        gated(request)
        if kind not in analytics.SUBGRAPH_TAGS:
            raise errors.UnknownTarget(kind)
        with state.lock:
            sg = analytics.extract_subgraph(state.store, kind)
            profiles = analytics.classify_teachers(state.store) \
                if kind == "teacherCourseType" else []
            return {
                "kind": sg.kind,
                "nodes": [entity_json(state.store.entities[eid])
                          for eid in sorted(sg.node_ids, key=id_sort_key)],
                "edges": [triple_json(state.store.triples[tid])
                          for tid in sorted(sg.triple_ids, key=id_sort_key)],
                "teachers": [{
                    "teacherId": p.teacher_id,
                    "courseIds": sorted(p.course_ids, key=id_sort_key),
                    "categoryCounts": p.category_counts,
                    "cooperative": p.cooperative,
                } for p in profiles],
            }

    @app.get("/routes")
    async def route(request: Request):
        gated(request)
        params = request.query_params
        with state.lock:
            r = analytics.learning_route(state.store, params.get("from", ""),
                                         params.get("to", ""))
        return {"from": r.from_course_id, "to": r.to_course_id,
                "path": r.path, "length": r.length}

    # -- students ----------------------------------------------------------------------

    @app.get("/students/{student_id}/recommendations")
    async def recommendations(student_id: str, request: Request):
        gated(request)
        p_param = request.query_params.get("p")
        config = RecommendConfig(p=as_fraction(p_param) if p_param
                                 else state.config.recommend_p)
        with state.lock:
            record = state.records.get(student_id,
                                       LearnerRecord(student_id=student_id))
            report = build_report(state.store, record, config)
        return report_json(report)

    @app.put("/students/{student_id}/record")
    async def put_record(student_id: str, body: dict, request: Request):
        session = gated(request)
        require_role(session, ROLE_GROUP_ADMIN, ROLE_SYSTEM_ADMIN)
        state.execute("put_record", {
            "studentId": student_id, "finished": body.get("finished", {}),
            "errorRates": body.get("errorRates", {})})
        return {"student": student_id, "stored": True}

    # -- ambiguity votes -----------------------------------------------------------------

    @app.get("/ambiguity/open")
    async def open_ambiguities(request: Request):
        gated(request)
        with state.lock:
            out = []
            for slot in sorted(state.consensus.ledgers):
                led = state.consensus.ledgers[slot]
                if led.state != "ambiguityVote":
                    continue
                primary, secondary = state.consensus.top2(led)
                from .consensus import ambiguity_prompt
                out.append({
                    "id": slot,
                    "prompt": ambiguity_prompt(primary, secondary),
                    "primary": primary, "secondary": secondary,
                    "votes": dict(state.votes.get(slot, {"unequal": 0, "total": 0})),
                })
        return {"open": out}

    @app.post("/ambiguity/{slot}/vote")
    async def vote(slot: str, body: dict, request: Request):
        session = gated(request)
        require_role(session, *ANY_ROLE)
        result = state.execute("ambiguity_vote", {"slot": slot,
                                                  "vote": body.get("vote", "")})
        res = result["resolution"]
        return {
            "resolved": result["resolved"],
            "tally": result["tally"],
            "resolution": None if res is None else {
                "kind": res.kind, "primary": res.primary, "secondary": res.secondary,
                "aliasMap": res.alias_map,
            },
        }

    return app
