#!/usr/bin/env python3
"""Record real service responses as JSON fixtures for the frontend tests.

Drives an in-process service over the demo graph and captures the exact
bodies the web client consumes, so the frontend contract tests pin the
true wire format.

Usage: python3 scripts/record_fixtures.py [frontend/fixtures]
"""

import json
import pathlib
import sys

from fastapi.testclient import TestClient

from kgcf.captcha import CaptchaConfig
from kgcf.consensus import Candidate
from kgcf.seed import seed_demo
from kgcf.service import AppState, ServiceConfig, create_app


def bearer(tok):
    return {"Authorization": f"Bearer {tok}"}


def unlocked(client, user_id, answer="yes"):
    body = client.post("/login", json={"userId": user_id}).json()
    tok = body["token"]
    if body["challenge"] is not None:
        client.post(f"/captcha/{body['challenge']['id']}/answer",
                    json={"answer": answer}, headers=bearer(tok))
    return tok


def record(out_dir: pathlib.Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    def save(name, payload):
        path = out_dir / f"{name}.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
        written.append(path.name)

    config = ServiceConfig(captcha=CaptchaConfig(p_fill_blank=0.0, rng_seed=11))
    state = AppState(config=config)
    client = TestClient(create_app(state))
    state.execute("import_graph", {"text": seed_demo().dumps()})
    by_label = {e.label: e.id for e in state.store.entities.values()}

    admin = client.post("/users", json={"role": "systemAdmin"}).json()
    save("user", admin)
    login = client.post("/login", json={"userId": admin["id"]}).json()
    save("login_confirmatory", login)
    tok = login["token"]
    outcome = client.post(f"/captcha/{login['challenge']['id']}/answer",
                          json={"answer": "yes"}, headers=bearer(tok)).json()
    save("captcha_outcome", outcome)

    # a fill-blank login for the other challenge shape
    state.config = ServiceConfig(captcha=CaptchaConfig(p_fill_blank=1.0, rng_seed=11))
    fb_user = client.post("/users", json={"role": "common"}).json()
    fb_login = client.post("/login", json={"userId": fb_user["id"]}).json()
    save("login_fillblank", fb_login)
    client.post(f"/captcha/{fb_login['challenge']['id']}/answer",
                json={"answer": "tang dynasty"}, headers=bearer(fb_login["token"]))
    state.config = config

    gadmin = client.post("/users", json={"role": "groupAdmin"}).json()
    gtok = unlocked(client, gadmin["id"])
    group = client.post("/groups", json={"topic": {"kind": "poem"}},
                        headers=bearer(gtok)).json()
    save("group", group)
    tasks = client.post("/tasks/allocate", json={"batch": 3},
                        headers=bearer(tok)).json()["tasks"]
    for task in tasks:
        client.post(f"/groups/{group['id']}/assign",
                    json={"taskId": task["id"], "memberId": gadmin["id"]},
                    headers=bearer(gtok))
    save("tasks", client.get("/tasks", headers=bearer(gtok)).json())

    save("graph", client.get("/graph", headers=bearer(tok)).json())
    save("subgraph_teacher",
         client.get("/subgraphs/teacherCourseType", headers=bearer(tok)).json())
    save("subgraph_knowledge",
         client.get("/subgraphs/knowledgeCourseType", headers=bearer(tok)).json())

    isd = by_label["instructional system design"]
    db = by_label["database curriculum"]
    save("route", client.get(f"/routes?from={isd}&to={db}",
                             headers=bearer(tok)).json())

    student = by_label["Xiao Ming"]
    ex_story = by_label["storyboard an intro lesson"]
    ex_er = by_label["draw an ER diagram"]
    ex_sql = by_label["write a join query"]
    client.put(f"/students/{student}/record", json={
        "finished": {isd: {"exercise": [ex_story]},
                     db: {"exercise": [ex_er]}},
        "errorRates": {ex_story: 0.125, ex_er: 0.5, ex_sql: 0.1},
    }, headers=bearer(tok))
    save("recommendations_p20",
         client.get(f"/students/{student}/recommendations?p=0.2",
                    headers=bearer(tok)).json())
    save("recommendations_p30",
         client.get(f"/students/{student}/recommendations?p=0.3",
                    headers=bearer(tok)).json())

    # an open ambiguity vote over the moon "conveys" slot
    moon_triple = next(t for t in state.store.triples.values()
                       if t.object_is_literal and t.object.text == "homesickness")
    slot = f"{moon_triple.id}:object"
    ledger = state.consensus.open_ledger(slot)
    ledger.candidates["homesickness"] = Candidate(count=6, score=state.consensus.config.s0)
    ledger.candidates["helplessness"] = Candidate(count=5, score=state.consensus.config.s0)
    ledger.state = "ambiguityVote"
    save("ambiguity_open", client.get("/ambiguity/open", headers=bearer(tok)).json())
    common = client.post("/users", json={"role": "common"}).json()
    ctok = unlocked(client, common["id"])
    save("error_403", client.delete(f"/groups/{group['id']}",
                                    headers=bearer(ctok)).json())

    print(f"wrote {len(written)} fixtures to {out_dir}")


if __name__ == "__main__":
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "frontend/fixtures")
    record(out)
