"""Simulation determinism, convergence, and the CLI surface."""

import json

import pytest

from kgcf import errors
from kgcf.cli import main
from kgcf.simcrowd import AnnotatorProfile, SimConfig, build_ground_truth, simulate


def config_at(p, seed=42, slots=50, two_truth=0, q=0.9, submissions=120, population=100):
    return SimConfig(population=population, slots=slots, submissions_per_slot=submissions,
                     two_truth_slots=two_truth, rng_seed=seed,
                     annotator=AnnotatorProfile(accuracy=p, unequal_bias=q))


def test_perfect_annotators_always_correct():
    report = simulate(config_at(1.0, seed=3, slots=20))
    assert report.fraction_top1_correct == 1.0
    assert all(s.resolved and s.correct_top1 for s in report.slots)


def test_golden_numbers_seed42():
    # pinned from the first run of this configuration
    report = simulate(config_at(0.8))
    assert report.fraction_top1_correct == 1.0
    assert report.multi_answer_rate == 0.0
    assert report.mean_cycles_to_resolve == pytest.approx(2.34)
    assert sum(s.resolved for s in report.slots) == 50


def test_two_truth_slots_resolve_multi():
    report = simulate(config_at(0.8, slots=30, two_truth=30, q=0.9))
    assert report.multi_answer_rate >= 0.8
    assert report.fraction_top1_correct >= 0.95


def test_p1_q1_exact_kinds():
    report = simulate(config_at(1.0, seed=7, slots=20, two_truth=10, q=1.0))
    kinds = {s.slot_id: s.kind for s in report.slots}
    for s in report.slots:
        assert s.correct_top1
        expected = "multi" if len(s.truths) == 2 else "single"
        assert kinds[s.slot_id] == expected


def test_monotone_in_accuracy():
    fractions = [simulate(config_at(p)).fraction_top1_correct
                 for p in (0.5, 0.6, 0.7, 0.8, 0.9, 1.0)]
    assert all(b >= a for a, b in zip(fractions, fractions[1:]))
    assert fractions[-1] == 1.0


def test_identical_seed_identical_report():
    a = simulate(config_at(0.8)).to_json()
    b = simulate(config_at(0.8)).to_json()
    assert a == b


def test_different_seed_may_differ_but_valid():
    report = simulate(config_at(0.7, seed=9, slots=10))
    assert 0 <= report.fraction_top1_correct <= 1
    assert 0 <= report.multi_answer_rate <= 1


def test_invalid_config_rejected():
    with pytest.raises(errors.InvalidConfig):
        SimConfig(population=0)
    with pytest.raises(errors.InvalidConfig):
        SimConfig(slots=5, two_truth_slots=9)
    with pytest.raises(errors.InvalidConfig):
        AnnotatorProfile(accuracy=1.5)


def test_ground_truth_shape():
    gt = build_ground_truth(config_at(0.8, slots=4, two_truth=1))
    assert len(gt.slots) == 4
    assert len(gt.slots[0].truths) == 2
    assert all(len(s.distractors) == 5 for s in gt.slots)


# -- CLI ----------------------------------------------------------------------------

def test_cli_simulate_deterministic(tmp_path):
    out1 = tmp_path / "r1.json"
    out2 = tmp_path / "r2.json"
    argv = ["simulate", "--seed", "1", "--population", "20", "--accuracy", "0.8",
            "--slots", "5", "--submissions", "120"]
    assert main(argv + ["--out", str(out1)]) == 0
    assert main(argv + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    payload = json.loads(out1.read_text())
    assert set(payload) == {"fractionTop1Correct", "multiAnswerRate",
                            "meanCyclesToResolve", "slots"}


def test_cli_import_missing_file(tmp_path, capsys):
    rc = main(["import", str(tmp_path / "missing.kgcf"),
               "--data", str(tmp_path / "events.log")])
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_cli_usage_error_exits_2():
    with pytest.raises(SystemExit) as ei:
        main(["simulate"])  # missing required --out
    assert ei.value.code == 2


def test_cli_import_export_round_trip(tmp_path):
    from kgcf.seed import seed_demo

    graph_file = tmp_path / "demo.kgcf"
    seed_demo().save(graph_file)
    data = tmp_path / "events.log"
    assert main(["import", str(graph_file), "--data", str(data)]) == 0
    out_file = tmp_path / "out.kgcf"
    assert main(["export", str(out_file), "--data", str(data)]) == 0
    assert out_file.read_text() == graph_file.read_text()


def test_cli_recommend_honors_threshold(tmp_path):
    from kgcf import schema
    from kgcf.store import GraphStore

    store = GraphStore()
    student = store.add_entity("student", "S")
    course = store.add_entity("course", "db")
    exercises = []
    for i in range(4):
        ex = store.add_entity("exercise", f"ex{i}")
        store.add_triple(ex.id, schema.PRED_RESOURCE_OF, course.id, source="import")
        exercises.append(ex)
    graph_file = tmp_path / "g.kgcf"
    store.save(graph_file)
    record_file = tmp_path / "r.json"
    # R = 1/2 so LS = 2E: 0.25 stays, 0.15 is cut at P=0.2
    record_file.write_text(json.dumps({
        "finished": {course.id: {"exercise": [exercises[0].id, exercises[1].id]}},
        "errorRates": {exercises[0].id: 0.125, exercises[1].id: 0.075},
    }))
    out = tmp_path / "report.json"
    rc = main(["recommend", "--student", student.id, "--p", "0.2",
               "--graph", str(graph_file), "--record", str(record_file),
               "--out", str(out)])
    assert rc == 0
    report = json.loads(out.read_text())
    assert [it["exercise"] for it in report["past"]] == [exercises[0].id]
    assert report["past"][0]["ls"] == 0.25
    assert report["p"] == 0.2
