"""Command-line entry point.

Subcommands: ``serve`` (HTTP service over an event log), ``import`` /
``export`` (graph files), ``simulate`` (annotator simulation, JSON report),
``recommend`` (per-student report). Exit codes: 0 ok, 1 runtime error,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import KgcfError
from .recommend import LearnerRecord, RecommendConfig, build_report
from .simcrowd import AnnotatorProfile, SimConfig, simulate
from .store import GraphStore, as_fraction

DEFAULT_DATA = "kgcf-events.log"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kgcf",
                                     description="crowdsourced knowledge-graph engine")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--data", default=DEFAULT_DATA, help="event-log file")
    serve.add_argument("--seed-demo", action="store_true",
                       help="load the demo graph into an empty state")

    imp = sub.add_parser("import", help="import a kgcf/1 graph file")
    imp.add_argument("file")
    imp.add_argument("--data", default=DEFAULT_DATA)

    exp = sub.add_parser("export", help="export the current graph to a kgcf/1 file")
    exp.add_argument("file")
    exp.add_argument("--data", default=DEFAULT_DATA)

    sim = sub.add_parser("simulate", help="run the annotator simulation")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--population", type=int, default=100)
    sim.add_argument("--accuracy", type=float, default=0.8)
    sim.add_argument("--slots", type=int, default=50)
    sim.add_argument("--submissions", type=int, default=120)
    sim.add_argument("--two-truth", type=int, default=0)
    sim.add_argument("--unequal-bias", type=float, default=0.9)
    sim.add_argument("--out", required=True)

    rec = sub.add_parser("recommend", help="emit a recommendation report")
    rec.add_argument("--student", required=True)
    rec.add_argument("--p", type=float, default=0.2)
    rec.add_argument("--graph", help="kgcf/1 graph file", required=True)
    rec.add_argument("--record", help="learner record JSON file")
    rec.add_argument("--out", help="write the report here instead of stdout")
    return parser


def _cmd_serve(args) -> int:
    import uvicorn

    from .seed import seed_demo
    from .service import AppState, create_app

    state = AppState.open(args.data)
    if args.seed_demo and not state.store.entities:
        state.execute("import_graph", {"text": seed_demo().dumps()})
    uvicorn.run(create_app(state), host=args.host, port=args.port)
    return 0


def _cmd_import(args) -> int:
    from .service import AppState

    with open(args.file, encoding="utf-8") as fh:
        text = fh.read()
    GraphStore.loads(text)  # validate before touching the log
    state = AppState.open(args.data)
    store = state.execute("import_graph", {"text": text})
    print(f"imported {len(store.entities)} entities, {len(store.triples)} triples "
          f"into {args.data}")
    return 0


def _cmd_export(args) -> int:
    from .service import AppState

    state = AppState.open(args.data)
    state.store.save(args.file)
    print(f"exported {len(state.store.entities)} entities, "
          f"{len(state.store.triples)} triples to {args.file}")
    return 0


def _cmd_simulate(args) -> int:
    config = SimConfig(
        population=args.population,
        slots=args.slots,
        submissions_per_slot=args.submissions,
        two_truth_slots=args.two_truth,
        rng_seed=args.seed,
        annotator=AnnotatorProfile(accuracy=args.accuracy,
                                   unequal_bias=args.unequal_bias),
    )
    report = simulate(config)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report.to_json())
    print(f"fractionTop1Correct={report.fraction_top1_correct} "
          f"multiAnswerRate={report.multi_answer_rate} "
          f"meanCyclesToResolve={report.mean_cycles_to_resolve}")
    return 0


def _cmd_recommend(args) -> int:
    from .service import report_json

    store = GraphStore.load(args.graph)
    record = LearnerRecord(student_id=args.student)
    if args.record:
        with open(args.record, encoding="utf-8") as fh:
            raw = json.load(fh)
        record = LearnerRecord(
            student_id=args.student,
            finished={c: {rt: set(ids) for rt, ids in buckets.items()}
                      for c, buckets in raw.get("finished", {}).items()},
            error_rates={e: as_fraction(v)
                         for e, v in raw.get("errorRates", {}).items()},
        )
    report = build_report(store, record, RecommendConfig(p=as_fraction(args.p)))
    text = json.dumps(report_json(report), sort_keys=True, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {
    "serve": _cmd_serve,
    "import": _cmd_import,
    "export": _cmd_export,
    "simulate": _cmd_simulate,
    "recommend": _cmd_recommend,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (KgcfError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"kgcf: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
