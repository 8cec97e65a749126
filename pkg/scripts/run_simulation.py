#!/usr/bin/env python3
"""Sweep annotator accuracy and print a convergence table.

Usage: python3 scripts/run_simulation.py [--seed 42] [--slots 50]
"""

import argparse

from kgcf.simcrowd import AnnotatorProfile, SimConfig, simulate


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--slots", type=int, default=50)
    parser.add_argument("--two-truth", type=int, default=10)
    parser.add_argument("--submissions", type=int, default=120)
    args = parser.parse_args()

    print(f"{'p':>5} {'top1':>6} {'multi':>6} {'cycles':>7} {'resolved':>9}")
    for p10 in range(5, 11):
        p = p10 / 10
        report = simulate(SimConfig(
            population=100, slots=args.slots, submissions_per_slot=args.submissions,
            two_truth_slots=args.two_truth, rng_seed=args.seed,
            annotator=AnnotatorProfile(accuracy=p)))
        resolved = sum(s.resolved for s in report.slots)
        print(f"{p:>5.1f} {report.fraction_top1_correct:>6.2f} "
              f"{report.multi_answer_rate:>6.2f} "
              f"{report.mean_cycles_to_resolve:>7.2f} "
              f"{resolved:>6}/{args.slots}")


if __name__ == "__main__":
    main()
