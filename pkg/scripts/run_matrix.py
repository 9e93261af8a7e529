#!/usr/bin/env python3
"""Win-rate matrix for every (defender, attacker) pairing.

Runs the common-random-numbers experiment twice — once per loss criterion
(attacker strictly inside the protected disk vs. defense margin falling to
the protected radius) — prints both tables, and writes a CSV + JSON report
per criterion under the output directory.
"""
from __future__ import annotations

import argparse
import time
from pathlib import Path

from guardian_sim.analysis import report_csv_text, report_json_text, run_experiment_matrix
from guardian_sim.engine import FailureCriterion, WorldConfig
from guardian_sim.fileio import write_text_atomic


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=4)
    ap.add_argument("--out", type=Path, default=Path("out/matrix"))
    args = ap.parse_args()

    for criterion in FailureCriterion:
        cfg = WorldConfig(failure_criterion=criterion)
        t0 = time.perf_counter()
        report = run_experiment_matrix(cfg, args.trials, args.seed, jobs=args.jobs)
        dt = time.perf_counter() - t0
        print(f"== {criterion.value} ({args.trials} trials, {dt:.1f} s) ==")
        print(report_csv_text(report))
        write_text_atomic(args.out / f"winrates_{criterion.value}.csv", report_csv_text(report))
        write_text_atomic(args.out / f"report_{criterion.value}.json", report_json_text(report))
    print(f"reports written to {args.out}/")


if __name__ == "__main__":
    main()
