#!/usr/bin/env python3
"""Defense-margin traces under each defender strategy.

Replays the same randomized engagement (identical initial positions and
noise seed) once per defender strategy and writes each trajectory as CSV,
so the margin columns can be plotted against each other directly.
"""
from __future__ import annotations

import argparse
from pathlib import Path

from guardian_sim.analysis import trial_seeds
from guardian_sim.engine import WorldConfig, run_episode, sample_initial_positions, trajectory_csv_text
from guardian_sim.fileio import write_text_atomic
from guardian_sim.rng import Rng
from guardian_sim.strategies import AttackerBehavior, MATRIX_DEFENDERS


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--attacker", default="intelligent",
                    choices=[b.value for b in AttackerBehavior])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trial", type=int, default=0, help="trial index within the seed")
    ap.add_argument("--out", type=Path, default=Path("out/traces"))
    args = ap.parse_args()

    cfg = WorldConfig()
    attacker = AttackerBehavior.from_name(args.attacker)
    init_seed, episode_seed = trial_seeds(args.seed, args.trial)
    xa, xd = sample_initial_positions(Rng(init_seed), min_separation=cfg.tau)
    print(f"initial attacker=({xa.x:.3f}, {xa.y:.3f})  defender=({xd.x:.3f}, {xd.y:.3f})")

    for defender in MATRIX_DEFENDERS:
        result = run_episode(xa, xd, defender, attacker, cfg, episode_seed)
        path = args.out / f"{defender.value}_vs_{attacker.value}.csv"
        write_text_atomic(path, trajectory_csv_text(result))
        print(f"{defender.value:>4}: {result.outcome.value:<9} t={result.end_time:<6} -> {path}")


if __name__ == "__main__":
    main()
