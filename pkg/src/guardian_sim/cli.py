"""Command-line interface.

Subcommands:
  run     one episode -> trajectory CSV + summary JSON
  matrix  3x3 strategy/behavior win-rate experiment -> CSV table + JSON report
  check   invariant suites and stability diagnostics -> PASS/FAIL lines

Settings resolve flag > config file > environment (seed only) > defaults.
The config file is a flat JSON object using the same names as the flags.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .analysis import (
    report_csv_text,
    report_json_text,
    run_default_checks,
    run_experiment_matrix,
    stability_diagnostic,
)
from .engine import (
    FailureCriterion,
    InvalidInitializationError,
    Outcome,
    WorldConfig,
    run_episode,
    sample_initial_positions,
    summary_json_text,
    trajectory_csv_text,
)
from .fileio import fmt9, write_text_atomic
from .geometry import Vec2, Zones
from .observation import NoiseParams
from .rng import Rng, derive_seed
from .strategies import AttackerBehavior, DefenderStrategy

SEED_ENV_VAR = "GUARDIAN_SIM_SEED"

_DEFAULTS: dict = {
    "defender": "pp",
    "attacker": "linear",
    "trials": 1000,
    "seed": None,  # resolved to env var, then 0
    "jobs": 1,
    "out": ".",
    "format": "both",
    "beta": 0.05,
    "beta_b": 0.0,
    "beta_v": 0.0,
    "nu": 1.0,
    "k": 0.5,
    "tau": 2.0,
    "r_safe": 10.0,
    "r_interest": 50.0,
    "max_steps": 10_000,
    "failure_criterion": "position_breach",
    "xa": None,
    "xd": None,
}


class ConfigError(ValueError):
    pass


@dataclass(slots=True)
class RunConfig:
    world: WorldConfig
    defender: DefenderStrategy
    attacker: AttackerBehavior
    trials: int
    seed: int
    jobs: int
    output_dir: Path
    output_format: str
    xa: Vec2 | None
    xd: Vec2 | None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat JSON config file")
    common.add_argument("--seed", type=int, help=f"base seed (fallback: ${SEED_ENV_VAR}, then 0)")
    common.add_argument("--beta", type=float, help="distance-squared noise coefficient")
    common.add_argument("--k", type=float, help="reliability box half-width")
    common.add_argument("--tau", type=float, help="capture radius")
    common.add_argument("--r-safe", type=float, help="safe zone radius")
    common.add_argument("--r-interest", type=float, help="zone of interest radius")
    common.add_argument("--max-steps", type=int, help="step cap per episode")
    common.add_argument(
        "--failure-criterion",
        choices=[c.value for c in FailureCriterion],
        help="what counts as a defender loss",
    )
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--format", choices=["csv", "json", "both"], help="which files to write")

    parser = argparse.ArgumentParser(
        prog="guardian-sim",
        description="Safe-zone protection game simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", parents=[common], help="run a single episode")
    run_p.add_argument("--defender", choices=[s.value for s in DefenderStrategy])
    run_p.add_argument("--attacker", choices=[b.value for b in AttackerBehavior])
    run_p.add_argument("--xa", nargs=2, type=float, metavar=("X", "Y"), help="attacker start")
    run_p.add_argument("--xd", nargs=2, type=float, metavar=("X", "Y"), help="defender start")

    matrix_p = sub.add_parser(
        "matrix", parents=[common], help="run the 3x3 win-rate experiment"
    )
    matrix_p.add_argument("--trials", type=int, help="episodes per strategy pair")
    matrix_p.add_argument("--jobs", type=int, help="worker processes")

    check_p = sub.add_parser(
        "check", parents=[common], help="run invariant checks / stability diagnostics"
    )
    check_p.add_argument(
        "--stability", action="store_true", help="print a stability diagnostic instead"
    )
    check_p.add_argument("--e", nargs=2, type=float, metavar=("X", "Y"), help="error vector")
    check_p.add_argument("--ua", nargs=2, type=float, metavar=("X", "Y"), help="attacker control")
    check_p.add_argument("--samples", type=int, default=100_000, help="Monte Carlo sample count")
    return parser


def _load_config_file(path: Path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    unknown = sorted(set(data) - set(_DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    return data


def _parse_point(value, label: str) -> Vec2 | None:
    if value is None:
        return None
    if not (isinstance(value, (list, tuple)) and len(value) == 2):
        raise ConfigError(f"{label} must be a pair of numbers")
    try:
        return Vec2(float(value[0]), float(value[1]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{label} must be a pair of finite numbers: {exc}") from exc


def resolve_config(args: argparse.Namespace) -> RunConfig:
    settings = dict(_DEFAULTS)
    if args.config is not None:
        settings.update(_load_config_file(args.config))
    for key in _DEFAULTS:
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None:
            settings[key] = flag
    if settings["seed"] is None:
        env = os.environ.get(SEED_ENV_VAR)
        if env is not None:
            try:
                settings["seed"] = int(env)
            except ValueError as exc:
                raise ConfigError(f"${SEED_ENV_VAR} must be an integer, got {env!r}") from exc
        else:
            settings["seed"] = 0
    try:
        world = WorldConfig(
            zones=Zones(
                r_interest=float(settings["r_interest"]), r_safe=float(settings["r_safe"])
            ),
            tau=float(settings["tau"]),
            noise=NoiseParams(
                beta_b=float(settings["beta_b"]),
                beta_d=float(settings["beta"]),
                beta_v=float(settings["beta_v"]),
                nu=float(settings["nu"]),
            ),
            k=float(settings["k"]),
            max_steps=int(settings["max_steps"]),
            failure_criterion=FailureCriterion.from_name(str(settings["failure_criterion"])),
        )
        defender = DefenderStrategy.from_name(str(settings["defender"]))
        attacker = AttackerBehavior.from_name(str(settings["attacker"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    trials = int(settings["trials"])
    jobs = int(settings["jobs"])
    seed = int(settings["seed"])
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    if jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {jobs}")
    if seed < 0:
        raise ConfigError(f"seed must be non-negative, got {seed}")
    return RunConfig(
        world=world,
        defender=defender,
        attacker=attacker,
        trials=trials,
        seed=seed,
        jobs=jobs,
        output_dir=Path(settings["out"]),
        output_format=str(settings["format"]),
        xa=_parse_point(settings["xa"], "xa"),
        xd=_parse_point(settings["xd"], "xd"),
    )


def cmd_run(cfg: RunConfig) -> int:
    xa, xd = cfg.xa, cfg.xd
    if xa is None or xd is None:
        sampled_xa, sampled_xd = sample_initial_positions(
            Rng(derive_seed(cfg.seed, 0, 0)), min_separation=cfg.world.tau
        )
        xa = xa if xa is not None else sampled_xa
        xd = xd if xd is not None else sampled_xd
    result = run_episode(
        xa, xd, cfg.defender, cfg.attacker, cfg.world, derive_seed(cfg.seed, 0, 1)
    )
    if cfg.output_format in ("csv", "both"):
        write_text_atomic(cfg.output_dir / "trajectory.csv", trajectory_csv_text(result))
    if cfg.output_format in ("json", "both"):
        write_text_atomic(
            cfg.output_dir / "summary.json", summary_json_text(result, cfg.world, cfg.seed)
        )
    print(f"outcome={result.outcome.value} t={result.end_time}")
    return 0 if result.outcome in (Outcome.CAPTURED, Outcome.SURVIVED) else 1


def cmd_matrix(cfg: RunConfig) -> int:
    report = run_experiment_matrix(cfg.world, cfg.trials, cfg.seed, jobs=cfg.jobs)
    csv_text = report_csv_text(report)
    if cfg.output_format in ("csv", "both"):
        write_text_atomic(cfg.output_dir / "winrates.csv", csv_text)
    if cfg.output_format in ("json", "both"):
        write_text_atomic(cfg.output_dir / "report.json", report_json_text(report))
    print(csv_text, end="")
    return 0


def cmd_check(cfg: RunConfig, args: argparse.Namespace) -> int:
    if args.stability:
        e = _parse_point(args.e, "e")
        ua = _parse_point(args.ua, "ua")
        if e is None or ua is None:
            raise ConfigError("--stability requires --e X Y and --ua X Y")
        diag = stability_diagnostic(
            e, ua, cfg.world.noise, args.samples, Rng(derive_seed(cfg.seed, 3))
        )
        holds = "true" if diag.condition_holds else "false"
        print(
            f"lhs={fmt9(diag.lhs)} expected_cos={fmt9(diag.expected_cos)} "
            f"n={diag.n_samples} condition_holds={holds}"
        )
        return 0
    results = run_default_checks(seed=cfg.seed)
    for res in results:
        print(f"{'PASS' if res.passed else 'FAIL'} {res.name}: {res.detail}")
    return 0 if all(res.passed for res in results) else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "matrix":
            return cmd_matrix(cfg)
        return cmd_check(cfg, args)
    except (ConfigError, InvalidInitializationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
