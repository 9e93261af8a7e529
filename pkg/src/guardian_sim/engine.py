"""Episode engine: simultaneous-move game loop, termination rules, exports.

Per step, from the state at time t: the defender draws its noisy observation
y_t, both agents pick controls from time-t information, and both moves apply
at once.  Termination is checked after the move — capture first (ties go to
the defender), then the configured failure criterion, then the step cap
(surviving the cap counts as a defender win).
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from .fileio import fmt9, json_text, round9, write_text_atomic
from .geometry import Vec2, Zones, defense_margin, is_captured
from .observation import NoiseParams, observe, reliability
from .rng import Rng
from .strategies import AttackerBehavior, DefenderStrategy, attacker_control, defender_control

log = logging.getLogger(__name__)

# Initial-condition distributions: radii uniform over these ranges, angles
# uniform over [-pi, pi).
DEFENDER_RADIUS_RANGE = (0.0, 20.0)
ATTACKER_RADIUS_RANGE = (45.0, 50.0)
_MAX_INIT_REDRAWS = 1000


class InvalidInitializationError(ValueError):
    """Initial positions violate the episode preconditions."""


class EpisodeTerminatedError(RuntimeError):
    """step() was called on an already-terminated episode."""


class FailureCriterion(enum.Enum):
    POSITION_BREACH = "position_breach"  # attacker entered the safe zone
    MARGIN_BREACH = "margin_breach"      # defense margin fell to the safe radius

    @classmethod
    def from_name(cls, name: str) -> FailureCriterion:
        try:
            return cls(name)
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown failure criterion {name!r} (valid: {valid})") from None


class Outcome(enum.Enum):
    CAPTURED = "Captured"
    BREACHED = "Breached"
    SURVIVED = "Survived"


@dataclass(frozen=True, slots=True)
class WorldConfig:
    zones: Zones = field(default_factory=Zones)
    tau: float = 2.0
    noise: NoiseParams = field(default_factory=NoiseParams)
    k: float = 0.5
    max_steps: int = 10_000
    failure_criterion: FailureCriterion = FailureCriterion.POSITION_BREACH

    def __post_init__(self) -> None:
        if self.tau <= 0.0:
            raise ValueError(f"capture radius tau must be positive, got {self.tau}")
        if self.k <= 0.0:
            raise ValueError(f"reliability half-width k must be positive, got {self.k}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {self.max_steps}")

    def to_flat_dict(self) -> dict:
        return {
            "r_interest": round9(self.zones.r_interest),
            "r_safe": round9(self.zones.r_safe),
            "tau": round9(self.tau),
            "beta": round9(self.noise.beta_d),
            "beta_b": round9(self.noise.beta_b),
            "beta_v": round9(self.noise.beta_v),
            "nu": round9(self.noise.nu),
            "k": round9(self.k),
            "max_steps": self.max_steps,
            "failure_criterion": self.failure_criterion.value,
        }


@dataclass(slots=True)
class EpisodeState:
    t: int
    xa: Vec2
    xd: Vec2
    rng: Rng


@dataclass(frozen=True, slots=True)
class StepRecord:
    """State at time t plus the observation drawn at time t.

    The terminal row of a trajectory has no observation (none is drawn after
    termination), and no margin in the corner case where capture lands the
    agents exactly on top of each other.
    """

    t: int
    xa: Vec2
    xd: Vec2
    y: Vec2 | None
    margin: float | None
    reliability: float | None


@dataclass(slots=True)
class EpisodeResult:
    outcome: Outcome
    end_time: int
    trajectory: list[StepRecord]
    seed: int


def episode_outcome(t: int, xa: Vec2, xd: Vec2, cfg: WorldConfig) -> Outcome | None:
    """Termination state at time t, or None if the episode is still live.

    Position breach means strictly inside the safe zone: an attacker sitting
    exactly on the boundary circle has not entered it (a static attacker
    placed there must still be run down and captured).  The margin criterion
    fires as soon as the margin falls *to* the safe radius, inclusively.
    """
    if is_captured(xa, xd, cfg.tau):
        return Outcome.CAPTURED
    if cfg.failure_criterion is FailureCriterion.POSITION_BREACH:
        if xa.norm() < cfg.zones.r_safe:
            return Outcome.BREACHED
    else:
        if defense_margin(xa, xd) <= cfg.zones.r_safe:
            return Outcome.BREACHED
    if t >= cfg.max_steps:
        return Outcome.SURVIVED
    return None


def step(
    state: EpisodeState,
    defender: DefenderStrategy,
    attacker: AttackerBehavior,
    cfg: WorldConfig,
) -> tuple[EpisodeState, StepRecord]:
    """Advance one simultaneous move; returns the new state and the record
    for the pre-move time.

    RNG order is fixed: the defender's observation draws first, then any
    attacker-side noise.
    """
    if episode_outcome(state.t, state.xa, state.xd, cfg) is not None:
        raise EpisodeTerminatedError(f"episode already terminated at t={state.t}")
    xa, xd, rng = state.xa, state.xd, state.rng
    y = observe(xa, xd, cfg.noise, rng)
    ud = defender_control(defender, y, xd, cfg.noise, cfg.k)
    ua = attacker_control(attacker, xa, xd, cfg.noise, rng)
    record = StepRecord(
        t=state.t,
        xa=xa,
        xd=xd,
        y=y,
        margin=defense_margin(xa, xd),
        reliability=reliability(y, xd, cfg.noise, cfg.k),
    )
    new_state = EpisodeState(t=state.t + 1, xa=xa + ua, xd=xd + ud, rng=rng)
    return new_state, record


def _validate_init(init_xa: Vec2, init_xd: Vec2, cfg: WorldConfig) -> None:
    r = cfg.zones.r_interest
    if init_xa.norm() > r or init_xd.norm() > r:
        raise InvalidInitializationError(
            f"initial positions must lie inside the zone of interest (radius {r})"
        )
    if init_xa.norm() < cfg.zones.r_safe:
        raise InvalidInitializationError("attacker may not start inside the safe zone")
    if init_xa.distance_to(init_xd) <= cfg.tau:
        raise InvalidInitializationError(
            f"initial separation must exceed the capture radius tau={cfg.tau}"
        )


def _terminal_record(state: EpisodeState) -> StepRecord:
    if state.xa.distance_to(state.xd) == 0.0:
        margin: float | None = None  # coincident capture: margin undefined
    else:
        margin = defense_margin(state.xa, state.xd)
    return StepRecord(t=state.t, xa=state.xa, xd=state.xd, y=None, margin=margin, reliability=None)


def run_episode(
    init_xa: Vec2,
    init_xd: Vec2,
    defender: DefenderStrategy,
    attacker: AttackerBehavior,
    cfg: WorldConfig,
    seed: int,
) -> EpisodeResult:
    """Play one episode to termination from fixed initial positions.

    Fully deterministic in (arguments, seed): the trajectory, outcome and end
    time come out bitwise identical on every run.
    """
    _validate_init(init_xa, init_xd, cfg)
    state = EpisodeState(t=0, xa=init_xa, xd=init_xd, rng=Rng(seed))
    records: list[StepRecord] = []
    outcome = episode_outcome(state.t, state.xa, state.xd, cfg)
    while outcome is None:
        state, record = step(state, defender, attacker, cfg)
        records.append(record)
        outcome = episode_outcome(state.t, state.xa, state.xd, cfg)
    records.append(_terminal_record(state))
    return EpisodeResult(outcome=outcome, end_time=state.t, trajectory=records, seed=seed)


def sample_initial_positions(rng: Rng, min_separation: float = 0.0) -> tuple[Vec2, Vec2]:
    """Random initial (attacker, defender) positions.

    Draw order is fixed for reproducibility: defender radius, defender angle,
    attacker radius, attacker angle.  Draws with separation <= min_separation
    are rejected and redrawn.
    """
    for attempt in range(_MAX_INIT_REDRAWS):
        xd = Vec2.from_polar(
            rng.uniform(*DEFENDER_RADIUS_RANGE), rng.uniform(-math.pi, math.pi)
        )
        xa = Vec2.from_polar(
            rng.uniform(*ATTACKER_RADIUS_RANGE), rng.uniform(-math.pi, math.pi)
        )
        if xa.distance_to(xd) > min_separation:
            if attempt:
                log.debug("initial positions redrawn %d time(s)", attempt)
            return xa, xd
    raise InvalidInitializationError(
        f"could not draw initial positions separated by more than {min_separation}"
    )


TRAJECTORY_HEADER = "t,xa_x,xa_y,xd_x,xd_y,y_x,y_y,margin,reliability"


def trajectory_csv_text(result: EpisodeResult) -> str:
    lines = [TRAJECTORY_HEADER]
    for rec in result.trajectory:
        y_x = fmt9(rec.y.x) if rec.y is not None else ""
        y_y = fmt9(rec.y.y) if rec.y is not None else ""
        margin = fmt9(rec.margin) if rec.margin is not None else ""
        rel = fmt9(rec.reliability) if rec.reliability is not None else ""
        lines.append(
            f"{rec.t},{fmt9(rec.xa.x)},{fmt9(rec.xa.y)},{fmt9(rec.xd.x)},{fmt9(rec.xd.y)},"
            f"{y_x},{y_y},{margin},{rel}"
        )
    return "\n".join(lines) + "\n"


def summary_json_text(result: EpisodeResult, cfg: WorldConfig, seed: int) -> str:
    payload = {
        "outcome": result.outcome.value,
        "end_time": result.end_time,
        "seed": seed,
        "config": cfg.to_flat_dict(),
    }
    return json_text(payload)


def write_trajectory_csv(result: EpisodeResult, path: Path) -> None:
    write_text_atomic(path, trajectory_csv_text(result))


def write_summary_json(result: EpisodeResult, cfg: WorldConfig, seed: int, path: Path) -> None:
    write_text_atomic(path, summary_json_text(result, cfg, seed))
