"""Defender guidance laws and attacker behaviors.

All controls are unit-speed direction vectors computed from the current
state; the engine applies them simultaneously.  Defenders only ever see the
noisy observation y, never the true attacker position.
"""
from __future__ import annotations

import enum

from .geometry import Vec2, closest_safe_reachable_point
from .observation import NoiseParams, observe, reliability
from .rng import Rng

# Control input: a displacement of norm <= 1 applied for one step.
ControlInput = Vec2

_ZERO = Vec2(0.0, 0.0)
_EPS_DIRECTION = 1e-12
_EPS_BLEND = 1e-9


class DefenderStrategy(enum.Enum):
    PURE_PURSUIT = "pp"
    DEFENSE_MARGIN = "dm"
    ADJUSTED_DEFENSE_MARGIN = "adm"

    @classmethod
    def from_name(cls, name: str) -> DefenderStrategy:
        try:
            return cls(name)
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown defender strategy {name!r} (valid: {valid})") from None


class AttackerBehavior(enum.Enum):
    LINEAR = "linear"
    SPIRAL = "spiral"
    INTELLIGENT = "intelligent"
    # Motionless stub, useful for tests and single runs; not part of the
    # standard 3x3 experiment matrix.
    STATIC = "static"

    @classmethod
    def from_name(cls, name: str) -> AttackerBehavior:
        try:
            return cls(name)
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown attacker behavior {name!r} (valid: {valid})") from None


MATRIX_ATTACKERS = (AttackerBehavior.LINEAR, AttackerBehavior.SPIRAL, AttackerBehavior.INTELLIGENT)
MATRIX_DEFENDERS = (
    DefenderStrategy.PURE_PURSUIT,
    DefenderStrategy.DEFENSE_MARGIN,
    DefenderStrategy.ADJUSTED_DEFENSE_MARGIN,
)


def _unit(v: Vec2, eps: float) -> Vec2:
    n = v.norm()
    if n < eps:
        return _ZERO
    return v / n


def pp_control(y: Vec2, xd: Vec2) -> ControlInput:
    """Pure pursuit: head straight at the observed attacker position."""
    return _unit(y - xd, _EPS_DIRECTION)


def dm_control(y: Vec2, xd: Vec2) -> ControlInput:
    """Defense-margin guidance: head for the point of the attacker's safe
    reachable set that is closest to the origin (computed from y)."""
    target = closest_safe_reachable_point(y, xd)
    return _unit(target - xd, _EPS_DIRECTION)


def adm_control(y: Vec2, xd: Vec2, params: NoiseParams, k: float) -> ControlInput:
    """Adjusted defense margin: reliability-weighted blend of pure pursuit
    and defense-margin guidance.

    With p = reliability(y, xd), steer along p * pp + (1 - p) * dm,
    renormalized.  Trusted observations (small estimated noise) make this
    pure pursuit; poor ones fall back to margin keeping.
    """
    p = reliability(y, xd, params, k)
    pp_dir = pp_control(y, xd)
    dm_dir = dm_control(y, xd)
    blend = pp_dir * p + dm_dir * (1.0 - p)
    if blend.norm() < _EPS_BLEND:
        return dm_dir
    return blend / blend.norm()


def linear_attacker(xa: Vec2) -> ControlInput:
    """Straight line toward the origin."""
    n = xa.norm()
    if n < _EPS_DIRECTION:
        raise ValueError("linear attacker undefined at the origin")
    return -xa / n


def spiral_attacker(xa: Vec2) -> ControlInput:
    """Clockwise inward spiral: unit step toward the point one unit closer in
    radius and 1/r earlier in angle."""
    r = xa.norm()
    if r <= 1.0:
        raise ValueError(f"spiral attacker needs radius > 1, got {r}")
    angle = xa.angle() - 1.0 / r
    target = Vec2.from_polar(r - 1.0, angle)
    return _unit(target - xa, _EPS_DIRECTION)


def intelligent_attacker(xa: Vec2, xd: Vec2, params: NoiseParams, rng: Rng) -> ControlInput:
    """Evade-while-attacking: blend of fleeing the (noisily) observed defender,
    weighted by inverse observed separation, and heading for the origin.

    The attacker observes the defender through the same distance-scaled noise
    the defender suffers, re-sampled fresh each step.
    """
    to_origin = linear_attacker(xa)
    observed_xd = observe(xd, xa, params, rng)
    away = xa - observed_xd
    dist = away.norm()
    if dist < _EPS_DIRECTION:
        return to_origin
    blend = away * (1.0 / (dist * dist)) + to_origin  # (1/dist) * unit(away) + 1 * unit(to_origin)
    if blend.norm() < _EPS_BLEND:
        return to_origin
    return blend / blend.norm()


def defender_control(
    strategy: DefenderStrategy, y: Vec2, xd: Vec2, params: NoiseParams, k: float
) -> ControlInput:
    if strategy is DefenderStrategy.PURE_PURSUIT:
        return pp_control(y, xd)
    if strategy is DefenderStrategy.DEFENSE_MARGIN:
        return dm_control(y, xd)
    return adm_control(y, xd, params, k)


def attacker_control(
    behavior: AttackerBehavior, xa: Vec2, xd: Vec2, params: NoiseParams, rng: Rng
) -> ControlInput:
    if behavior is AttackerBehavior.LINEAR:
        return linear_attacker(xa)
    if behavior is AttackerBehavior.SPIRAL:
        return spiral_attacker(xa)
    if behavior is AttackerBehavior.INTELLIGENT:
        return intelligent_attacker(xa, xd, params, rng)
    return _ZERO
