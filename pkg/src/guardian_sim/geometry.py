"""Planar geometry for the safe-zone protection game.

Everything lives in R^2. The safe zone and the zone of interest are
origin-centered disks; the defense margin measures how far from the origin
the attacker could still be intercepted, assuming both agents move at the
same unit speed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


class CoincidentAgentsError(ValueError):
    """Raised when a computation requires two distinct agent positions."""


@dataclass(frozen=True, slots=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite component in Vec2({self.x!r}, {self.y!r})")

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __neg__(self) -> Vec2:
        return Vec2(-self.x, -self.y)

    def __mul__(self, s: float) -> Vec2:
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> Vec2:
        return Vec2(self.x / s, self.y / s)

    def dot(self, other: Vec2) -> float:
        return self.x * other.x + self.y * other.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def norm_sq(self) -> float:
        return self.x * self.x + self.y * self.y

    def distance_to(self, other: Vec2) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def rotated(self, angle: float) -> Vec2:
        c, s = math.cos(angle), math.sin(angle)
        return Vec2(c * self.x - s * self.y, s * self.x + c * self.y)

    def angle(self) -> float:
        return math.atan2(self.y, self.x)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)

    @staticmethod
    def from_polar(radius: float, angle: float) -> Vec2:
        return Vec2(radius * math.cos(angle), radius * math.sin(angle))

    @staticmethod
    def zero() -> Vec2:
        return Vec2(0.0, 0.0)


ORIGIN = Vec2(0.0, 0.0)


@dataclass(frozen=True, slots=True)
class Zones:
    """Origin-centered arena disks: the zone of interest bounds play, the
    safe zone is what the defender protects."""

    r_interest: float = 50.0
    r_safe: float = 10.0

    def __post_init__(self) -> None:
        if not (0.0 < self.r_safe < self.r_interest):
            raise ValueError(
                f"need 0 < r_safe < r_interest, got {self.r_safe}, {self.r_interest}"
            )


def error_vector(xa: Vec2, xd: Vec2) -> Vec2:
    """Relative position of the attacker seen from the defender."""
    return xa - xd


def is_captured(xa: Vec2, xd: Vec2, tau: float) -> bool:
    """Capture fires when the agents are within tau of each other (inclusive)."""
    return xa.distance_to(xd) <= tau


def defense_margin(xa: Vec2, xd: Vec2) -> float:
    """Signed distance from the origin to the set of points the attacker can
    reach before the defender.

    Positive when the defender is closer to the origin than the attacker
    (then it equals the distance to the perpendicular bisector of the
    attacker-defender segment); negative or zero otherwise.
    """
    separation = xa.distance_to(xd)
    if separation == 0.0:
        raise CoincidentAgentsError("defense margin undefined for coincident agents")
    return (xa.norm_sq() - xd.norm_sq()) / (2.0 * separation)


def closest_safe_reachable_point(xa: Vec2, xd: Vec2) -> Vec2:
    """Closest point to the origin that the attacker can reach no later than
    the defender (both at unit speed).

    That set is the closed half-plane on the attacker's side of the
    perpendicular bisector of the segment xa-xd.  If the origin itself lies
    in the half-plane (||xa|| <= ||xd||) the answer is the origin; otherwise
    it is the foot of the perpendicular from the origin onto the bisector.
    """
    separation = xa.distance_to(xd)
    if separation == 0.0:
        raise CoincidentAgentsError(
            "safe reachable set undefined for coincident agents"
        )
    rho = (xa.norm_sq() - xd.norm_sq()) / (2.0 * separation)
    if rho <= 0.0:
        return ORIGIN
    direction = (xa - xd) / separation
    return direction * rho
