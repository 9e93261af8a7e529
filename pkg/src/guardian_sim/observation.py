"""Distance-scaled Gaussian observation model.

The defender never sees the attacker exactly: it receives y = xa + w with
w ~ N(0, sigma^2 I2), where sigma^2 grows with the squared separation of the
agents.  `reliability` scores how trustworthy an observation is, from the
estimated (not true) separation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import Vec2
from .rng import Rng

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True, slots=True)
class NoiseParams:
    """sigma^2 = beta_b + beta_d * distance^2 + beta_v * (1 - nu).

    beta_b is a base floor, beta_d scales with squared separation, and
    beta_v * (1 - nu) penalises degraded visibility nu in [0, 1].
    Defaults keep only the distance term.
    """

    beta_b: float = 0.0
    beta_d: float = 0.05
    beta_v: float = 0.0
    nu: float = 1.0

    def __post_init__(self) -> None:
        if self.beta_b < 0.0 or self.beta_d < 0.0 or self.beta_v < 0.0:
            raise ValueError("noise coefficients must be non-negative")
        if not 0.0 <= self.nu <= 1.0:
            raise ValueError(f"visibility nu must lie in [0, 1], got {self.nu}")


def noise_variance(distance: float, params: NoiseParams) -> float:
    """Observation variance per axis at the given agent separation."""
    return params.beta_b + params.beta_d * distance * distance + params.beta_v * (1.0 - params.nu)


def observe(xa: Vec2, xd: Vec2, params: NoiseParams, rng: Rng) -> Vec2:
    """Noisy attacker position as seen by the defender at xd.

    Symmetric in the separation, so swapping the arguments gives the
    attacker's noisy view of the defender.
    """
    sigma = math.sqrt(noise_variance(xa.distance_to(xd), params))
    wx, wy = rng.normal_pair(sigma)
    return Vec2(xa.x + wx, xa.y + wy)


def reliability(y: Vec2, xd: Vec2, params: NoiseParams, k: float) -> float:
    """Probability-squared that a fresh observation error stays within a box
    of half-width k per axis, with the error scale estimated from ||y - xd||.

    Equals erf(k / (sigma_hat * sqrt(2)))^2; defined as 1 when sigma_hat = 0.
    Monotone: increasing in k, strictly decreasing in sigma_hat.
    """
    if k <= 0.0:
        raise ValueError(f"reliability half-width k must be positive, got {k}")
    variance = noise_variance(y.distance_to(xd), params)
    if variance == 0.0:
        return 1.0
    one_axis = math.erf(k / (math.sqrt(variance) * _SQRT2))
    return one_axis * one_axis
