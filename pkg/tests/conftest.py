"""Shared test configuration: hypothesis profile and common strategies."""
from __future__ import annotations

import math

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from guardian_sim.geometry import Vec2

settings.register_profile(
    "default",
    deadline=None,  # numeric sweeps have noisy per-example timing
    max_examples=100,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def finite_coord(bound: float = 100.0) -> st.SearchStrategy[float]:
    return st.floats(
        min_value=-bound, max_value=bound, allow_nan=False, allow_infinity=False
    )


@st.composite
def vec2s(draw, bound: float = 100.0) -> Vec2:
    return Vec2(draw(finite_coord(bound)), draw(finite_coord(bound)))


@st.composite
def separated_pairs(draw, min_separation: float = 1e-3) -> tuple[Vec2, Vec2]:
    """(xa, xd) pairs with a guaranteed minimum separation."""
    xa = draw(vec2s(50.0))
    xd = draw(vec2s(50.0))
    if xa.distance_to(xd) <= min_separation:
        xd = xd + Vec2(min_separation + 1.0, 0.0)
    return xa, xd


@st.composite
def outer_inner_pairs(draw, min_gap: float = 1e-6) -> tuple[Vec2, Vec2]:
    """(xa, xd) with ||xa|| strictly greater than ||xd||, both off-origin."""
    r_a = draw(st.floats(min_value=2.0, max_value=50.0))
    r_d_frac = draw(st.floats(min_value=0.0, max_value=0.95))
    phi_a = draw(st.floats(min_value=-math.pi, max_value=math.pi))
    phi_d = draw(st.floats(min_value=-math.pi, max_value=math.pi))
    xa = Vec2.from_polar(r_a, phi_a)
    xd = Vec2.from_polar(max(r_a * r_d_frac - min_gap, 0.0), phi_d)
    return xa, xd


angles = st.floats(min_value=-math.pi, max_value=math.pi)
