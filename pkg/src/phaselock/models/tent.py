"""Linearly coupled skew tent maps.

The single map is f(a, x) = x/a on [0, a] and (1-x)/(1-a) on (a, 1].
Two copies with variables x and y are coupled through a convex mix of the
mapped values; the difference theta = y - x plays the role of a phase
difference. ``tent_f`` and ``coupled_tent_step`` deliberately use plain
Python arithmetic so they work on floats and on ``fractions.Fraction``
alike — the exact periodic orbits of the marginally stable case are only
periodic in exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit


@dataclass(frozen=True)
class TentParams:
    """Skew parameter a in (0, 1) and coupling strength eps in [0, 1/2)."""

    a: float
    eps: float

    def __post_init__(self):
        if not 0 < self.a < 1:
            raise ValueError(f"skew parameter must be in (0, 1), got {self.a}")
        if not 0 <= self.eps < 0.5:
            raise ValueError(f"coupling must be in [0, 0.5), got {self.eps}")


@dataclass(frozen=True)
class CoupledMapState:
    x: float
    y: float


def tent_f(a, x):
    """Skew tent map value. Accepts float or Fraction arguments."""
    if x < 0 or x > 1:
        raise ValueError(f"tent map argument must be in [0, 1], got {x}")
    if x <= a:
        return x / a
    return (1 - x) / (1 - a)


def coupled_tent_step(state: CoupledMapState, params: TentParams) -> CoupledMapState:
    """One iteration of the coupled pair.

    x' = (1-eps) f(a, x) + eps f(a, y)
    y' = eps f(a, x) + (1-eps) f(a, y)

    Exact types propagate: Fraction in, Fraction out.
    """
    a, eps = params.a, params.eps
    fx = tent_f(a, state.x)
    fy = tent_f(a, state.y)
    return CoupledMapState(
        x=(1 - eps) * fx + eps * fy,
        y=eps * fx + (1 - eps) * fy,
    )


@njit(cache=True)
def _iterate_kernel(x, y, a, eps, n_steps, transient, theta_out, xy_out, keep_xy):
    one_m_eps = 1.0 - eps
    for t in range(n_steps):
        fx = x / a if x <= a else (1.0 - x) / (1.0 - a)
        fy = y / a if y <= a else (1.0 - y) / (1.0 - a)
        x = one_m_eps * fx + eps * fy
        y = eps * fx + one_m_eps * fy
        k = t - transient
        if k >= 0:
            theta_out[k] = y - x
            if keep_xy:
                xy_out[k, 0] = x
                xy_out[k, 1] = y
    return x, y


def iterate_coupled_tent(params: TentParams, x0: float, y0: float,
                         n_steps: int, transient: int = 0,
                         keep_xy: bool = False):
    """Iterate the coupled maps and return the theta = y - x series.

    Discards the first ``transient`` iterations. With ``keep_xy`` the
    (x, y) orbit after the transient is returned as well.
    """
    if transient >= n_steps:
        raise ValueError("transient must be smaller than n_steps")
    if not (0 <= x0 <= 1 and 0 <= y0 <= 1):
        raise ValueError("initial state must lie in the unit square")
    n_keep = n_steps - transient
    theta = np.empty(n_keep)
    xy = np.empty((n_keep, 2)) if keep_xy else np.empty((1, 2))
    _iterate_kernel(float(x0), float(y0), params.a, params.eps,
                    n_steps, transient, theta, xy, keep_xy)
    if keep_xy:
        return theta, xy
    return theta
