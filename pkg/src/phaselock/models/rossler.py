"""Two linearly coupled Rossler oscillators.

State layout: (x1, y1, z1, x2, y2, z2). Each oscillator obeys

    x' = -omega*y - z + eps*(x_other - x)
    y' = omega*x + 0.15*y
    z' = 0.2 + z*(x - 10)

with eps1 = 0 giving a unidirectional drive of oscillator 2 by
oscillator 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .integrators import DivergenceError, IntegratorConfig, jitter_initial_state


@dataclass(frozen=True)
class RosslerParams:
    omega1: float
    omega2: float
    eps1: float = 0.0
    eps2: float = 0.0

    def __post_init__(self):
        if self.omega1 <= 0 or self.omega2 <= 0:
            raise ValueError("natural frequencies must be positive")
        if self.eps1 < 0 or self.eps2 < 0:
            raise ValueError("coupling strengths must be non-negative")

    @classmethod
    def bidirectional(cls, eps, omega1=1.015, omega2=0.985):
        return cls(omega1=omega1, omega2=omega2, eps1=eps, eps2=eps)

    @classmethod
    def unidirectional(cls, eps, omega1, omega2):
        return cls(omega1=omega1, omega2=omega2, eps1=0.0, eps2=eps)


def rossler_derivs(state, params: RosslerParams) -> np.ndarray:
    """Right-hand side for the coupled pair at one state point."""
    x1, y1, z1, x2, y2, z2 = np.asarray(state, dtype=float)
    p = params
    return np.array([
        -p.omega1 * y1 - z1 + p.eps1 * (x2 - x1),
        p.omega1 * x1 + 0.15 * y1,
        0.2 + z1 * (x1 - 10.0),
        -p.omega2 * y2 - z2 + p.eps2 * (x1 - x2),
        p.omega2 * x2 + 0.15 * y2,
        0.2 + z2 * (x2 - 10.0),
    ])


@njit(cache=True)
def _rhs(s, d, omega1, omega2, eps1, eps2):
    d[0] = -omega1 * s[1] - s[2] + eps1 * (s[3] - s[0])
    d[1] = omega1 * s[0] + 0.15 * s[1]
    d[2] = 0.2 + s[2] * (s[0] - 10.0)
    d[3] = -omega2 * s[4] - s[5] + eps2 * (s[0] - s[3])
    d[4] = omega2 * s[3] + 0.15 * s[4]
    d[5] = 0.2 + s[5] * (s[3] - 10.0)


@njit(cache=True)
def _integrate_kernel(y, omega1, omega2, eps1, eps2, dt, n_steps, transient, stride, out):
    dim = 6
    k1 = np.empty(dim); k2 = np.empty(dim); k3 = np.empty(dim); k4 = np.empty(dim)
    tmp = np.empty(dim)
    n_rec = 0
    for step in range(n_steps):
        _rhs(y, k1, omega1, omega2, eps1, eps2)
        for i in range(dim):
            tmp[i] = y[i] + 0.5 * dt * k1[i]
        _rhs(tmp, k2, omega1, omega2, eps1, eps2)
        for i in range(dim):
            tmp[i] = y[i] + 0.5 * dt * k2[i]
        _rhs(tmp, k3, omega1, omega2, eps1, eps2)
        for i in range(dim):
            tmp[i] = y[i] + dt * k3[i]
        _rhs(tmp, k4, omega1, omega2, eps1, eps2)
        for i in range(dim):
            y[i] = y[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            if not np.isfinite(y[i]):
                return step
        k = step - transient
        if k >= 0 and k % stride == 0 and n_rec < out.shape[0]:
            for i in range(dim):
                out[n_rec, i] = y[i]
            n_rec += 1
    return -1


DEFAULT_STATE = np.array([0.1, -5.0, 0.1, -0.1, 5.0, 0.1])


def rossler_initial_state(seed=None) -> np.ndarray:
    """Documented default initial state with seeded 1e-3 relative jitter."""
    return jitter_initial_state(DEFAULT_STATE, seed)


def integrate_rossler(params: RosslerParams, config: IntegratorConfig,
                      y0=None) -> np.ndarray:
    """RK4-integrate the pair; returns the strided post-transient states."""
    y = rossler_initial_state(config.seed) if y0 is None else np.asarray(y0, dtype=float).copy()
    out = np.empty((config.n_recorded, 6))
    bad = _integrate_kernel(y, params.omega1, params.omega2, params.eps1, params.eps2,
                            config.dt, config.n_steps, config.transient_steps,
                            config.record_stride, out)
    if bad >= 0:
        raise DivergenceError(bad)
    return out
