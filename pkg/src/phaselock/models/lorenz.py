"""Two linearly coupled Lorenz oscillators.

State layout: (x1, y1, z1, x2, y2, z2). Each oscillator obeys

    x' = 10*(y - x) + eps*(x_other - x)
    y' = (36.5 + gamma)*x - y - x*z
    z' = -3*z + x*y

where gamma detunes the effective Rayleigh number of each oscillator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .integrators import DivergenceError, IntegratorConfig, jitter_initial_state


@dataclass(frozen=True)
class LorenzParams:
    gamma1: float = 1.5
    gamma2: float = -1.5
    eps: float = 0.0

    def __post_init__(self):
        for g in (self.gamma1, self.gamma2):
            if 36.5 + g <= 1.0:
                raise ValueError("detuning leaves no off-origin fixed points")


def lorenz_derivs(state, params: LorenzParams) -> np.ndarray:
    """Right-hand side for the coupled pair at one state point."""
    x1, y1, z1, x2, y2, z2 = np.asarray(state, dtype=float)
    p = params
    return np.array([
        10.0 * (y1 - x1) + p.eps * (x2 - x1),
        (36.5 + p.gamma1) * x1 - y1 - x1 * z1,
        -3.0 * z1 + x1 * y1,
        10.0 * (y2 - x2) + p.eps * (x1 - x2),
        (36.5 + p.gamma2) * x2 - y2 - x2 * z2,
        -3.0 * z2 + x2 * y2,
    ])


@njit(cache=True)
def _rhs(s, d, r1, r2, eps):
    d[0] = 10.0 * (s[1] - s[0]) + eps * (s[3] - s[0])
    d[1] = r1 * s[0] - s[1] - s[0] * s[2]
    d[2] = -3.0 * s[2] + s[0] * s[1]
    d[3] = 10.0 * (s[4] - s[3]) + eps * (s[0] - s[3])
    d[4] = r2 * s[3] - s[4] - s[3] * s[5]
    d[5] = -3.0 * s[5] + s[3] * s[4]


@njit(cache=True)
def _integrate_kernel(y, r1, r2, eps, dt, n_steps, transient, stride, out):
    dim = 6
    k1 = np.empty(dim); k2 = np.empty(dim); k3 = np.empty(dim); k4 = np.empty(dim)
    tmp = np.empty(dim)
    n_rec = 0
    for step in range(n_steps):
        _rhs(y, k1, r1, r2, eps)
        for i in range(dim):
            tmp[i] = y[i] + 0.5 * dt * k1[i]
        _rhs(tmp, k2, r1, r2, eps)
        for i in range(dim):
            tmp[i] = y[i] + 0.5 * dt * k2[i]
        _rhs(tmp, k3, r1, r2, eps)
        for i in range(dim):
            tmp[i] = y[i] + dt * k3[i]
        _rhs(tmp, k4, r1, r2, eps)
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


DEFAULT_STATE = np.array([5.0, 8.0, 30.0, -6.0, -9.0, 32.0])


def lorenz_initial_state(seed=None) -> np.ndarray:
    """Documented default initial state with seeded 1e-3 relative jitter."""
    return jitter_initial_state(DEFAULT_STATE, seed)


def integrate_lorenz(params: LorenzParams, config: IntegratorConfig,
                     y0=None) -> np.ndarray:
    """RK4-integrate the pair; returns the strided post-transient states."""
    y = lorenz_initial_state(config.seed) if y0 is None else np.asarray(y0, dtype=float).copy()
    out = np.empty((config.n_recorded, 6))
    bad = _integrate_kernel(y, 36.5 + params.gamma1, 36.5 + params.gamma2, params.eps,
                            config.dt, config.n_steps, config.transient_steps,
                            config.record_stride, out)
    if bad >= 0:
        raise DivergenceError(bad)
    return out
