"""Two mutually coupled conductance-based neurons.

Single-compartment Hodgkin-Huxley kinetics with leak, sodium and
potassium currents, an inhibitory synapse in each direction, a constant
drive, and optional independent Gaussian white noise on each membrane
voltage. State layout per cell: (v, m, h, n, s); the full state is the
concatenation for cells 1 and 2.

The gating rates alpha_n and alpha_m have removable singularities at
v = -55 and v = -40; those are evaluated by series expansion when the
argument is small so grid-aligned voltages cannot produce 0/0.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numba import njit

from .integrators import DivergenceError, IntegratorConfig, RK4

# Euler overshoot beyond this margin on a gating variable aborts the run.
_GATING_TOL = 1e-3


@dataclass(frozen=True)
class HHParams:
    cm: float = 1.0
    g_na: float = 120.0
    e_na: float = 50.0
    g_k: float = 36.0
    e_k: float = -77.0
    g_l: float = 0.3
    e_l: float = -54.4
    v_syn: float = -85.0
    i0: float = 10.0
    phi: float = 0.35
    theta_v: float = 0.0
    sigma_s: float = 5.0
    alpha_syn: float = 2.0
    beta_syn: float = 0.05
    gsyn1: float = 0.1
    gsyn2: float = 0.1
    noise_std: float = 2.12

    def __post_init__(self):
        if self.cm <= 0:
            raise ValueError("membrane capacitance must be positive")
        for g in (self.g_na, self.g_k, self.g_l, self.gsyn1, self.gsyn2):
            if g < 0:
                raise ValueError("conductances must be non-negative")

    def noiseless(self) -> "HHParams":
        return replace(self, noise_std=0.0)


# Series guard half-width for x/(1 - exp(-x/10)) around x = 0.
_SING_EPS = 1e-4


@njit(cache=True, inline="always")
def _ramp(x):
    # x / (1 - exp(-x/10)); the removable singularity is filled in by the
    # series 10*(1 + u/2 + u^2/12), u = x/10.
    if abs(x) < _SING_EPS:
        u = x / 10.0
        return 10.0 * (1.0 + 0.5 * u + u * u / 12.0)
    return x / (1.0 - np.exp(-x / 10.0))


@njit(cache=True, inline="always")
def _alpha_n(v):
    return 0.01 * _ramp(v + 55.0)


@njit(cache=True, inline="always")
def _beta_n(v):
    return 0.125 * np.exp(-(v + 65.0) / 80.0)


@njit(cache=True, inline="always")
def _alpha_m(v):
    return 0.1 * _ramp(v + 40.0)


@njit(cache=True, inline="always")
def _beta_m(v):
    return 4.0 * np.exp(-(v + 65.0) / 18.0)


@njit(cache=True, inline="always")
def _alpha_h(v):
    return 0.07 * np.exp(-(v + 65.0) / 20.0)


@njit(cache=True, inline="always")
def _beta_h(v):
    return 1.0 / (1.0 + np.exp(-(v + 35.0) / 10.0))


def gating_rates(v: float) -> dict:
    """alpha/beta for m, h, n at a membrane voltage (mV), rates in 1/ms."""
    return {
        "alpha_m": _alpha_m(v), "beta_m": _beta_m(v),
        "alpha_h": _alpha_h(v), "beta_h": _beta_h(v),
        "alpha_n": _alpha_n(v), "beta_n": _beta_n(v),
    }


def h_inf(x: float, sigma_s: float = 5.0) -> float:
    """Sigmoidal synaptic activation function 1 / (1 + exp(-x/sigma))."""
    return 1.0 / (1.0 + np.exp(-x / sigma_s))


@njit(cache=True)
def _hh_rhs(s, d, cm, g_na, e_na, g_k, e_k, g_l, e_l, v_syn, i0, phi,
            theta_v, sigma_s, a_syn, b_syn, gsyn1, gsyn2, w1, w2):
    # cell 1 sees the synaptic variable of cell 2 (s[9]) and vice versa
    for cell in range(2):
        o = 5 * cell
        v = s[o]; m = s[o + 1]; h = s[o + 2]; n = s[o + 3]
        s_other = s[9] if cell == 0 else s[4]
        gsyn = gsyn1 if cell == 0 else gsyn2
        w = w1 if cell == 0 else w2
        i_l = g_l * (v - e_l)
        i_na = g_na * m * m * m * h * (v - e_na)
        i_k = g_k * n * n * n * n * (v - e_k)
        i_syn = gsyn * (v - v_syn) * s_other
        d[o] = (-i_l - i_na - i_k - i_syn + w + i0) / cm
        d[o + 1] = phi * (_alpha_m(v) * (1.0 - m) - _beta_m(v) * m)
        d[o + 2] = phi * (_alpha_h(v) * (1.0 - h) - _beta_h(v) * h)
        d[o + 3] = phi * (_alpha_n(v) * (1.0 - n) - _beta_n(v) * n)
        hs = 1.0 / (1.0 + np.exp(-(v - theta_v) / sigma_s))
        d[o + 4] = a_syn * (1.0 - s[o + 4]) * hs - b_syn * s[o + 4]


def hh_derivs(state, params: HHParams, noise=(0.0, 0.0)) -> np.ndarray:
    """Right-hand side at one state point. ``noise`` holds the per-cell
    inputs W added directly to Cm * v'."""
    s = np.asarray(state, dtype=float)
    gating = np.concatenate([s[1:5], s[6:10]])
    if np.any(gating < -1e-9) or np.any(gating > 1.0 + 1e-9):
        raise ValueError("gating variables left [0, 1]")
    d = np.empty(10)
    p = params
    _hh_rhs(s, d, p.cm, p.g_na, p.e_na, p.g_k, p.e_k, p.g_l, p.e_l,
            p.v_syn, p.i0, p.phi, p.theta_v, p.sigma_s,
            p.alpha_syn, p.beta_syn, p.gsyn1, p.gsyn2,
            float(noise[0]), float(noise[1]))
    return d


@njit(cache=True)
def _integrate_kernel(y, cm, g_na, e_na, g_k, e_k, g_l, e_l, v_syn, i0, phi,
                      theta_v, sigma_s, a_syn, b_syn, gsyn1, gsyn2,
                      noise_std, dt, n_steps, transient, stride, out,
                      use_rk4, seed):
    dim = 10
    k1 = np.empty(dim); k2 = np.empty(dim); k3 = np.empty(dim); k4 = np.empty(dim)
    tmp = np.empty(dim)
    noisy = noise_std > 0.0
    if noisy:
        np.random.seed(seed)
    sq = noise_std / np.sqrt(dt)
    n_rec = 0
    for step in range(n_steps):
        if use_rk4:
            _hh_rhs(y, k1, cm, g_na, e_na, g_k, e_k, g_l, e_l, v_syn, i0, phi,
                    theta_v, sigma_s, a_syn, b_syn, gsyn1, gsyn2, 0.0, 0.0)
            for i in range(dim):
                tmp[i] = y[i] + 0.5 * dt * k1[i]
            _hh_rhs(tmp, k2, cm, g_na, e_na, g_k, e_k, g_l, e_l, v_syn, i0, phi,
                    theta_v, sigma_s, a_syn, b_syn, gsyn1, gsyn2, 0.0, 0.0)
            for i in range(dim):
                tmp[i] = y[i] + 0.5 * dt * k2[i]
            _hh_rhs(tmp, k3, cm, g_na, e_na, g_k, e_k, g_l, e_l, v_syn, i0, phi,
                    theta_v, sigma_s, a_syn, b_syn, gsyn1, gsyn2, 0.0, 0.0)
            for i in range(dim):
                tmp[i] = y[i] + dt * k3[i]
            _hh_rhs(tmp, k4, cm, g_na, e_na, g_k, e_k, g_l, e_l, v_syn, i0, phi,
                    theta_v, sigma_s, a_syn, b_syn, gsyn1, gsyn2, 0.0, 0.0)
            for i in range(dim):
                y[i] = y[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        else:
            w1 = sq * np.random.standard_normal() if noisy else 0.0
            w2 = sq * np.random.standard_normal() if noisy else 0.0
            _hh_rhs(y, k1, cm, g_na, e_na, g_k, e_k, g_l, e_l, v_syn, i0, phi,
                    theta_v, sigma_s, a_syn, b_syn, gsyn1, gsyn2, w1, w2)
            for i in range(dim):
                y[i] = y[i] + dt * k1[i]
        for i in range(dim):
            if not np.isfinite(y[i]):
                return step
        # gating must stay in [0, 1]: clip round-off overshoot, abort on worse
        for cell in range(2):
            for j in range(1, 5):
                idx = 5 * cell + j
                g = y[idx]
                if g < 0.0:
                    if g < -_GATING_TOL:
                        return step
                    y[idx] = 0.0
                elif g > 1.0:
                    if g > 1.0 + _GATING_TOL:
                        return step
                    y[idx] = 1.0
        k = step - transient
        if k >= 0 and k % stride == 0 and n_rec < out.shape[0]:
            for i in range(dim):
                out[n_rec, i] = y[i]
            n_rec += 1
    return -1


def hh_initial_state(seed=None) -> np.ndarray:
    """Both cells near rest with gating at steady state; cell 2 is
    depolarized a little so the pair does not start symmetric."""
    def cell(v):
        r = gating_rates(v)
        return [v,
                r["alpha_m"] / (r["alpha_m"] + r["beta_m"]),
                r["alpha_h"] / (r["alpha_h"] + r["beta_h"]),
                r["alpha_n"] / (r["alpha_n"] + r["beta_n"]),
                0.05]
    y0 = np.array(cell(-65.0) + cell(-58.0))
    if seed is not None:
        rng = np.random.default_rng(seed)
        y0 = y0 + 1e-3 * np.abs(y0) * rng.standard_normal(y0.size)
    return y0


def integrate_hh(params: HHParams, config: IntegratorConfig, y0=None) -> np.ndarray:
    """Integrate the coupled pair; Euler-Maruyama when noisy, optional RK4
    when noiseless. Returns the strided post-transient states."""
    use_rk4 = config.method == RK4
    if use_rk4 and params.noise_std != 0.0:
        raise ValueError("rk4 requires noise_std = 0; use euler-maruyama")
    y = hh_initial_state(config.seed) if y0 is None else np.asarray(y0, dtype=float).copy()
    out = np.empty((config.n_recorded, 10))
    p = params
    seed = 0 if config.seed is None else int(config.seed) % (2**32)
    bad = _integrate_kernel(y, p.cm, p.g_na, p.e_na, p.g_k, p.e_k, p.g_l, p.e_l,
                            p.v_syn, p.i0, p.phi, p.theta_v, p.sigma_s,
                            p.alpha_syn, p.beta_syn, p.gsyn1, p.gsyn2,
                            0.0 if use_rk4 else p.noise_std,
                            config.dt, config.n_steps, config.transient_steps,
                            config.record_stride, out, use_rk4, seed)
    if bad >= 0:
        raise DivergenceError(bad)
    return out
