"""Fixed-step integrators shared by the flow models.

Deterministic systems use the classical 4th-order Runge-Kutta scheme;
the noisy neuron model uses Euler-Maruyama with the noise entering the
derivative as sigma * N(0,1) / sqrt(dt), so one integrated step has
standard deviation sigma * sqrt(dt). With zero noise Euler-Maruyama is
plain forward Euler.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

RK4 = "rk4"
EULER_MARUYAMA = "euler-maruyama"


class DivergenceError(RuntimeError):
    """A trajectory left the finite domain; carries the failing step index."""

    def __init__(self, step: int):
        super().__init__(f"non-finite state encountered at step {step}")
        self.step = step


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size, step counts, transient policy and seeding for a run."""

    dt: float
    n_steps: int
    transient_steps: int = 0
    seed: int | None = None
    method: str = RK4
    record_stride: int = 1

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.transient_steps >= self.n_steps:
            raise ValueError("transient_steps must be < n_steps")
        if self.method not in (RK4, EULER_MARUYAMA):
            raise ValueError(f"unknown method {self.method!r}")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")

    @property
    def n_recorded(self) -> int:
        return (self.n_steps - self.transient_steps) // self.record_stride

    @property
    def dt_recorded(self) -> float:
        return self.dt * self.record_stride


def rk4_step(rhs, y, dt):
    """One classical Runge-Kutta step for y' = rhs(y)."""
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * dt * k1)
    k3 = rhs(y + 0.5 * dt * k2)
    k4 = rhs(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(rhs, y0, config: IntegratorConfig, noise_std=None):
    """Integrate y' = rhs(y) and return the post-transient trajectory.

    Parameters
    ----------
    rhs : callable
        Right-hand side, state -> derivative (1-d arrays).
    y0 : array_like
        Initial state.
    config : IntegratorConfig
    noise_std : array_like or None
        Per-component noise strength for the Euler-Maruyama method. Each
        step adds sqrt(dt) * noise_std * N(0,1) componentwise, draws
        independent per component per step.

    Returns
    -------
    ndarray, shape (n_recorded, dim)
        States at interval dt * record_stride, transient removed.

    Raises
    ------
    DivergenceError
        If the state becomes non-finite; the exception carries the step.
    """
    y = np.asarray(y0, dtype=float).copy()
    dim = y.size
    if config.method == EULER_MARUYAMA:
        sigma = np.zeros(dim) if noise_std is None else np.broadcast_to(
            np.asarray(noise_std, dtype=float), (dim,)).copy()
        rng = np.random.default_rng(config.seed)
        sqrt_dt = np.sqrt(config.dt)
    elif noise_std is not None:
        raise ValueError("noise_std is only meaningful for euler-maruyama")

    out = np.empty((config.n_recorded, dim))
    n_rec = 0
    for step in range(config.n_steps):
        if config.method == RK4:
            y = rk4_step(rhs, y, config.dt)
        else:
            y = y + config.dt * rhs(y) + sqrt_dt * sigma * rng.standard_normal(dim)
        if not np.all(np.isfinite(y)):
            raise DivergenceError(step)
        k = step - config.transient_steps
        if k >= 0 and k % config.record_stride == 0 and n_rec < out.shape[0]:
            out[n_rec] = y
            n_rec += 1
    return out[:n_rec]


def jitter_initial_state(y0, seed, rel=1e-3):
    """Seeded multiplicative jitter used to decorrelate sweep points."""
    y0 = np.asarray(y0, dtype=float)
    if seed is None:
        return y0.copy()
    rng = np.random.default_rng(seed)
    return y0 * (1.0 + rel * rng.standard_normal(y0.size))
