"""Circular-statistics primitives and phase-series containers.

Wrapped angles live on [0, 2*pi) everywhere in this package; every module
that exchanges phases relies on that canonical range.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

# Below this resultant length a cluster of angles has no usable center.
DEGENERACY_THRESHOLD = 0.05

WRAPPED = "wrapped-phase"
UNWRAPPED = "unwrapped-phase"
RAW = "raw-signal"

_KINDS = (WRAPPED, UNWRAPPED, RAW)


class NoPreferredAngleError(ValueError):
    """Raised when a set of angles has no meaningful circular mean."""


def wrap_angle(x):
    """Wrap an angle (scalar or array, radians) onto [0, 2*pi).

    Idempotent and 2*pi-periodic. Raises ValueError on non-finite input.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("wrap_angle requires finite input")
    out = np.mod(x, TWO_PI)
    # np.mod can return 2*pi for tiny negative inputs; fold those back.
    out = np.where(out >= TWO_PI, out - TWO_PI, out)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class PhaseSeries:
    """Uniformly sampled scalar series.

    Parameters
    ----------
    samples : ndarray
        Sample values. For kind ``wrapped-phase`` each value must lie in
        [0, 2*pi).
    dt : float
        Sample interval in the time units of the generating system.
    kind : str
        One of ``wrapped-phase``, ``unwrapped-phase``, ``raw-signal``.
    """

    samples: np.ndarray
    dt: float
    kind: str = WRAPPED

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", samples)
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if samples.ndim != 1 or samples.size < 2:
            raise ValueError("PhaseSeries needs a 1-d series of length >= 2")
        if self.kind not in _KINDS:
            raise ValueError(f"unknown series kind {self.kind!r}")
        if self.kind == WRAPPED:
            if np.any(samples < 0.0) or np.any(samples >= TWO_PI):
                raise ValueError("wrapped-phase samples must lie in [0, 2*pi)")

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return (self.samples.size - 1) * self.dt

    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) * self.dt


def unwrap(series: PhaseSeries) -> PhaseSeries:
    """Lift a wrapped phase series to a continuous one.

    Consecutive differences of the output lie in (-pi, pi] and the output
    is congruent to the input modulo 2*pi, sample by sample.
    """
    if series.kind != WRAPPED:
        raise ValueError("unwrap expects a wrapped-phase series")
    lifted = np.unwrap(series.samples)
    return PhaseSeries(lifted, series.dt, UNWRAPPED)


@dataclass(frozen=True)
class CircStats:
    """Circular mean direction and resultant length of a set of angles."""

    mean_angle: float
    resultant_length: float
    n: int

    @property
    def degenerate(self) -> bool:
        """True when the resultant is too short to define a center."""
        return self.resultant_length < DEGENERACY_THRESHOLD


def circular_mean(angles) -> CircStats:
    """Circular mean of a sequence of angles (radians).

    The mean direction is arg(sum(exp(i*theta))) wrapped onto [0, 2*pi);
    the resultant length |sum(exp(i*theta))| / n lies in [0, 1] and equals
    1 iff all angles coincide modulo 2*pi.
    """
    angles = np.asarray(angles, dtype=float)
    if angles.size == 0:
        raise ValueError("circular_mean requires at least one angle")
    z = np.exp(1j * angles).mean()
    r = min(float(np.abs(z)), 1.0)
    mean = wrap_angle(float(np.angle(z))) if r > 0.0 else 0.0
    return CircStats(mean_angle=mean, resultant_length=r, n=int(angles.size))
