"""Phase extraction from trajectories and raw signals.

Every arctangent here is the two-argument, quadrant-aware kind; a plain
arctan(y/x) loses the half-plane and breaks phase continuity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .core import RAW, WRAPPED, PhaseSeries, wrap_angle
from .models.lorenz import LorenzParams


class UndefinedPhaseError(ValueError):
    """Phase requested at a point where the angle is not defined."""

    def __init__(self, message, index=None):
        super().__init__(message if index is None else f"{message} (sample {index})")
        self.index = index


def protophase(x, y):
    """Angle of the point (x, y) wrapped onto [0, 2*pi).

    For the Rossler oscillators the phase difference is the difference of
    the two oscillators' protophases in their (x, y) planes.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r2 = x * x + y * y
    if np.any(r2 == 0.0):
        bad = int(np.argmax(np.atleast_1d(r2) == 0.0))
        raise UndefinedPhaseError("phase undefined at the origin",
                                  index=bad if r2.ndim else None)
    return wrap_angle(np.arctan2(y, x))


# alias kept for symmetry with the Lorenz-specific extractor
protophase_rossler = protophase


@dataclass(frozen=True)
class LorenzPhaseRef:
    """Unstable fixed point of one Lorenz oscillator in the (u, z) plane,
    u = sqrt(x^2 + y^2)."""

    u_hat: float
    z_hat: float

    def __post_init__(self):
        if self.u_hat <= 0:
            raise ValueError("u_hat must be positive")


def lorenz_fixed_point(params: LorenzParams, which: int) -> LorenzPhaseRef:
    """Rotation center (u_hat, z_hat) for oscillator 1 or 2.

    The off-origin fixed points sit at x = y = +-sqrt(3*(35.5+gamma)),
    z = 35.5 + gamma, hence u_hat = sqrt(6*(35.5+gamma)).
    """
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    gamma = params.gamma1 if which == 1 else params.gamma2
    rad = 35.5 + gamma
    if rad <= 0:
        raise ValueError(f"degenerate detuning gamma={gamma}: no rotation center")
    return LorenzPhaseRef(u_hat=float(np.sqrt(6.0 * rad)), z_hat=float(rad))


def phase_lorenz(x, y, z, ref: LorenzPhaseRef):
    """Angle in the (u, z) plane around the unstable fixed point."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    du = np.sqrt(x * x + y * y) - ref.u_hat
    dz = z - ref.z_hat
    r2 = du * du + dz * dz
    if np.any(r2 == 0.0):
        bad = int(np.argmax(np.atleast_1d(r2) == 0.0))
        raise UndefinedPhaseError("phase undefined at the reference point",
                                  index=bad if r2.ndim else None)
    return wrap_angle(np.arctan2(dz, du))


def ring_transform(x2, y2, phi1):
    """Rotate (x2, y2) by -phi1: the co-rotating frame of oscillator 1.

    Exact isometry; inverted by ring_transform(. , -phi1).
    """
    x2 = np.asarray(x2, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    c = np.cos(phi1)
    s = np.sin(phi1)
    return x2 * c + y2 * s, -x2 * s + y2 * c


def bandpass_sos(lo_hz: float, hi_hz: float, fs: float, order: int = 4):
    """Butterworth band-pass design in second-order sections."""
    nyq = fs / 2.0
    if not 0 < lo_hz < hi_hz < nyq:
        raise ValueError(
            f"band ({lo_hz}, {hi_hz}) Hz must satisfy 0 < lo < hi < Nyquist {nyq}")
    return sps.butter(order, [lo_hz / nyq, hi_hz / nyq], btype="band", output="sos")


def bandpass_coeffs_csv(path, lo_hz, hi_hz, fs, order=4):
    """Dump the second-order-section coefficients for audit."""
    sos = bandpass_sos(lo_hz, hi_hz, fs, order)
    header = "b0,b1,b2,a0,a1,a2"
    np.savetxt(path, sos, delimiter=",", header=header, comments="")
    return sos


def bandpass(series: PhaseSeries, lo_hz: float, hi_hz: float,
             order: int = 4) -> PhaseSeries:
    """Zero-phase band-pass of a raw signal.

    A 4th-order Butterworth band-pass applied forward then backward, so
    the net phase shift is zero at every frequency and the effective
    magnitude response is the square of the single-pass response.
    """
    if series.kind != RAW:
        raise ValueError("bandpass expects a raw-signal series")
    fs = 1.0 / series.dt
    sos = bandpass_sos(lo_hz, hi_hz, fs, order)
    out = sps.sosfiltfilt(sos, series.samples)
    return PhaseSeries(out, series.dt, RAW)


@dataclass(frozen=True)
class AnalyticSeries:
    """Real/imaginary parts of a discrete analytic signal.

    ``edge_discard`` is the fraction of samples to drop at each end when
    deriving quantities that suffer from transform edge artifacts.
    """

    real: np.ndarray
    imag: np.ndarray
    dt: float
    edge_discard: float = 0.05

    def __post_init__(self):
        real = np.asarray(self.real, dtype=float)
        imag = np.asarray(self.imag, dtype=float)
        object.__setattr__(self, "real", real)
        object.__setattr__(self, "imag", imag)
        if real.shape != imag.shape:
            raise ValueError("real and imaginary parts must have equal length")
        if not 0.0 <= self.edge_discard <= 0.25:
            raise ValueError("edge_discard must lie in [0, 0.25]")

    @property
    def n_edge(self) -> int:
        return int(np.floor(self.real.size * self.edge_discard))

    def amplitude(self) -> np.ndarray:
        return np.hypot(self.real, self.imag)


def analytic_signal(series: PhaseSeries, edge_discard: float = 0.05) -> AnalyticSeries:
    """Discrete analytic signal via the frequency-domain construction.

    The mean is removed, the negative-frequency half of the spectrum is
    zeroed and the positive half doubled (DC and Nyquist untouched), and
    the inverse transform gives real part = mean-removed input exactly.
    """
    if series.kind != RAW:
        raise ValueError("analytic_signal expects a raw-signal series")
    x = series.samples
    if x.size < 64:
        raise ValueError(f"need at least 64 samples, got {x.size}")
    x = x - x.mean()
    z = sps.hilbert(x)
    return AnalyticSeries(np.real(z), np.imag(z), series.dt, edge_discard)


def instantaneous_phase(a: AnalyticSeries) -> PhaseSeries:
    """Per-sample wrapped phase of an analytic signal, edges discarded."""
    n = a.n_edge
    real = a.real[n:a.real.size - n] if n else a.real
    imag = a.imag[n:a.imag.size - n] if n else a.imag
    amp2 = real * real + imag * imag
    if np.any(amp2 == 0.0):
        raise UndefinedPhaseError("zero amplitude", index=int(np.argmax(amp2 == 0.0)) + n)
    return PhaseSeries(wrap_angle(np.arctan2(imag, real)), a.dt, WRAPPED)


def hilbert_phase_pipeline(signal: np.ndarray, dt: float,
                           lo_hz: float = 30.0, hi_hz: float = 80.0,
                           decimate: int = 1, edge_discard: float = 0.05) -> PhaseSeries:
    """Raw signal -> optional decimation -> band-pass -> analytic phase.

    Decimation is a plain stride after the integrator's fine stepping; the
    band of interest must stay far below the decimated Nyquist frequency.
    """
    x = np.asarray(signal, dtype=float)
    if decimate > 1:
        x = x[::decimate]
        dt = dt * decimate
    series = PhaseSeries(x, dt, RAW)
    filtered = bandpass(series, lo_hz, hi_hz)
    return instantaneous_phase(analytic_signal(filtered, edge_discard))
