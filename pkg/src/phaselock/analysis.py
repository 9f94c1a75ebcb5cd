"""First-return-map analysis of strobed phase differences.

The method: sample the phase of signal x each time the phase of signal y
crosses a checkpoint from below, recenter the samples so the preferred
locking angle sits at pi/2, and partition the (phi_i, phi_{i+1}) torus
into four quadrants numbered clockwise. Region I (both coordinates within
pi/2 of the preferred angle) is the synchronized state.

Because consecutive return-map points share a coordinate, the only
possible moves are I -> {I, II}, II -> {III, IV}, III -> {III, IV} and
IV -> {I, II}. The four transition rates are the per-cycle probabilities
of the moves that start and end a desynchronization excursion:

    r1 = P(I -> II)    leaving the synchronized region
    r2 = P(II -> IV)   heading straight back rather than through III
    r3 = P(III -> IV)  leaving the fully desynchronized region
    r4 = P(IV -> I)    completing the return to synchrony

so the shortest excursion (region path 2-4-1, one cycle long) has
probability r2 * r4, and the path 2-3-4-1 (two cycles) has probability
(1 - r2) * r3 * r4.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (TWO_PI, WRAPPED, CircStats, NoPreferredAngleError,
                   PhaseSeries, circular_mean, wrap_angle)

REGION_I, REGION_II, REGION_III, REGION_IV = 1, 2, 3, 4

# transitions permitted by the shared-coordinate structure of the map
ALLOWED_TRANSITIONS = frozenset({
    (1, 1), (1, 2), (2, 3), (2, 4), (3, 3), (3, 4), (4, 1), (4, 2),
})

HISTOGRAM_BINS = ("1", "2", "3", "4", "5", ">5")


class InsufficientDataError(ValueError):
    """Not enough samples or crossings to run the analysis."""


class NoLockingError(RuntimeError):
    """The significance gate failed: no overall phase locking, rates not
    computed."""


class InternalConsistencyError(RuntimeError):
    """A structural invariant of the return map was violated."""


@dataclass(frozen=True)
class StrobedPhases:
    """Phase-of-x samples taken at upward checkpoint crossings of
    phase-of-y, in time order."""

    samples: np.ndarray
    checkpoint: float = 0.0
    source: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", samples)
        if samples.size < 2:
            raise InsufficientDataError("need at least 2 strobed samples")

    def __len__(self):
        return self.samples.size


@dataclass(frozen=True)
class RegionPartition:
    """Quadrant partition anchored at the preferred locking angle."""

    psi_star: float

    def __post_init__(self):
        object.__setattr__(self, "psi_star", wrap_angle(self.psi_star))


@dataclass(frozen=True)
class ReturnMap:
    """Recentered samples chi plus the region label of every map point.

    chi has the preferred angle at pi/2 so "in sync" is chi in [0, pi).
    Point k is (chi[k], chi[k+1]); labels has length len(chi) - 1.
    """

    chi: np.ndarray
    labels: np.ndarray
    psi_star: float

    @property
    def points(self) -> np.ndarray:
        return np.stack([self.chi[:-1], self.chi[1:]], axis=1)

    @property
    def n_points(self) -> int:
        return self.labels.size


@dataclass(frozen=True)
class SyncIndex:
    """Squared resultant of e^{i*theta}: 0 = no locking, 1 = perfect."""

    gamma: float
    n: int

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma out of [0, 1]: {self.gamma}")


@dataclass(frozen=True)
class LockingSignificance:
    gamma: float
    threshold_95: float
    significant: bool
    n_surrogates: int


@dataclass(frozen=True)
class TransitionRates:
    """Per-region occupancies, the four headline rates, and the full
    destination split for the regions with two exits.

    A rate is None when its region holds no points. ``sub_rates`` maps
    (from_region, to_region) to the per-occupancy probability of that
    move; for region II the two entries sum to the probability of leaving
    II (1 whenever II is occupied) and the IV entries likewise.
    """

    r1: float | None
    r2: float | None
    r3: float | None
    r4: float | None
    region_counts: tuple
    exit_counts: tuple
    sub_rates: dict
    transition_counts: np.ndarray
    r3_low_confidence: bool

    def as_tuple(self):
        return (self.r1, self.r2, self.r3, self.r4)

    def defined(self) -> bool:
        return all(r is not None for r in self.as_tuple())


@dataclass(frozen=True)
class DesyncHistogram:
    """Relative frequencies of desynchronization durations, binned as
    {1, 2, 3, 4, 5, >5} cycles."""

    bins: np.ndarray | None
    event_count: int
    flavor: str  # "empirical" or "rate-estimated"
    reason: str | None = None

    def __post_init__(self):
        if self.bins is not None:
            bins = np.asarray(self.bins, dtype=float)
            object.__setattr__(self, "bins", bins)
            if bins.shape != (6,):
                raise ValueError("histogram must have 6 bins")
            if np.any(bins < -1e-12):
                raise ValueError("bin frequencies must be non-negative")

    @property
    def defined(self) -> bool:
        return self.bins is not None


# ---------------------------------------------------------------------------
# strobing


def strobe(phase_x: PhaseSeries, phase_y: PhaseSeries, checkpoint: float = 0.0,
           interpolate: bool = True, source: str = "") -> StrobedPhases:
    """Record the phase of x at each upward checkpoint crossing of y.

    Crossing times are located by linear interpolation of the unwrapped
    reference phase between the bracketing samples, and the x phase is
    interpolated on its unwrapped lift at those times. With
    ``interpolate=False`` the x phase of the first sample after the
    crossing is taken instead (cross-checking mode).
    """
    if phase_x.kind != WRAPPED or phase_y.kind != WRAPPED:
        raise ValueError("strobe expects wrapped-phase series")
    if len(phase_x) != len(phase_y) or phase_x.dt != phase_y.dt:
        raise ValueError("phase series must share length and dt")
    c = wrap_angle(checkpoint)
    x_lift = np.unwrap(phase_x.samples)
    y_lift = np.unwrap(phase_y.samples)
    # index of the highest crossing level c + 2*pi*m at or below each sample
    k = np.floor((y_lift - c) / TWO_PI).astype(np.int64)
    dk = k[1:] - k[:-1]
    seg_idx = np.flatnonzero(dk > 0)
    if seg_idx.size == 0:
        raise InsufficientDataError("no upward crossings of the checkpoint")
    reps = dk[seg_idx]
    seg = np.repeat(seg_idx, reps)
    offsets = np.arange(reps.sum()) - np.repeat(np.cumsum(reps) - reps, reps)
    levels = c + TWO_PI * (k[seg] + 1 + offsets)
    if interpolate:
        frac = (levels - y_lift[seg]) / (y_lift[seg + 1] - y_lift[seg])
        phi = x_lift[seg] + frac * (x_lift[seg + 1] - x_lift[seg])
    else:
        phi = x_lift[seg + 1]
    if phi.size < 2:
        raise InsufficientDataError(
            f"need at least 2 upward crossings, found {phi.size}")
    return StrobedPhases(wrap_angle(phi), checkpoint=c, source=source)


# ---------------------------------------------------------------------------
# locking strength and its significance


def gamma_index(theta) -> SyncIndex:
    """Squared modulus of the complex mean of e^{i*theta}."""
    theta = np.asarray(theta, dtype=float)
    if theta.size == 0:
        raise ValueError("gamma_index requires at least one angle")
    z = np.exp(1j * theta).mean()
    g = min(float(np.abs(z)) ** 2, 1.0)
    return SyncIndex(gamma=g, n=int(theta.size))


def locking_significance(phase_x, phase_y, n_surrogates: int = 200,
                         seed=None, max_samples: int = 100_000) -> LockingSignificance:
    """Test the locking index against circular time-shift surrogates.

    One series is shifted circularly relative to the other by an offset
    drawn uniformly from [N/4, 3N/4]; the observed gamma must exceed the
    95th percentile of the surrogate distribution (strict inequality).
    Long inputs are stride-decimated to ``max_samples`` before the
    surrogate pass to keep the cost bounded.
    """
    x = np.asarray(phase_x, dtype=float)
    y = np.asarray(phase_y, dtype=float)
    if x.size != y.size:
        raise ValueError("phase sequences must have equal length")
    if x.size < 100:
        raise InsufficientDataError(f"need at least 100 samples, got {x.size}")
    if n_surrogates < 100:
        raise ValueError("need at least 100 surrogates")
    gamma = gamma_index(x - y).gamma
    stride = max(1, int(np.ceil(x.size / max_samples)))
    xs, ys = x[::stride], y[::stride]
    n = xs.size
    rng = np.random.default_rng(seed)
    shifts = rng.integers(n // 4, 3 * n // 4 + 1, size=n_surrogates)
    zx = np.exp(1j * xs)
    zy_conj = np.exp(-1j * ys)
    sur = np.empty(n_surrogates)
    for i, s in enumerate(shifts):
        sur[i] = np.abs((zx * np.roll(zy_conj, -int(s))).mean()) ** 2
    threshold = float(np.percentile(sur, 95))
    return LockingSignificance(gamma=gamma, threshold_95=threshold,
                               significant=bool(gamma > threshold),
                               n_surrogates=n_surrogates)


# ---------------------------------------------------------------------------
# partition and return map


def fit_partition(strobed: StrobedPhases, min_resultant: float = 0.05) -> RegionPartition:
    """Estimate the preferred locking angle as the circular mean of the
    strobed samples. Fails when the samples have no usable cluster."""
    stats = circular_mean(strobed.samples)
    if stats.resultant_length < min_resultant:
        raise NoPreferredAngleError(
            f"no preferred phase-locking angle (resultant "
            f"{stats.resultant_length:.4f} < {min_resultant})")
    return RegionPartition(psi_star=stats.mean_angle)


def build_return_map(strobed: StrobedPhases, partition: RegionPartition) -> ReturnMap:
    """Recenter the samples and label every (chi_k, chi_{k+1}) point.

    chi = wrap(phi - psi_star + pi/2) puts the cluster center at pi/2, so
    a coordinate is in sync iff chi in [0, pi). Labels: I both in, II
    first in/second out, III both out, IV first out/second in (clockwise).
    """
    chi = wrap_angle(np.asarray(strobed.samples, dtype=float) - partition.psi_star + np.pi / 2)
    first_in = chi[:-1] < np.pi
    second_in = chi[1:] < np.pi
    labels = np.where(first_in,
                      np.where(second_in, REGION_I, REGION_II),
                      np.where(second_in, REGION_IV, REGION_III)).astype(np.int8)
    return ReturnMap(chi=chi, labels=labels, psi_star=partition.psi_star)


def return_map_from_theta(theta, center: float = 0.0) -> ReturnMap:
    """Return map for a map-difference series theta in [-1, 1).

    theta is carried onto the circle by the affine map phi = pi*(theta+1)
    and the partition is anchored so that "in sync" means theta within
    1/2 of ``center`` (center 0 reproduces |theta| < 1/2; center 1/2
    makes the positive-theta half the synchronized region). Every
    iteration contributes one map point; there is no strobing.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.size < 2:
        raise InsufficientDataError("need at least 2 theta samples")
    phi = wrap_angle(np.pi * (theta + 1.0))
    partition = RegionPartition(psi_star=np.pi * (center + 1.0))
    strobed = StrobedPhases(phi, checkpoint=0.0, source="theta-map")
    return build_return_map(strobed, partition)


# ---------------------------------------------------------------------------
# transition rates


def transition_rates(rmap: ReturnMap, r3_min_count: int = 20) -> TransitionRates:
    """Count region occupancies and destination-resolved transitions.

    Occupancy counts the map points that have a successor; each rate is
    the exit count over the occupancy of its region, so all counts are
    integers and the rates exact rationals. r3 is flagged low-confidence
    when region III holds fewer than ``r3_min_count`` points.
    """
    labels = rmap.labels.astype(np.int64)
    if labels.size < 2:
        raise InsufficientDataError("need at least 2 labeled points")
    a, b = labels[:-1], labels[1:]
    t = np.bincount((a - 1) * 4 + (b - 1), minlength=16).reshape(4, 4)
    for i in range(4):
        for j in range(4):
            if t[i, j] and (i + 1, j + 1) not in ALLOWED_TRANSITIONS:
                raise InternalConsistencyError(
                    f"structurally impossible transition {i + 1} -> {j + 1} observed")
    n = tuple(int(v) for v in t.sum(axis=1))
    exits = (int(t[0, 1]), int(t[1, 3]), int(t[2, 3]), int(t[3, 0]))

    def rate(k):
        return exits[k] / n[k] if n[k] > 0 else None

    sub = {}
    if n[1] > 0:
        sub[(2, 3)] = int(t[1, 2]) / n[1]
        sub[(2, 4)] = int(t[1, 3]) / n[1]
    if n[3] > 0:
        sub[(4, 1)] = int(t[3, 0]) / n[3]
        sub[(4, 2)] = int(t[3, 1]) / n[3]
    return TransitionRates(
        r1=rate(0), r2=rate(1), r3=rate(2), r4=rate(3),
        region_counts=n, exit_counts=exits, sub_rates=sub,
        transition_counts=t, r3_low_confidence=bool(0 < n[2] < r3_min_count),
    )


# ---------------------------------------------------------------------------
# desynchronization events


def desync_events(rmap_or_labels) -> np.ndarray:
    """Durations (in cycles) of complete desynchronization events.

    A maximal run of non-I labels bounded by I on both sides is one
    event; its duration is the run length minus one, because each map
    point already carries the next cycle's phase. Runs touching either
    end of the label sequence are discarded. Every event must start at
    region II and end at region IV; anything else is a structural bug.
    """
    labels = rmap_or_labels.labels if isinstance(rmap_or_labels, ReturnMap) else \
        np.asarray(rmap_or_labels)
    i_pos = np.flatnonzero(labels == REGION_I)
    if i_pos.size < 2:
        return np.empty(0, dtype=np.int64)
    gaps = np.diff(i_pos)
    starts = i_pos[:-1][gaps > 1]
    ends = i_pos[1:][gaps > 1]
    if starts.size and not np.all(labels[starts + 1] == REGION_II):
        raise InternalConsistencyError("desynchronization event not starting at II")
    if starts.size and not np.all(labels[ends - 1] == REGION_IV):
        raise InternalConsistencyError("desynchronization event not ending at IV")
    return (ends - starts - 2).astype(np.int64)


def laminar_runs(rmap_or_labels) -> np.ndarray:
    """Lengths of all maximal runs of region-I labels."""
    labels = rmap_or_labels.labels if isinstance(rmap_or_labels, ReturnMap) else \
        np.asarray(rmap_or_labels)
    in_i = np.concatenate([[0], (labels == REGION_I).astype(np.int8), [0]])
    d = np.diff(in_i)
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1)
    return (ends - starts).astype(np.int64)


def desync_histogram(durations) -> DesyncHistogram:
    """Bin event durations into {1, 2, 3, 4, 5, >5} relative frequencies."""
    durations = np.asarray(durations, dtype=np.int64)
    bins = np.zeros(6)
    if durations.size:
        for d in durations:
            bins[min(d, 6) - 1] += 1
        bins /= durations.size
    return DesyncHistogram(bins=bins, event_count=int(durations.size),
                           flavor="empirical")


def excursion_duration_pmf(r2: float, r3: float, r4: float, d_max: int) -> np.ndarray:
    """P(duration = d) for d = 1..d_max under independent transitions.

    The excursion is a Markov chain on {II, III, IV} with moves
    II -> IV (r2) / III (1-r2), III -> IV (r3) / III (1-r3) and
    IV -> I (r4, ends the event) / II (1-r4). The duration-d mass sums
    the probabilities of all region paths of d+1 steps that finish with
    the IV -> I move; the shortest path gives P(1) = r2 * r4.
    """
    for name, r in (("r2", r2), ("r3", r3), ("r4", r4)):
        if not 0.0 <= r <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {r}")
    pmf = np.zeros(d_max)
    w2, w3, w4 = 1.0, 0.0, 0.0  # path mass currently at II, III, IV
    for d in range(1, d_max + 1):
        w2, w3, w4 = (w4 * (1.0 - r4),
                      w2 * (1.0 - r2) + w3 * (1.0 - r3),
                      w2 * r2 + w3 * r3)
        pmf[d - 1] = w4 * r4
    return pmf


def estimate_histogram_from_rates(rates: TransitionRates,
                                  max_duration: int = 5) -> DesyncHistogram:
    """Duration histogram predicted from the rates alone.

    Needs r2, r3 and r4; the mass not absorbed by duration
    ``max_duration`` goes into the >5 bin (including, when r4 = 0 or the
    chain can stall in III, the mass of excursions that never return).
    """
    missing = [name for name, r in (("r2", rates.r2), ("r3", rates.r3),
                                    ("r4", rates.r4)) if r is None]
    if missing:
        return DesyncHistogram(bins=None, event_count=0, flavor="rate-estimated",
                               reason=f"undefined rate(s): {', '.join(missing)}")
    pmf = excursion_duration_pmf(rates.r2, rates.r3, rates.r4, max_duration)
    bins = np.zeros(6)
    bins[:min(max_duration, 5)] = pmf[:5]
    bins[5] = max(0.0, 1.0 - pmf.sum()) + pmf[5:].sum()
    return DesyncHistogram(bins=bins, event_count=0, flavor="rate-estimated")


# ---------------------------------------------------------------------------
# laminar statistics and scaling laws


def mean_laminar_from_rates(rates: TransitionRates) -> float:
    """Mean synchronized-run length 1/r1, in cycles; inf when r1 = 0."""
    if rates.r1 is None:
        raise ValueError("r1 is undefined (region I empty)")
    if rates.r1 == 0.0:
        return float("inf")
    return 1.0 / rates.r1


def mean_laminar_empirical(rmap_or_labels) -> float:
    """Mean length of the maximal region-I runs."""
    runs = laminar_runs(rmap_or_labels)
    if runs.size == 0:
        raise InsufficientDataError("no laminar runs in the label sequence")
    return float(runs.mean())


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    r_squared: float
    law: str
    eps_crit: float
    n_points: int


def scaling_fit(eps_values, mean_laminar_values, law: str, eps_crit: float) -> ScalingFit:
    """Least-squares fit of a laminar-length scaling law.

    type-I: log<l> against log(eps_crit - eps); the exponent -1/2 shows
    up as a slope of -0.5. eyelet: ln<l> against sqrt(eps_crit - eps).
    All points must lie strictly below eps_crit with finite positive
    mean laminar lengths.
    """
    eps = np.asarray(eps_values, dtype=float)
    ml = np.asarray(mean_laminar_values, dtype=float)
    if eps.size != ml.size:
        raise ValueError("eps and mean-laminar arrays must match")
    if eps.size < 4:
        raise ValueError(f"need at least 4 points, got {eps.size}")
    if np.any(eps >= eps_crit):
        raise ValueError("all coupling values must lie below eps_crit")
    if not np.all(np.isfinite(ml)) or np.any(ml <= 0):
        raise ValueError("mean laminar lengths must be finite and positive")
    if law == "type-I":
        x = np.log(eps_crit - eps)
    elif law == "eyelet":
        x = np.sqrt(eps_crit - eps)
    else:
        raise ValueError(f"unknown scaling law {law!r}")
    y = np.log(ml)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(slope=float(slope), intercept=float(intercept),
                      r_squared=r2, law=law, eps_crit=float(eps_crit),
                      n_points=int(eps.size))


# ---------------------------------------------------------------------------
# end-to-end pipeline


@dataclass(frozen=True)
class PipelineResult:
    sync: SyncIndex
    significance: LockingSignificance | None
    partition: RegionPartition
    return_map: ReturnMap
    rates: TransitionRates
    hist_empirical: DesyncHistogram
    hist_estimated: DesyncHistogram
    mean_laminar_emp: float | None
    mean_laminar_rate: float | None
    n_strobes: int
    n_events: int


def analyze_pipeline(phase_x: PhaseSeries, phase_y: PhaseSeries,
                     checkpoint: float = 0.0, n_surrogates: int = 200,
                     seed=None, min_resultant: float = 0.05,
                     interpolate: bool = True) -> PipelineResult:
    """Strobe, gate, partition, label, and summarize two phase series.

    The locking index and its surrogate gate run on the dense phase
    difference; ``n_surrogates = 0`` skips the gate (the index is still
    reported). A failed gate raises NoLockingError and no rates are
    computed.
    """
    theta_dense = np.asarray(phase_x.samples) - np.asarray(phase_y.samples)
    sync = gamma_index(theta_dense)
    significance = None
    if n_surrogates > 0:
        significance = locking_significance(phase_x.samples, phase_y.samples,
                                            n_surrogates=n_surrogates, seed=seed)
        if not significance.significant:
            raise NoLockingError("no overall phase locking - rates not computed")
    strobed = strobe(phase_x, phase_y, checkpoint, interpolate=interpolate)
    partition = fit_partition(strobed, min_resultant=min_resultant)
    rmap = build_return_map(strobed, partition)
    return analyze_return_map(rmap, sync=sync, significance=significance)


def analyze_return_map(rmap: ReturnMap, sync: SyncIndex | None = None,
                       significance: LockingSignificance | None = None) -> PipelineResult:
    """Rates, histograms and laminar statistics for a labeled map."""
    rates = transition_rates(rmap)
    durations = desync_events(rmap)
    hist_emp = desync_histogram(durations)
    hist_est = estimate_histogram_from_rates(rates)
    runs = laminar_runs(rmap)
    ml_emp = float(runs.mean()) if runs.size else None
    ml_rate = None
    if rates.r1 is not None:
        ml_rate = mean_laminar_from_rates(rates)
    if sync is None:
        sync = SyncIndex(gamma=gamma_index(rmap.chi).gamma, n=rmap.chi.size)
    return PipelineResult(
        sync=sync, significance=significance,
        partition=RegionPartition(rmap.psi_star), return_map=rmap,
        rates=rates, hist_empirical=hist_emp, hist_estimated=hist_est,
        mean_laminar_emp=ml_emp, mean_laminar_rate=ml_rate,
        n_strobes=rmap.chi.size, n_events=int(durations.size),
    )
