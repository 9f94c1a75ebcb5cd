"""Reproducible sweep execution and CSV emission.

One sweep point = one simulated system + the full return-map analysis,
reduced to a flat row. Rows are written in sweep order with a fixed,
documented column set; undefined quantities serialize as empty fields.
Per-point seeds derive from (master seed, point index) through
numpy's SeedSequence, so points are reproducible independently of the
worker pool that executed them.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from multiprocessing import get_context

import numpy as np

from .analysis import (NoLockingError, PipelineResult, analyze_pipeline,
                       analyze_return_map, gamma_index, return_map_from_theta)
from .core import NoPreferredAngleError, PhaseSeries, wrap_angle
from .lyapunov import lambda_perp, numerical_lambda_perp
from .models import (HHParams, IntegratorConfig, LorenzParams, RosslerParams,
                     TentParams, integrate_hh, integrate_lorenz,
                     integrate_rossler, iterate_coupled_tent)
from .models.integrators import DivergenceError
from .phase import hilbert_phase_pipeline, lorenz_fixed_point, phase_lorenz, protophase

SYSTEMS = ("tent", "rossler-bi", "rossler-uni", "lorenz", "hh")

# fixed export schema; order is part of the file format
ANALYSIS_COLUMNS = (
    "system", "preset", "point_index", "sweep_param", "sweep_value",
    "params", "master_seed", "point_seed",
    "n_strobes", "gamma", "threshold_95", "significant",
    "r1", "r2", "r3", "r4",
    "n1", "n2", "n3", "n4",
    "x1", "x2", "x3", "x4",
    "sub_r2_to_3", "sub_r2_to_4", "sub_r4_to_1", "sub_r4_to_2",
    "r3_low_confidence",
    "hist_emp_1", "hist_emp_2", "hist_emp_3", "hist_emp_4", "hist_emp_5",
    "hist_emp_gt5",
    "hist_est_1", "hist_est_2", "hist_est_3", "hist_est_4", "hist_est_5",
    "hist_est_gt5",
    "mean_laminar_emp", "mean_laminar_rate", "n_events",
    "lambda_perp_analytic", "lambda_perp_numerical",
    "error",
)

_DEFAULT_PARAMS = {
    "tent": {"a": 0.3, "eps": 0.1, "x0": 0.21, "y0": 0.67},
    "rossler-bi": {"omega1": 1.015, "omega2": 0.985, "eps": 0.02},
    "rossler-uni": {"omega1": 0.93, "omega2": 0.95, "eps": 0.04},
    "lorenz": {"gamma1": 1.5, "gamma2": -1.5, "eps": 9.0},
    "hh": {"gsyn1": 0.1, "gsyn2": 0.1, "noise_std": 0.0, "i0": 10.0},
}

# cycle-length estimates used to size flow integrations (time units/cycle)
_FLOW_DT = 0.01


class ConfigError(ValueError):
    """Invalid experiment configuration; reported before any computation."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one sweep."""

    system: str
    sweep_param: str
    sweep_values: tuple
    params: dict = field(default_factory=dict)
    seed: int = 0
    scale: str = "desk"
    n_surrogates: int = 150
    checkpoint: float = 0.0
    preset: str = ""
    n_cycles: int | None = None       # flows: strobed cycles per point
    map_steps: int = 350_000          # maps: iterations per point
    map_transient: int = 50_000       # maps: discarded iterations
    sim_ms: float | None = None       # neurons: simulated milliseconds
    with_lyapunov: bool = False       # tent: add transversal-exponent columns
    paired_param: str | None = None   # second swept parameter (grid sweeps)
    paired_values: tuple = ()

    def __post_init__(self):
        if self.system not in SYSTEMS:
            raise ConfigError(f"unknown system {self.system!r}; choose from {SYSTEMS}")
        if len(self.sweep_values) == 0:
            raise ConfigError("sweep range is empty")
        if self.scale not in ("desk", "full"):
            raise ConfigError(f"scale must be 'desk' or 'full', got {self.scale!r}")
        defaults = _DEFAULT_PARAMS[self.system]
        allowed = set(defaults)
        unknown = set(self.params) - allowed
        if unknown:
            raise ConfigError(
                f"unknown parameter(s) for {self.system}: {sorted(unknown)}")
        if self.sweep_param not in allowed:
            raise ConfigError(
                f"sweep parameter {self.sweep_param!r} not valid for {self.system}")
        if self.paired_param is not None:
            if self.paired_param not in allowed:
                raise ConfigError(
                    f"paired parameter {self.paired_param!r} not valid for {self.system}")
            if len(self.paired_values) != len(self.sweep_values):
                raise ConfigError("paired_values must match sweep_values in length")
        if self.map_transient >= self.map_steps:
            raise ConfigError("map transient must be below the iteration count")

    def resolved_params(self, index: int) -> dict:
        merged = dict(_DEFAULT_PARAMS[self.system])
        merged.update(self.params)
        merged[self.sweep_param] = self.sweep_values[index]
        if self.paired_param is not None:
            merged[self.paired_param] = self.paired_values[index]
        return merged

    def scale_factor(self) -> int:
        return 10 if self.scale == "full" else 1


def point_seed(master_seed: int, index: int) -> int:
    """Documented derivation: SeedSequence spawned from (master, index)."""
    ss = np.random.SeedSequence(entropy=(int(master_seed), int(index)))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


def _flow_steps(n_cycles, period, transient_tu):
    return int(round(n_cycles * period / _FLOW_DT)) + int(transient_tu / _FLOW_DT)


def _empty_row(config: ExperimentConfig, index: int, seed: int) -> dict:
    row = {c: None for c in ANALYSIS_COLUMNS}
    params = config.resolved_params(index)
    row.update({
        "system": config.system, "preset": config.preset,
        "point_index": index, "sweep_param": config.sweep_param,
        "sweep_value": config.sweep_values[index],
        "params": ";".join(f"{k}={params[k]}" for k in sorted(params)),
        "master_seed": config.seed, "point_seed": seed,
    })
    return row


def _fill_from_result(row: dict, res: PipelineResult) -> dict:
    row["n_strobes"] = res.n_strobes
    row["gamma"] = res.sync.gamma
    if res.significance is not None:
        row["threshold_95"] = res.significance.threshold_95
        row["significant"] = res.significance.significant
    r = res.rates
    row.update({"r1": r.r1, "r2": r.r2, "r3": r.r3, "r4": r.r4})
    for k in range(4):
        row[f"n{k + 1}"] = r.region_counts[k]
        row[f"x{k + 1}"] = r.exit_counts[k]
    row["sub_r2_to_3"] = r.sub_rates.get((2, 3))
    row["sub_r2_to_4"] = r.sub_rates.get((2, 4))
    row["sub_r4_to_1"] = r.sub_rates.get((4, 1))
    row["sub_r4_to_2"] = r.sub_rates.get((4, 2))
    row["r3_low_confidence"] = r.r3_low_confidence
    for i, name in enumerate(("1", "2", "3", "4", "5", "gt5")):
        row[f"hist_emp_{name}"] = (None if not res.hist_empirical.defined
                                   else res.hist_empirical.bins[i])
        row[f"hist_est_{name}"] = (None if not res.hist_estimated.defined
                                   else res.hist_estimated.bins[i])
    row["mean_laminar_emp"] = res.mean_laminar_emp
    row["mean_laminar_rate"] = res.mean_laminar_rate
    row["n_events"] = res.n_events
    return row


def _run_tent_point(config, params, seed, row):
    tent = TentParams(a=params["a"], eps=params["eps"])
    rng = np.random.default_rng(seed)
    x0 = float(np.clip(params["x0"] * (1 + 1e-3 * rng.standard_normal()), 0, 1))
    y0 = float(np.clip(params["y0"] * (1 + 1e-3 * rng.standard_normal()), 0, 1))
    steps = config.map_steps * config.scale_factor()
    transient = config.map_transient
    theta = iterate_coupled_tent(tent, x0, y0, steps, transient)
    # the partition is fixed at theta = 0: in sync iff |theta| < 1/2
    res = analyze_return_map(return_map_from_theta(theta, center=0.0),
                             sync=gamma_index(np.pi * theta))
    _fill_from_result(row, res)
    if config.with_lyapunov:
        row["lambda_perp_analytic"] = lambda_perp(params["a"], params["eps"])
        row["lambda_perp_numerical"] = numerical_lambda_perp(
            params["a"], params["eps"], n_iter=1_000_000, seed=seed)
    return row


def _rossler_phases(params, bidirectional, n_cycles, seed):
    if bidirectional:
        p = RosslerParams(omega1=params["omega1"], omega2=params["omega2"],
                          eps1=params["eps"], eps2=params["eps"])
    else:
        p = RosslerParams(omega1=params["omega1"], omega2=params["omega2"],
                          eps1=0.0, eps2=params["eps"])
    period = 2 * np.pi / (min(params["omega1"], params["omega2"]) + 0.04)
    cfg = IntegratorConfig(dt=_FLOW_DT, n_steps=_flow_steps(n_cycles, period, 500.0),
                           transient_steps=int(500.0 / _FLOW_DT), seed=seed,
                           record_stride=10)
    traj = integrate_rossler(p, cfg)
    ph_x = PhaseSeries(protophase(traj[:, 0], traj[:, 1]), cfg.dt_recorded)
    ph_y = PhaseSeries(protophase(traj[:, 3], traj[:, 4]), cfg.dt_recorded)
    return ph_x, ph_y


def _lorenz_phases(params, n_cycles, seed):
    p = LorenzParams(gamma1=params["gamma1"], gamma2=params["gamma2"],
                     eps=params["eps"])
    cfg = IntegratorConfig(dt=_FLOW_DT, n_steps=_flow_steps(n_cycles, 0.63, 500.0),
                           transient_steps=int(500.0 / _FLOW_DT), seed=seed,
                           record_stride=2)
    traj = integrate_lorenz(p, cfg)
    ref1 = lorenz_fixed_point(p, 1)
    ref2 = lorenz_fixed_point(p, 2)
    ph_x = PhaseSeries(phase_lorenz(traj[:, 0], traj[:, 1], traj[:, 2], ref1),
                       cfg.dt_recorded)
    ph_y = PhaseSeries(phase_lorenz(traj[:, 3], traj[:, 4], traj[:, 5], ref2),
                       cfg.dt_recorded)
    return ph_x, ph_y


def _hh_phases(params, sim_ms, seed):
    p = HHParams(gsyn1=params["gsyn1"], gsyn2=params["gsyn2"],
                 i0=params["i0"], noise_std=params["noise_std"])
    dt = 0.01  # ms
    cfg = IntegratorConfig(dt=dt, n_steps=int((sim_ms + 500.0) / dt),
                           transient_steps=int(500.0 / dt),
                           method="euler-maruyama", seed=seed, record_stride=1)
    traj = integrate_hh(p, cfg)
    ph_x = hilbert_phase_pipeline(traj[:, 0], dt * 1e-3, 30.0, 80.0, decimate=10)
    ph_y = hilbert_phase_pipeline(traj[:, 5], dt * 1e-3, 30.0, 80.0, decimate=10)
    return ph_x, ph_y


def run_point(config: ExperimentConfig, index: int) -> dict:
    """Simulate and analyze one sweep point; failures land in the error
    column and never abort the sweep."""
    seed = point_seed(config.seed, index)
    row = _empty_row(config, index, seed)
    params = config.resolved_params(index)
    try:
        if config.system == "tent":
            return _run_tent_point(config, params, seed, row)
        if config.system in ("rossler-bi", "rossler-uni"):
            n_cycles = (config.n_cycles or 20_000) * config.scale_factor()
            ph_x, ph_y = _rossler_phases(params, config.system == "rossler-bi",
                                         n_cycles, seed)
        elif config.system == "lorenz":
            n_cycles = (config.n_cycles or 50_000) * config.scale_factor()
            ph_x, ph_y = _lorenz_phases(params, n_cycles, seed)
        else:
            sim_ms = (config.sim_ms or 120_000.0) * config.scale_factor()
            ph_x, ph_y = _hh_phases(params, sim_ms, seed)
        res = analyze_pipeline(ph_x, ph_y, checkpoint=config.checkpoint,
                               n_surrogates=config.n_surrogates, seed=seed)
        _fill_from_result(row, res)
    except NoLockingError as exc:
        row["error"] = f"no overall locking: {exc}"
    except (NoPreferredAngleError, DivergenceError, ValueError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _point_task(args):
    config, index = args
    return run_point(config, index)


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_rows(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(ANALYSIS_COLUMNS)
        for row in rows:
            w.writerow([format_value(row[c]) for c in ANALYSIS_COLUMNS])


def read_rows(path):
    """Parse a sweep CSV back into typed row dicts ('' -> None)."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != ANALYSIS_COLUMNS:
            raise ConfigError(f"{path} is not a sweep result file")
        for raw in reader:
            row = {}
            for key, text in raw.items():
                if text == "" or text is None:
                    row[key] = None
                elif key in ("system", "preset", "sweep_param", "params", "error"):
                    row[key] = text
                elif key in ("significant", "r3_low_confidence"):
                    row[key] = text == "true"
                elif key in ("point_index", "master_seed", "point_seed", "n_strobes",
                             "n1", "n2", "n3", "n4", "x1", "x2", "x3", "x4",
                             "n_events"):
                    row[key] = int(text)
                else:
                    row[key] = float(text)
            out.append(row)
    return out


def run_sweep(config: ExperimentConfig, out_path=None, workers: int = 1,
              progress=None):
    """Run every sweep point and return the rows in sweep order.

    With workers > 1 the points execute in a process pool; output order
    and content are identical to the serial run because every point is
    seeded independently of scheduling.
    """
    tasks = [(config, i) for i in range(len(config.sweep_values))]
    if workers > 1:
        with get_context("spawn").Pool(workers) as pool:
            rows = pool.map(_point_task, tasks)
    else:
        rows = []
        for t in tasks:
            rows.append(_point_task(t))
            if progress is not None:
                progress(t[1], len(tasks))
    if out_path is not None:
        write_rows(out_path, rows)
    return rows


# ---------------------------------------------------------------------------
# file analysis


def _load_two_channels(path):
    from .models.io import load_trajectory_bin, load_trajectory_csv
    with open(path, "rb") as fh:
        is_binary = fh.read(5) == b"PHLK1"
    names, t0, dt, data = (load_trajectory_bin(path) if is_binary
                           else load_trajectory_csv(path))
    if data.shape[1] < 2:
        raise ConfigError(f"{path} has {data.shape[1]} channel(s); need two")
    return names[:2], dt, data[:, 0], data[:, 1]


def analyze_file(in_path, out_prefix, signal_kind: str = "phases",
                 band=None, checkpoint: float = 0.0, n_surrogates: int = 150,
                 seed: int = 0, decimate: int = 1):
    """Analyze a two-channel series from disk.

    ``signal_kind`` is "phases" for wrapped-phase channels or "raw" for
    oscillatory signals, which go through the optional band-pass and the
    analytic-signal phase. Writes the one-row result CSV plus the labeled
    return map (for external plotting) under ``out_prefix``; returns the
    row. A failed locking gate is a regular outcome recorded in the row.
    """
    names, dt, ch1, ch2 = _load_two_channels(in_path)
    if signal_kind == "raw":
        lo, hi = band if band is not None else (None, None)
        if band is not None:
            ph_x = hilbert_phase_pipeline(ch1, dt, lo, hi, decimate=decimate)
            ph_y = hilbert_phase_pipeline(ch2, dt, lo, hi, decimate=decimate)
        else:
            from .phase import analytic_signal, instantaneous_phase
            from .core import RAW
            if decimate > 1:
                ch1, ch2, dt = ch1[::decimate], ch2[::decimate], dt * decimate
            ph_x = instantaneous_phase(analytic_signal(PhaseSeries(ch1, dt, RAW)))
            ph_y = instantaneous_phase(analytic_signal(PhaseSeries(ch2, dt, RAW)))
    elif signal_kind == "phases":
        ph_x = PhaseSeries(wrap_angle(ch1), dt)
        ph_y = PhaseSeries(wrap_angle(ch2), dt)
    else:
        raise ConfigError(f"signal_kind must be 'phases' or 'raw', got {signal_kind!r}")

    row = {c: None for c in ANALYSIS_COLUMNS}
    row.update({
        "system": f"file:{names[0]}/{names[1]}", "preset": "",
        "point_index": 0, "sweep_param": "", "sweep_value": None,
        "params": f"checkpoint={checkpoint};signal_kind={signal_kind}"
                  + (f";band={band[0]}-{band[1]}" if band else ""),
        "master_seed": seed, "point_seed": seed,
    })
    rmap = None
    try:
        res = analyze_pipeline(ph_x, ph_y, checkpoint=checkpoint,
                               n_surrogates=n_surrogates, seed=seed)
        _fill_from_result(row, res)
        rmap = res.return_map
    except NoLockingError as exc:
        row["error"] = f"no overall locking: {exc}"
    except NoPreferredAngleError as exc:
        row["error"] = f"NoPreferredAngleError: {exc}"

    out_prefix = os.fspath(out_prefix)
    write_rows(out_prefix + ".csv", [row])
    if rmap is not None:
        with open(out_prefix + "_map.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["chi_i", "chi_next", "region"])
            pts = rmap.points
            for k in range(rmap.n_points):
                w.writerow([repr(float(pts[k, 0])), repr(float(pts[k, 1])),
                            int(rmap.labels[k])])
    return row


# ---------------------------------------------------------------------------
# config files


_CONFIG_SPEC = {
    "experiment": {"system", "preset", "seed", "scale", "surrogates", "checkpoint"},
    "sweep": {"param", "values", "start", "stop", "step", "paired_param",
              "paired_values"},
    "params": None,  # validated against the system's parameter set
    "simulation": {"cycles", "map_steps", "map_transient", "sim_ms"},
}


def config_from_file(path) -> ExperimentConfig:
    """Parse the sectioned key-value experiment format (see README).

    Unknown sections or keys are errors: a config that is not understood
    completely is not run at all.
    """
    import configparser

    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    for section in cp.sections():
        if section not in _CONFIG_SPEC:
            raise ConfigError(f"unknown config section [{section}]")
        allowed = _CONFIG_SPEC[section]
        if allowed is not None:
            unknown = set(cp[section]) - allowed
            if unknown:
                raise ConfigError(
                    f"unknown key(s) in [{section}]: {sorted(unknown)}")

    exp = cp["experiment"] if cp.has_section("experiment") else {}
    preset_name = exp.get("preset")
    seed = int(exp.get("seed", 0))
    scale = exp.get("scale", "desk")
    if preset_name:
        from .presets import get_preset
        base = get_preset(preset_name).build(seed=seed, scale=scale)
        if cp.has_section("sweep") or cp.has_section("params"):
            raise ConfigError("a preset config cannot also define sweep/params")
        return base

    if "system" not in exp:
        raise ConfigError("[experiment] must name a system (or a preset)")
    if not cp.has_section("sweep"):
        raise ConfigError("a non-preset config needs a [sweep] section")
    sw = cp["sweep"]
    if "param" not in sw:
        raise ConfigError("[sweep] must name the swept parameter")
    if "values" in sw:
        values = tuple(float(v) for v in sw["values"].replace(",", " ").split())
    elif {"start", "stop", "step"} <= set(sw):
        start, stop, step = (float(sw[k]) for k in ("start", "stop", "step"))
        if step <= 0:
            raise ConfigError("sweep step must be positive")
        n = int(round((stop - start) / step)) + 1
        values = tuple(float(v) for v in np.round(np.linspace(start, stop, n), 12))
    else:
        raise ConfigError("[sweep] needs either values or start/stop/step")
    paired_param = sw.get("paired_param")
    paired_values = tuple(
        float(v) for v in sw.get("paired_values", "").replace(",", " ").split())

    params = {}
    if cp.has_section("params"):
        for key, val in cp["params"].items():
            params[key] = float(val)

    sim = cp["simulation"] if cp.has_section("simulation") else {}
    kwargs = {}
    if "cycles" in sim:
        kwargs["n_cycles"] = int(sim["cycles"])
    if "map_steps" in sim:
        kwargs["map_steps"] = int(sim["map_steps"])
    if "map_transient" in sim:
        kwargs["map_transient"] = int(sim["map_transient"])
    if "sim_ms" in sim:
        kwargs["sim_ms"] = float(sim["sim_ms"])

    return ExperimentConfig(
        system=exp["system"], sweep_param=sw["param"], sweep_values=values,
        params=params, seed=seed, scale=scale,
        n_surrogates=int(exp.get("surrogates", 150)),
        checkpoint=float(exp.get("checkpoint", 0.0)),
        paired_param=paired_param or None,
        paired_values=paired_values,
        **kwargs,
    )
