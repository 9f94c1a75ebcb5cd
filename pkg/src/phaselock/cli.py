"""Command-line entry points.

Subcommands:
  presets    list the named experiments and their figure mapping
  sweep      run a preset or config-file sweep, emit the result CSV
  analyze    run the phase pipeline on a two-channel data file
  simulate   dump a raw trajectory for one system
  report     render the report figures from an existing sweep CSV

Exit codes: 0 success, 2 configuration error, 3 data error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phaselock",
        description="First-return-map analysis of intermittent phase locking.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_presets = sub.add_parser("presets", help="list the named experiments")
    p_presets.set_defaults(func=_cmd_presets)

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep")
    p_sweep.add_argument("--preset", help="named experiment to run")
    p_sweep.add_argument("--config", help="experiment config file")
    p_sweep.add_argument("--seed", type=int, default=0, help="master seed")
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.add_argument("--scale", choices=("desk", "full"), default="desk")
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--figures", action="store_true",
                         help="render report figures next to the CSV")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_an = sub.add_parser("analyze", help="analyze a two-channel data file")
    p_an.add_argument("--in", dest="in_path", required=True,
                      help="two-channel CSV or PHLK1 binary file")
    p_an.add_argument("--out", required=True,
                      help="output prefix (<out>.csv, <out>_map.csv)")
    p_an.add_argument("--signal-kind", choices=("phases", "raw"),
                      default="phases")
    p_an.add_argument("--band", help="band-pass LO,HI in Hz for raw signals")
    p_an.add_argument("--decimate", type=int, default=1)
    p_an.add_argument("--checkpoint", type=float, default=0.0)
    p_an.add_argument("--surrogates", type=int, default=150,
                      help="0 disables the significance gate")
    p_an.add_argument("--seed", type=int, default=0)
    p_an.set_defaults(func=_cmd_analyze)

    p_sim = sub.add_parser("simulate", help="dump a trajectory")
    p_sim.add_argument("--system", required=True,
                       choices=("tent", "rossler-bi", "rossler-uni", "lorenz", "hh"))
    p_sim.add_argument("--param", action="append", default=[],
                       metavar="NAME=VALUE", help="system parameter override")
    p_sim.add_argument("--steps", type=int, help="total steps (maps/flows)")
    p_sim.add_argument("--ms", type=float, help="simulated milliseconds (hh)")
    p_sim.add_argument("--transient", type=int, default=0,
                       help="steps discarded before recording")
    p_sim.add_argument("--stride", type=int, default=1,
                       help="record every N-th step")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", required=True)
    p_sim.add_argument("--format", choices=("csv", "bin"), default="csv")
    p_sim.set_defaults(func=_cmd_simulate)

    p_rep = sub.add_parser("report", help="render figures from a sweep CSV")
    p_rep.add_argument("--in", dest="in_path", required=True)
    p_rep.add_argument("--out-dir", help="directory for the figures "
                       "(default: beside the CSV)")
    p_rep.set_defaults(func=_cmd_report)
    return parser


def _cmd_presets(args) -> int:
    from .presets import PRESETS
    width = max(len(name) for name in PRESETS)
    for name in sorted(PRESETS):
        p = PRESETS[name]
        print(f"{name:<{width}}  [{p.figure}]")
        print(f"{'':<{width}}  {p.description}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    from .presets import get_preset
    from .sweep import ConfigError, config_from_file, run_sweep
    if bool(args.preset) == bool(args.config):
        raise ConfigError("give exactly one of --preset or --config")
    if args.preset:
        config = get_preset(args.preset).build(seed=args.seed, scale=args.scale)
    else:
        config = config_from_file(args.config)
        if args.seed != 0 or args.scale != "desk":
            from dataclasses import replace
            config = replace(config, seed=args.seed if args.seed else config.seed,
                             scale=args.scale)
    rows = run_sweep(config, out_path=args.out, workers=args.workers)
    n_failed = sum(1 for r in rows if r["error"])
    print(f"wrote {len(rows)} rows to {args.out}"
          + (f" ({n_failed} with per-point errors)" if n_failed else ""))
    if args.figures:
        from .report import render_report
        for f in render_report(args.out):
            print(f"wrote {f}")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    from .sweep import analyze_file
    band = None
    if args.band:
        try:
            lo, hi = (float(v) for v in args.band.split(","))
        except ValueError:
            from .sweep import ConfigError
            raise ConfigError(f"--band expects LO,HI in Hz, got {args.band!r}")
        band = (lo, hi)
    row = analyze_file(args.in_path, args.out, signal_kind=args.signal_kind,
                       band=band, checkpoint=args.checkpoint,
                       n_surrogates=args.surrogates, seed=args.seed,
                       decimate=args.decimate)
    if row["error"]:
        print(f"result: {row['error']}")
    else:
        rates = tuple(row[k] for k in ("r1", "r2", "r3", "r4"))
        print(f"gamma={row['gamma']:.4f} n_strobes={row['n_strobes']} "
              f"rates={rates}")
    print(f"wrote {args.out}.csv")
    return EXIT_OK


def _parse_params(pairs):
    from .sweep import ConfigError
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"--param expects NAME=VALUE, got {pair!r}")
        key, val = pair.split("=", 1)
        try:
            out[key.strip()] = float(val)
        except ValueError:
            raise ConfigError(f"parameter {key!r} has non-numeric value {val!r}")
    return out


def _cmd_simulate(args) -> int:
    from .models import (HHParams, IntegratorConfig, LorenzParams,
                         RosslerParams, TentParams, integrate_hh,
                         integrate_lorenz, integrate_rossler,
                         iterate_coupled_tent)
    from .models.io import save_trajectory_bin, save_trajectory_csv
    from .sweep import ConfigError

    params = _parse_params(args.param)

    def take(name, default):
        return params.pop(name, default)

    if args.system == "tent":
        steps = args.steps or 350_000
        tent = TentParams(a=take("a", 0.3), eps=take("eps", 0.1))
        x0, y0 = take("x0", 0.21), take("y0", 0.67)
        if params:
            raise ConfigError(f"unknown parameter(s): {sorted(params)}")
        theta, xy = iterate_coupled_tent(tent, x0, y0, steps, args.transient,
                                         keep_xy=True)
        data = np.column_stack([xy, theta])[::args.stride]
        names, dt = ["x", "y", "theta"], float(args.stride)
    elif args.system in ("rossler-bi", "rossler-uni"):
        steps = args.steps or 200_000
        eps = take("eps", 0.02)
        if args.system == "rossler-bi":
            p = RosslerParams(omega1=take("omega1", 1.015),
                              omega2=take("omega2", 0.985), eps1=eps, eps2=eps)
        else:
            p = RosslerParams(omega1=take("omega1", 1.0),
                              omega2=take("omega2", 0.95), eps1=0.0, eps2=eps)
        if params:
            raise ConfigError(f"unknown parameter(s): {sorted(params)}")
        cfg = IntegratorConfig(dt=0.01, n_steps=steps, transient_steps=args.transient,
                               seed=args.seed, record_stride=args.stride)
        data = integrate_rossler(p, cfg)
        names, dt = ["x1", "y1", "z1", "x2", "y2", "z2"], cfg.dt_recorded
    elif args.system == "lorenz":
        steps = args.steps or 200_000
        p = LorenzParams(gamma1=take("gamma1", 1.5), gamma2=take("gamma2", -1.5),
                         eps=take("eps", 9.0))
        if params:
            raise ConfigError(f"unknown parameter(s): {sorted(params)}")
        cfg = IntegratorConfig(dt=0.01, n_steps=steps, transient_steps=args.transient,
                               seed=args.seed, record_stride=args.stride)
        data = integrate_lorenz(p, cfg)
        names, dt = ["x1", "y1", "z1", "x2", "y2", "z2"], cfg.dt_recorded
    else:
        sim_ms = args.ms or 10_000.0
        p = HHParams(gsyn1=take("gsyn1", 0.1), gsyn2=take("gsyn2", 0.1),
                     i0=take("i0", 10.0), noise_std=take("noise_std", 0.0))
        if params:
            raise ConfigError(f"unknown parameter(s): {sorted(params)}")
        cfg = IntegratorConfig(dt=0.01, n_steps=int(sim_ms / 0.01),
                               transient_steps=args.transient,
                               method="euler-maruyama", seed=args.seed,
                               record_stride=args.stride)
        data = integrate_hh(p, cfg)
        names = ["v1", "m1", "h1", "n1", "s1", "v2", "m2", "h2", "n2", "s2"]
        dt = cfg.dt_recorded

    if args.format == "bin":
        save_trajectory_bin(args.out, names, data, t0=0.0, dt=dt)
    else:
        save_trajectory_csv(args.out, names, data, t0=0.0, dt=dt)
    print(f"wrote {data.shape[0]} states to {args.out}")
    return EXIT_OK


def _cmd_report(args) -> int:
    from .report import render_report
    for f in render_report(args.in_path, out_dir=args.out_dir):
        print(f"wrote {f}")
    return EXIT_OK


def main(argv=None) -> int:
    from .analysis import InsufficientDataError
    from .models.integrators import DivergenceError
    from .models.io import TrajectoryFormatError
    from .sweep import ConfigError

    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TrajectoryFormatError, InsufficientDataError, FileNotFoundError,
            OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (DivergenceError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
