"""Figure rendering for sweep results.

Renders the standard report figures from a sweep CSV (or in-memory rows)
to PNG files next to the delimited output. Purely presentational: every
number shown is already in the CSV.
"""

from __future__ import annotations

import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .sweep import read_rows  # noqa: E402

_RATE_STYLES = {"r1": "o-", "r2": "s-", "r3": "^-", "r4": "v-"}
_BIN_LABELS = ("1", "2", "3", "4", "5", ">5")


def _series_groups(rows):
    """Group rows by the paired parameter (if any) for overlaid curves."""
    groups = defaultdict(list)
    for row in rows:
        params = dict(p.split("=", 1) for p in (row["params"] or "").split(";") if p)
        sweep_param = row["sweep_param"]
        tag_items = [f"{k}={v}" for k, v in sorted(params.items())
                     if k != sweep_param]
        groups[", ".join(tag_items)].append(row)
    for key in groups:
        groups[key].sort(key=lambda r: r["sweep_value"])
    return groups


def rates_figure(rows, path):
    """Transition rates and locking index against the sweep variable."""
    groups = _series_groups(rows)
    fig, (ax_r, ax_g) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
    for tag, grp in groups.items():
        xs = [r["sweep_value"] for r in grp]
        for rate, style in _RATE_STYLES.items():
            ys = [r[rate] if r[rate] is not None else float("nan") for r in grp]
            label = rate if not tag else f"{rate} ({tag})"
            ax_r.plot(xs, ys, style, ms=3, lw=1, label=label)
        gam = [r["gamma"] if r["gamma"] is not None else float("nan") for r in grp]
        ax_g.plot(xs, gam, "o-", ms=3, lw=1, label=f"gamma {tag}".strip())
    ax_r.set_ylabel("transition rate")
    ax_r.set_ylim(-0.02, 1.02)
    ax_r.legend(fontsize=7, ncol=2)
    ax_g.set_ylabel("locking index")
    ax_g.set_ylim(-0.02, 1.02)
    ax_g.set_xlabel(rows[0]["sweep_param"])
    ax_g.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def histogram_figure(rows, path):
    """Duration-bin frequencies (empirical solid, rate-estimated dashed)."""
    groups = _series_groups(rows)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for g_idx, (tag, grp) in enumerate(groups.items()):
        xs = [r["sweep_value"] for r in grp]
        for i, name in enumerate(("1", "2", "3", "4", "5", "gt5")):
            emp = [r[f"hist_emp_{name}"] if r[f"hist_emp_{name}"] is not None
                   else float("nan") for r in grp]
            est = [r[f"hist_est_{name}"] if r[f"hist_est_{name}"] is not None
                   else float("nan") for r in grp]
            color = colors[i % len(colors)]
            label = f"{_BIN_LABELS[i]} cycles" if g_idx == 0 else None
            ax.plot(xs, emp, "-", color=color, lw=1.2, label=label)
            ax.plot(xs, est, "--", color=color, lw=0.8)
    ax.set_xlabel(rows[0]["sweep_param"])
    ax.set_ylabel("relative frequency")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=7, title="duration (solid: observed,\ndashed: from rates)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def exponent_figure(rows, path):
    """Rates against the transversal exponent (grid presets only)."""
    fig, axes = plt.subplots(2, 2, figsize=(8, 6), sharex=True)
    lam = [r["lambda_perp_numerical"] for r in rows]
    for ax, rate in zip(axes.ravel(), ("r1", "r2", "r3", "r4")):
        ys = [r[rate] if r[rate] is not None else float("nan") for r in rows]
        ax.plot(lam, ys, "o", ms=3)
        ax.set_ylabel(rate)
        ax.set_ylim(-0.02, 1.02)
    for ax in axes[1]:
        ax.set_xlabel("transversal exponent")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_report(rows_or_csv, out_dir=None, stem=None):
    """Render every figure applicable to a sweep result.

    Returns the list of written files. Accepts a CSV path (figures land
    beside it by default) or parsed rows (out_dir and stem required).
    """
    if isinstance(rows_or_csv, (str, os.PathLike)):
        rows = read_rows(rows_or_csv)
        base = os.path.splitext(os.fspath(rows_or_csv))[0]
        if out_dir is not None:
            base = os.path.join(out_dir, os.path.basename(base))
    else:
        rows = list(rows_or_csv)
        if out_dir is None or stem is None:
            raise ValueError("out_dir and stem are required for in-memory rows")
        base = os.path.join(out_dir, stem)
    if not rows:
        raise ValueError("no rows to render")
    os.makedirs(os.path.dirname(base) or ".", exist_ok=True)
    written = [rates_figure(rows, base + "_rates.png")]
    if any(r.get("hist_emp_1") is not None for r in rows):
        written.append(histogram_figure(rows, base + "_histogram.png"))
    if any(r.get("lambda_perp_numerical") is not None for r in rows):
        written.append(exponent_figure(rows, base + "_exponents.png"))
    return written
