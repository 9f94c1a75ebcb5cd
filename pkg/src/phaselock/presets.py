"""Named experiment presets, one per figure-level result.

Desk scale keeps every preset within interactive runtimes; full scale
multiplies the collected cycles tenfold. The coupled-map presets use the
published iteration policy (350 000 iterations, first 50 000 discarded)
at either scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sweep import ConfigError, ExperimentConfig


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    figure: str

    def build(self, seed: int = 0, scale: str = "desk") -> ExperimentConfig:
        return _BUILDERS[self.name](seed, scale)


def _grid(lo, hi, step):
    n = int(round((hi - lo) / step)) + 1
    return tuple(float(v) for v in np.round(np.linspace(lo, hi, n), 10))


def _fig3(seed, scale):
    # (a, k) grid flattened onto the coupling axis: for each skew value the
    # coupling is picked so the transversal exponent equals ln k
    from .lyapunov import eps_for_exponent_factor
    a_values = _grid(0.125, 0.35, 0.025)
    k_values = _grid(1.05, 1.45, 0.05)
    points = []
    for a in a_values:
        for k in k_values:
            points.append((a, eps_for_exponent_factor(a, k)))
    return ExperimentConfig(
        system="tent", sweep_param="eps",
        sweep_values=tuple(eps for _, eps in points),
        params={"a": 0.125},  # overridden per point through paired values
        seed=seed, scale=scale, n_surrogates=0, preset="fig3",
        with_lyapunov=True,
        paired_param="a", paired_values=tuple(a for a, _ in points),
    )


def _fig4(seed, scale):
    # bidirectional Rossler: type-I window below eps_t = 0.0276 plus the
    # eyelet window up to eps_c = 0.0286
    eps = (0.020, 0.022, 0.0235, 0.0248, 0.0258, 0.0266,
           0.0277, 0.0279, 0.0281, 0.0283, 0.0285)
    return ExperimentConfig(
        system="rossler-bi", sweep_param="eps", sweep_values=eps,
        params={"omega1": 1.015, "omega2": 0.985},
        seed=seed, scale=scale, n_surrogates=150, preset="fig4-rossler-type1-eyelet",
        n_cycles=30_000,
    )


def _fig5(seed, scale):
    eps = _grid(0.01, 0.24, 0.01)
    return ExperimentConfig(
        system="tent", sweep_param="eps", sweep_values=eps + eps,
        params={"a": 0.3},
        seed=seed, scale=scale, n_surrogates=0, preset="fig5",
        paired_param="a", paired_values=(0.3,) * len(eps) + (0.7,) * len(eps),
    )


def _fig6(seed, scale):
    return ExperimentConfig(
        system="lorenz", sweep_param="eps",
        sweep_values=(7.5, 8.5, 9.5, 10.5, 11.5),
        params={"gamma1": 1.5, "gamma2": -1.5},
        seed=seed, scale=scale, n_surrogates=150, preset="fig6-lorenz",
        n_cycles=100_000,
    )


def _fig7(seed, scale):
    return ExperimentConfig(
        system="rossler-uni", sweep_param="eps",
        sweep_values=(0.033, 0.035, 0.037, 0.039, 0.041),
        params={"omega1": 0.93, "omega2": 0.95},
        seed=seed, scale=scale, n_surrogates=150, preset="fig7-uni-eyelet",
        n_cycles=30_000,
    )


def _fig8(seed, scale):
    return ExperimentConfig(
        system="rossler-uni", sweep_param="eps",
        sweep_values=(0.112, 0.115, 0.118, 0.121, 0.123),
        params={"omega1": 1.0, "omega2": 0.95},
        seed=seed, scale=scale, n_surrogates=150, preset="fig8-ring",
        n_cycles=20_000,
    )


def _fig9(seed, scale):
    # weak-coupling window where locking is partial and the rates move;
    # the significance gate is off because the regime sits near the gate's
    # own threshold and the figure reports rates across the whole sweep
    return ExperimentConfig(
        system="hh", sweep_param="gsyn2",
        sweep_values=(0.0, 0.002, 0.004, 0.006, 0.008),
        params={"gsyn1": 0.1, "noise_std": 0.0},
        seed=seed, scale=scale, n_surrogates=0, preset="fig9-hh",
        sim_ms=120_000.0,
    )


_BUILDERS = {
    "fig3": _fig3,
    "fig4-rossler-type1-eyelet": _fig4,
    "fig5": _fig5,
    "fig6-lorenz": _fig6,
    "fig7-uni-eyelet": _fig7,
    "fig8-ring": _fig8,
    "fig9-hh": _fig9,
}

PRESETS = {
    "fig3": Preset(
        "fig3",
        "Coupled skew tent maps: transversal-exponent grid (a x k) with "
        "analytic and orbit-averaged exponents plus transition rates.",
        "rates vs transversal exponent"),
    "fig4-rossler-type1-eyelet": Preset(
        "fig4-rossler-type1-eyelet",
        "Bidirectional Rossler pair (omega 1.015/0.985): coupling sweep "
        "through the slip regime below 0.0276 and up to locking at 0.0286.",
        "rates, locking index and duration histogram vs coupling"),
    "fig5": Preset(
        "fig5",
        "Coupled skew tent maps at a = 0.3 and a = 0.7: matched coupling "
        "sweeps with identical stability but distinct rates.",
        "rates vs coupling for the two skew values"),
    "fig6-lorenz": Preset(
        "fig6-lorenz",
        "Bidirectional Lorenz pair (detuning +-1.5): coupling sweep across "
        "the short-desynchronization regime between 7 and 12.",
        "rates, locking index and duration histogram vs coupling"),
    "fig7-uni-eyelet": Preset(
        "fig7-uni-eyelet",
        "Driven Rossler pair (omega 0.93/0.95): coupling sweep through the "
        "rare-slip window between 0.0345 and 0.042.",
        "rates, locking index and duration histogram vs coupling"),
    "fig8-ring": Preset(
        "fig8-ring",
        "Driven Rossler pair (omega 1.0/0.95): coupling sweep through the "
        "persistent-slip window between 0.1097 and 0.124.",
        "rates, locking index and duration histogram vs coupling"),
    "fig9-hh": Preset(
        "fig9-hh",
        "Two inhibitory conductance-based neurons, receiving conductance "
        "0.1 on cell 1: sweep of the conductance onto cell 2, noiseless.",
        "rates and locking index vs synaptic conductance"),
}


def get_preset(name: str) -> Preset:
    if name not in PRESETS:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
    return PRESETS[name]
