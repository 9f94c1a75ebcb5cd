"""Generators for the test systems: coupled skew tent maps, coupled
Rossler and Lorenz flows, and two synaptically coupled Hodgkin-Huxley
neurons, plus the fixed-step integrators they share."""

from .tent import TentParams, CoupledMapState, tent_f, coupled_tent_step, iterate_coupled_tent
from .rossler import RosslerParams, rossler_derivs, integrate_rossler, rossler_initial_state
from .lorenz import LorenzParams, lorenz_derivs, integrate_lorenz, lorenz_initial_state
from .hh import HHParams, hh_derivs, integrate_hh, hh_initial_state, h_inf, gating_rates
from .integrators import IntegratorConfig, DivergenceError, integrate
from .io import save_trajectory_csv, load_trajectory_csv, save_trajectory_bin, load_trajectory_bin

__all__ = [
    "TentParams", "CoupledMapState", "tent_f", "coupled_tent_step", "iterate_coupled_tent",
    "RosslerParams", "rossler_derivs", "integrate_rossler", "rossler_initial_state",
    "LorenzParams", "lorenz_derivs", "integrate_lorenz", "lorenz_initial_state",
    "HHParams", "hh_derivs", "integrate_hh", "hh_initial_state", "h_inf", "gating_rates",
    "IntegratorConfig", "DivergenceError", "integrate",
    "save_trajectory_csv", "load_trajectory_csv", "save_trajectory_bin", "load_trajectory_bin",
]
