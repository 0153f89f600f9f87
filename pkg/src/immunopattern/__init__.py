"""Three-species tumor-immune reaction-diffusion model with cross-diffusion.

Effector cells, tumor cells and IL-2 react through saturating kinetics and
diffuse on the unit square; a single cross-diffusion coefficient (d32)
couples the tumor gradient into the IL-2 balance.  The package computes
steady states, their linear stability and bifurcations, dispersion
relations for diffusion-driven instability, and runs the explicit
finite-difference simulations that produce the spatial patterns.
"""

__version__ = "0.1.0"

from .kinetics import (ModelParams, ScalingSet, dimensionalize, jacobian,
                       nondimensionalize, preset, reaction_rhs)
from .equilibria import (Equilibrium, cancer_free_equilibrium,
                         coexistence_equilibria, existence_region,
                         quintic_coefficients, routh_first_column)
from .stability import (DispersionResult, HopfResult, classify, critical_d32,
                        diffusion_matrix, dispersion_matrix, dispersion_relation,
                        hopf_scan, stability_sweep)
from .ode import CycleMetrics, Trajectory, cycle_metrics, integrate
from .pde import (FieldGrid, SimConfig, Snapshot, initial_condition, laplacian,
                  nearest_neumann_mode, run, simulate, stable_dt_bound, step)
from .metrics import (PatternReport, pattern_class, pattern_report, probe_series,
                      stationarity_rate)

__all__ = [
    "ModelParams", "ScalingSet", "preset", "reaction_rhs", "jacobian",
    "nondimensionalize", "dimensionalize",
    "Equilibrium", "cancer_free_equilibrium", "coexistence_equilibria",
    "quintic_coefficients", "routh_first_column", "existence_region",
    "DispersionResult", "HopfResult", "classify", "dispersion_matrix",
    "dispersion_relation", "diffusion_matrix", "critical_d32", "hopf_scan",
    "stability_sweep",
    "Trajectory", "CycleMetrics", "integrate", "cycle_metrics",
    "FieldGrid", "SimConfig", "Snapshot", "initial_condition", "laplacian",
    "step", "run", "simulate", "stable_dt_bound", "nearest_neumann_mode",
    "PatternReport", "stationarity_rate", "pattern_class", "probe_series",
    "pattern_report",
]
