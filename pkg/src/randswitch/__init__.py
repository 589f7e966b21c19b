"""Random switching between vector fields: simulation and stability.

Simulates piecewise-deterministic Markov processes built from a finite
family of vector fields with a common zero, estimates the top Lyapunov
exponent of the switched linearization by Monte-Carlo, and runs
persistence/extinction diagnostics on the sampled paths.
"""

from .matrixcore import (
    spectral_abscissa, is_metzler, is_hurwitz, is_irreducible,
    stationary_distribution, perron_vector, hilbert_metric,
    birkhoff_contraction, part_metric, growth_rate_bounds,
    trace_lower_bound, mierczynski_bound_2d,
)
from .vectorfields import (
    VectorField, SISField, SwitchedFieldFamily, jacobian_at_zero,
    average_field, check_epidemic, endemic_equilibrium,
)
from .engine import (
    SwitchedSystem, Trajectory, IntegratorConfig, InvarianceError,
    integrate_flow, simulate, simulate_mode_chain,
    simulate_synchronous_pair, trajectory_to_csv, derive_seed,
)
from .lyapunov import (
    LinearSwitchedSystem, GrowthRateEstimate, angular_drift,
    simulate_angular, estimate_lambda_angular, estimate_lambda_lognorm,
    averaged_limit, lambda_beta_sweep, analytic_bounds,
    hurwitz_hull_check, period_switch_growth,
)
from .persistence import (
    OccupationHistogram, ExtinctionFit, HittingTimeSample,
    occupation_measure, ball_mass, tail_moment, tail_moment_sweep,
    extinction_rate, hitting_times, part_metric_contraction,
)
from .scenarios import registry, run, load_scenario

__version__ = "0.1.0"

__all__ = [
    "spectral_abscissa", "is_metzler", "is_hurwitz", "is_irreducible",
    "stationary_distribution", "perron_vector", "hilbert_metric",
    "birkhoff_contraction", "part_metric", "growth_rate_bounds",
    "trace_lower_bound", "mierczynski_bound_2d",
    "VectorField", "SISField", "SwitchedFieldFamily", "jacobian_at_zero",
    "average_field", "check_epidemic", "endemic_equilibrium",
    "SwitchedSystem", "Trajectory", "IntegratorConfig", "InvarianceError",
    "integrate_flow", "simulate", "simulate_mode_chain",
    "simulate_synchronous_pair", "trajectory_to_csv", "derive_seed",
    "LinearSwitchedSystem", "GrowthRateEstimate", "angular_drift",
    "simulate_angular", "estimate_lambda_angular",
    "estimate_lambda_lognorm", "averaged_limit", "lambda_beta_sweep",
    "analytic_bounds", "hurwitz_hull_check", "period_switch_growth",
    "OccupationHistogram", "ExtinctionFit", "HittingTimeSample",
    "occupation_measure", "ball_mass", "tail_moment", "tail_moment_sweep",
    "extinction_rate", "hitting_times", "part_metric_contraction",
    "registry", "run", "load_scenario",
]
