"""Confidence-driven business cycles: a mean-field consumption map with
technology shocks, its phase diagram, crisis/recovery rates and the
implied inflation dynamics."""

__version__ = "0.1.0"

from .errors import (
    BasinError,
    ConfigError,
    DegenerateRootError,
    DomainError,
    FitError,
    InsufficientTransitions,
    NonConvergence,
    NumericError,
    NumericOverflow,
    OnBoundary,
    PhaseError,
    SpiritsError,
)
from .micro import (
    Equilibrium,
    FirmParams,
    Preferences,
    closed_form_consumption,
    invert_confidence,
    solve_equilibrium,
    taylor_rate,
)
from .feedback import (
    FixedPointSet,
    MapParams,
    Phase,
    PhaseDiagram,
    Root,
    boundary_exact_a,
    boundary_hyperbola,
    boundary_tangency,
    fixed_points,
    g_eval,
    g_prime,
    h_eval,
    h_prime,
    max_h_prime,
    phase_diagram_scan,
)
from .shocks import ShockParams, ShockPath, ShockStream, correlation_time, mix64, sample_path
from .dynamics import (
    SimConfig,
    Trajectory,
    classify_basins,
    gap_variance_prediction,
    histogram,
    histogram_modes,
    simulate,
)
from .rare_events import (
    BarrierFit,
    Direction,
    PotentialProfile,
    RateEstimate,
    arrhenius_fit,
    auto_sigma_grid,
    barrier_vs_c0,
    kramers_rate,
    kramers_slope,
    measure_barrier,
    potential,
    rate_scan,
    residence_times,
)
from .inflation import (
    InflationPath,
    PolicyParams,
    crisis_inflation_correction,
    expected_gap_path,
    inflation_now,
    inflation_path,
)
from .config import RunConfig, parse_config
