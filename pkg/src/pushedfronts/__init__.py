"""Numerical laboratory for pushed travelling waves under demographic noise.

The package builds wave profiles of the bistable reaction-advection
equation, evaluates the front-fluctuation constants of the limiting
drift-diffusion law through two independent routes, exposes the linearised
semigroup and its diffusion dual, and simulates the noisy front at finite
population density to compare ensemble statistics against the constants.
"""

__version__ = "0.1.0"

from .constants import (
    FrontConstants,
    SweepConfig,
    betaln,
    compute_A1,
    compute_A2,
    compute_mu_sigma,
    sweep,
)
from .errors import (
    BasinEscapeError,
    ConfigRejectedError,
    ConvergenceError,
    DivergentIntegralError,
    DomainError,
    FarFromManifoldError,
    GridMismatchError,
    InstabilityError,
    NoConnectionError,
    NotPushedError,
    NumericalError,
    OutOfDomainError,
    ParameterError,
    RegimeError,
    ResolutionError,
    StatisticsError,
    TruncationError,
    UndersamplingError,
    UnsupportedReactionError,
)
from .grids import Field, Grid1D, same_grid
from .linearized import (
    LinearOperator,
    PropagatorState,
    build_operator,
    dual_diffusion_simulate,
    dual_drift,
    duality_cross_check,
    kernel_columns,
    kernel_dt_factor,
    kernel_h_factor,
    op_dt_default,
    propagate,
    semigroup_compose_check,
    spectral_gap,
    stationary_density,
    zero_mode,
)
from .manifold import (
    FermiDecomposition,
    FlowState,
    dist_to_manifold,
    fermi_eta,
    flow_step,
    katzenberger_zeta,
    newton_shift_derivative,
)
from .profile import (
    WaveProfile,
    analytic_profile,
    decay_rates,
    ode_residual,
    profile_residual,
    solve_profile_bvp,
    validate_alpha,
)
from .reaction import (
    FULLY_PUSHED,
    OUT_OF_RANGE,
    SEMI_PUSHED,
    ReactionTerm,
    cubic_term,
    f_derivatives,
    f_eval,
    potential_F,
    tabulated_term,
    validate_pushed,
)
from .spde import (
    EnsembleStats,
    FrontSeries,
    SpdeConfig,
    build_initial_condition,
    ensemble_statistics,
    run_ensemble,
    run_replicate,
    spde_step,
    track_R,
    track_rN,
)
from .weighted import (
    WeightSpec,
    energy,
    energy_gradient,
    inner_alpha,
    mollify,
    norm_Hn,
    norm_pq,
    profile_power_integral,
    sup_weighted,
)

__all__ = [name for name in dir() if not name.startswith("_")]
