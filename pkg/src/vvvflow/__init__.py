"""Pseudo-spectral velocity-vorticity solvers on the periodic unit torus.

The package couples a Voigt-regularized momentum equation to a directly
evolved vorticity field, provides the unregularized solver it reduces to,
and ships the diagnostics and convergence studies that verify the model's
structure numerically: the energy identity, exponential decay of the
vorticity divergence, and the O(alpha) closeness of model and reference
solutions.
"""

from .diagnostics import (
    DiagnosticsRecord,
    blow_up_indicator,
    curl_mismatch,
    divergence_decay_rate,
    energy_budget_residual,
    l2_inner,
    sobolev_norm,
)
from .errors import (
    ConfigError,
    DivergedError,
    GridMismatchError,
    SnapshotError,
    SymmetryError,
    VvvflowError,
)
from .experiments import (
    ConvergenceReport,
    Scenario,
    SweepPlan,
    dt_refinement_energy,
    fit_order,
    reduction_check_alpha_zero,
    sweep_alpha_curl_mismatch,
    sweep_alpha_nse_deviation,
)
from .models import (
    NseState,
    SchemeConfig,
    VvvState,
    cfl_advisory,
    init_taylor_green,
    perturbed_divergence_w0,
    random_smooth_velocity,
    run,
    step_nse,
    step_vvv,
)
from .operators import (
    Forcing,
    ModelParams,
    advect,
    cross_term,
    helmholtz_apply,
    helmholtz_invert,
    leray_project,
    nonlinear_terms,
    reconstruct_pressure,
    vorticity_rhs,
    vvv_momentum_rhs,
)
from .spectral import (
    GridSpec,
    SpectralScalarField,
    SpectralVectorField,
    LAMBDA_1,
    curl,
    derivative,
    divergence,
    forward_transform,
    forward_transform_vector,
    gradient,
    inverse_transform,
    inverse_transform_vector,
    laplacian,
    make_grid,
    random_vector_field,
    set_fft_workers,
    stokes_apply,
    zero_scalar,
    zero_vector,
)

__version__ = "0.1.0"
