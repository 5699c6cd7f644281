"""hjlab: gradient-estimate machinery for quasilinear Hamilton-Jacobi equations
on explicit model manifolds, with desk-scale certification of every checkable
inequality (barrier supersolutions, proof constants, Liouville blow-up,
Harnack bounds)."""

from .constants import (
    Exponents,
    ProofConstants,
    barrier_lambda_mu,
    bochner_constants,
    build_constants,
    certify_bochner,
    ellipticity,
    gradient_constant,
    harnack_constant,
    k_constant,
)
from .barrier import (
    BarrierParams,
    CertificationReport,
    GridSpec,
    barrier_eval,
    certify_supersolution,
    hessian_term_upper,
    laplacian_w_upper,
)
from .errors import (
    ConfigurationError,
    ConstraintError,
    DegeneracyError,
    DomainError,
    SolverError,
)
from .estimates import (
    EstimateOutcome,
    LiouvilleReport,
    compare_to_barrier,
    global_gradient_bound,
    harnack_check,
    harnack_sweep,
    hj_residual,
    interior_gradient_bound,
    kotschwar_ni_comparison,
    liouville_sweep,
    log_transform,
    log_transform_inverse,
)
from .geometry import (
    CurvatureData,
    ModelManifold,
    coth,
    hessian_distance_bound,
    laplacian_distance_bound,
    radial_p_laplacian,
    warping,
)
from .radial import (
    RadialField,
    constant_slope_solution,
    fit_flux,
    flat_blowup_radius,
    p_harmonic_energy_minimizer,
    p_harmonic_radial_quadrature,
    solve_radial_hj,
    z_equation_residual,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
