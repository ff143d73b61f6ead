"""First Dirichlet eigenvalues of CD(K,N) model densities, with comparison
and rigidity checks, closed-form bounds, and warped-compactification mass
bounds built on top of them."""

__version__ = "0.1.0"

from .errors import CdeigenError, NonconvergenceError, PreconditionError
from .modelspace import (
    CdCheckReport,
    Density,
    ModelParams,
    check_cd_density,
    max_diameter,
    model_density,
    s_kappa,
    s_kappa_prime,
    sigma_coeff,
    tau_coeff,
)
from .eigensolve import (
    EigenSolution,
    GridSpec,
    WeightedEigenProblem,
    assemble_weighted_problem,
    first_dirichlet_eigen,
    flux_identity_residual,
    shoot_eigen,
    weighted_integral,
)
from .bounds import (
    BoundValue,
    bessel_first_zero,
    bessel_j,
    closed_form_bound,
    essential_spectrum_threshold,
    neumann_upper_bound,
)
from .comparison import (
    ComparisonReport,
    RigidityVerdict,
    cd_density_family,
    comparison_residual,
    composed_tolerance,
    rigidity_check,
)
from .physics import (
    CompactificationSpec,
    KkBoundResult,
    kk_curvature,
    kk_mass_bound_at,
    kk_mass_bound_optimal,
    weighted_laplacian_apply,
)

__all__ = [
    "__version__",
    "CdeigenError",
    "NonconvergenceError",
    "PreconditionError",
    "CdCheckReport",
    "Density",
    "ModelParams",
    "check_cd_density",
    "max_diameter",
    "model_density",
    "s_kappa",
    "s_kappa_prime",
    "sigma_coeff",
    "tau_coeff",
    "EigenSolution",
    "GridSpec",
    "WeightedEigenProblem",
    "assemble_weighted_problem",
    "first_dirichlet_eigen",
    "flux_identity_residual",
    "shoot_eigen",
    "weighted_integral",
    "BoundValue",
    "bessel_first_zero",
    "bessel_j",
    "closed_form_bound",
    "essential_spectrum_threshold",
    "neumann_upper_bound",
    "ComparisonReport",
    "RigidityVerdict",
    "cd_density_family",
    "comparison_residual",
    "composed_tolerance",
    "rigidity_check",
    "CompactificationSpec",
    "KkBoundResult",
    "kk_curvature",
    "kk_mass_bound_at",
    "kk_mass_bound_optimal",
    "weighted_laplacian_apply",
]
