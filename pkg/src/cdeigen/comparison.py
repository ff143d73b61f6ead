"""Spectral comparison inequality on weighted intervals, with rigidity.

For any CD(K,N) density h on [0, r0] the model eigenpair (lambda, phi) of
h_{K,N} satisfies

    int_0^theta (phi')^2 h dtheta  <=  lambda * int_0^theta phi^2 h dtheta

for every theta in (0, r0].  Equality at theta = r0 forces h to be a positive
multiple of the model density; ``rigidity_check`` tests for that case by a
least-squares scale fit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from .eigensolve import first_dirichlet_eigen, weighted_integral
from .errors import PreconditionError
from .modelspace import Density, check_cd_density, max_diameter

DEFAULT_SOLVER_TOL = 1e-8
DEFAULT_QUAD_TOL = 1e-10
DEFAULT_LATTICE = (64, 17)
DEFAULT_LATTICE_TOL = 1e-9


def composed_tolerance(solver_tol: float = DEFAULT_SOLVER_TOL,
                       quad_tol: float = DEFAULT_QUAD_TOL) -> float:
    """Worst-case linear accumulation: two integrals plus the eigenvalue."""
    if not solver_tol > 0 or not quad_tol > 0:
        raise PreconditionError("domain", "tolerances must be positive")
    return 2.0 * solver_tol + 10.0 * quad_tol


@dataclass(frozen=True)
class ComparisonReport:
    """Both sides of the comparison inequality at a single theta.

    gap = rhs - lhs is nonnegative (up to tolerance) for CD(K,N) densities;
    relative_gap divides by rhs.
    """

    theta: float
    lhs: float
    rhs: float
    gap: float
    relative_gap: float


@dataclass(frozen=True)
class RigidityVerdict:
    rigid: bool
    fitted_c: float | None
    max_relative_density_deviation: float
    relative_gap: float


@lru_cache(maxsize=64)
def _model_eigen_interpolants(K: float, N: float, r0: float, tol: float):
    sol = first_dirichlet_eigen(Density.model(K, N, right=r0), r0, tol=tol)
    phi = CubicSpline(sol.grid, sol.phi)
    dphi = CubicSpline(sol.grid, sol.dphi)
    return sol.eigenvalue, phi, dphi


def _validate_inputs(h: Density, K: float, N: float, r0: float, theta: float) -> None:
    if not N > 1:
        raise PreconditionError("domain", f"N must exceed 1, got {N}")
    if not 0 < r0 < max_diameter(K, N):
        raise PreconditionError(
            "domain", f"r0 must lie in (0, {max_diameter(K, N)}), got {r0}"
        )
    if not 0 < theta <= r0:
        raise PreconditionError("domain", f"theta must lie in (0, r0], got {theta}")
    if h.right < r0 * (1.0 - 1e-12):
        raise PreconditionError(
            "domain",
            f"density is defined only up to {h.right} < r0 = {r0}; refusing to extrapolate",
        )


def comparison_residual(h: Density, K: float, N: float, r0: float, theta: float,
                        solver_tol: float = DEFAULT_SOLVER_TOL,
                        quad_tol: float = DEFAULT_QUAD_TOL,
                        check_density: bool = True,
                        lattice: tuple[int, int] = DEFAULT_LATTICE,
                        lattice_tol: float = DEFAULT_LATTICE_TOL) -> ComparisonReport:
    """Evaluate both sides of the comparison inequality at theta.

    The eigenpair always comes from the model density h_{K,N}; only the
    measure in the two integrals is the general density h.  Set
    ``check_density=False`` to skip the CD lattice scan (negative testing).
    """
    _validate_inputs(h, K, N, r0, theta)
    if check_density:
        report = check_cd_density(h, K, N, resolution=lattice,
                                  tolerance=lattice_tol,
                                  interval=(0.0, max(theta, r0)))
        if not report.satisfied:
            raise PreconditionError(
                "cd-violation",
                f"density fails CD({K},{N}): worst slack {report.worst_violation:.3e} "
                f"at (theta0, theta1, t) = {report.witness}",
            )
    lam, phi, dphi = _model_eigen_interpolants(float(K), float(N), float(r0),
                                               float(solver_tol))
    lhs = weighted_integral(lambda t: dphi(t) ** 2, h, 0.0, theta, rel_tol=quad_tol)
    rhs = lam * weighted_integral(lambda t: phi(t) ** 2, h, 0.0, theta, rel_tol=quad_tol)
    gap = rhs - lhs
    if rhs <= 0:
        raise PreconditionError("domain", "right-hand integral vanished; degenerate density")
    return ComparisonReport(theta=float(theta), lhs=lhs, rhs=rhs, gap=gap,
                            relative_gap=gap / rhs)


def _deviation_grid(h: Density, r0: float) -> np.ndarray:
    # Sampled densities are compared on their own nodes, where interpolation
    # is exact; anything else gets midpoints of a uniform partition.
    if h.kind == "sampled":
        inside = h.grid[(h.grid > 0.0) & (h.grid < r0)]
        if inside.size >= 8:
            return inside
    edges = np.linspace(0.0, r0, 513)
    return 0.5 * (edges[:-1] + edges[1:])


def rigidity_check(h: Density, K: float, N: float, r0: float, tol: float,
                   solver_tol: float = DEFAULT_SOLVER_TOL,
                   quad_tol: float = DEFAULT_QUAD_TOL,
                   check_density: bool = True,
                   lattice: tuple[int, int] = DEFAULT_LATTICE,
                   lattice_tol: float = DEFAULT_LATTICE_TOL) -> RigidityVerdict:
    """Decide whether h is (numerically) a positive multiple of h_{K,N}.

    A least-squares scale c is fitted on a grid of (0, r0); the verdict is
    rigid when both the sup deviation |h - c h_{K,N}| (relative to the scale
    of c h_{K,N}) and the comparison relative gap at theta = r0 fall within
    tol.
    """
    if not tol > 0:
        raise PreconditionError("domain", f"tol must be positive, got {tol}")
    report = comparison_residual(h, K, N, r0, r0, solver_tol=solver_tol,
                                 quad_tol=quad_tol, check_density=check_density,
                                 lattice=lattice, lattice_tol=lattice_tol)
    grid = _deviation_grid(h, r0)
    hv = np.asarray(h(grid), dtype=float)
    mv = np.asarray(Density.model(K, N)(grid), dtype=float)
    denom = float(np.dot(mv, mv))
    if denom <= 0:
        raise PreconditionError("domain", "model density vanished on the fit grid")
    c = float(np.dot(hv, mv) / denom)
    if c <= 0:
        return RigidityVerdict(rigid=False, fitted_c=None,
                               max_relative_density_deviation=float("inf"),
                               relative_gap=report.relative_gap)
    deviation = float(np.max(np.abs(hv - c * mv)) / np.max(c * mv))
    rigid = deviation <= tol and abs(report.relative_gap) <= tol
    return RigidityVerdict(rigid=rigid, fitted_c=c,
                           max_relative_density_deviation=deviation,
                           relative_gap=report.relative_gap)


def cd_density_family(K: float, N: float, r0: float, count: int = 6,
                      spread: float = 2.0) -> list[Density]:
    """Closed-form-verifiable CD(K,N) densities on [0, r0] for test sweeps.

    Members are model densities h_{K',N} with K' >= K (CD(K,N) holds by
    monotonicity of the sigma coefficients in the curvature parameter),
    capped so that r0 stays inside the K' diameter bound, plus constant
    densities when K <= 0.
    """
    if count < 1:
        raise PreconditionError("domain", f"count must be positive, got {count}")
    if not 0 < r0 < max_diameter(K, N):
        raise PreconditionError("domain", f"r0 = {r0} infeasible for K={K}, N={N}")
    hi = K + spread
    cap = 0.9 * (N - 1.0) * (np.pi / r0) ** 2
    hi = min(hi, cap)
    if hi < K:
        hi = K
    members = [Density.model(kp, N) for kp in np.linspace(K, hi, count)]
    if K <= 0:
        flat_grid = np.linspace(0.0, r0, 3)
        for level in (1.0, 0.37):
            members.append(Density.sampled(flat_grid, np.full(3, level)))
    return members
