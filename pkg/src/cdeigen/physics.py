"""Spin-2 mass bounds for warped compactifications.

A warped product with total dimension D, spacetime dimension d, cosmological
constant Lambda and warp-gradient bound sigma_w has internal Bakry-Emery
curvature at least

    K(N) = Lambda - (N + d - 2) sigma_w^2 / ((D - 2)(N - D + d))

for every synthetic dimension N > D - d.  The j-th spin-2 Kaluza-Klein mass
then obeys m_j^2 <= lambda_{K(N), N, diam/(2j)}, and N is a free parameter to
optimize over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import closed_form_bound
from .eigensolve import first_dirichlet_eigen
from .errors import NonconvergenceError, PreconditionError
from .modelspace import Density, max_diameter

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class CompactificationSpec:
    """Warped-compactification data in one consistent length unit.

    sigma_w is the supremum of |grad f| for the warp function f; diam is the
    diameter of the internal space.
    """

    D: int
    d: int
    Lambda: float
    sigma_w: float
    diam: float

    def __post_init__(self):
        if int(self.D) != self.D or int(self.d) != self.d:
            raise PreconditionError("domain", "D and d must be integers")
        if not self.D > self.d >= 1:
            raise PreconditionError(
                "domain", f"need D > d >= 1, got D={self.D}, d={self.d}"
            )
        if not (math.isfinite(self.diam) and self.diam > 0):
            raise PreconditionError("domain", f"diam must be finite positive, got {self.diam}")
        if not (math.isfinite(self.sigma_w) and self.sigma_w >= 0):
            raise PreconditionError("domain", f"sigma_w must be nonnegative, got {self.sigma_w}")
        if not math.isfinite(self.Lambda):
            raise PreconditionError("domain", f"Lambda must be finite, got {self.Lambda}")

    @property
    def n_internal(self) -> int:
        return int(self.D) - int(self.d)


def kk_curvature(spec: CompactificationSpec, N: float) -> float:
    """Curvature parameter K(N) of the internal weighted geometry."""
    n = spec.n_internal
    if not N > n:
        raise PreconditionError("domain", f"N must exceed D - d = {n}, got {N}")
    if spec.sigma_w == 0.0:
        return spec.Lambda
    if spec.D == 2:
        raise PreconditionError("domain", "D = 2 with a nonzero warp gradient is degenerate")
    return spec.Lambda - (N + spec.d - 2.0) * spec.sigma_w ** 2 / (
        (spec.D - 2.0) * (N - n)
    )


def _mode_radius(spec: CompactificationSpec, j: int) -> float:
    if int(j) != j or j < 1:
        raise PreconditionError("domain", f"mode index j must be a positive integer, got {j}")
    return spec.diam / (2.0 * j)


def kk_mass_bound_at(spec: CompactificationSpec, j: int, N: float,
                     method: str = "solver", solver_tol: float = 1e-8) -> float:
    """Upper bound on m_j^2 at a fixed synthetic dimension N.

    method="solver" evaluates lambda_{K(N),N,r0} with the eigensolver;
    method="closed_form" uses the explicit bound formulas, which are exact
    only at K = 0 or N = 3 and otherwise valid but possibly weaker.
    """
    if method not in ("solver", "closed_form"):
        raise PreconditionError("domain", f"unknown method {method!r}")
    K = kk_curvature(spec, N)
    r0 = _mode_radius(spec, j)
    if K > 0 and r0 >= max_diameter(K, N):
        raise PreconditionError(
            "infeasible",
            f"r0 = {r0} reaches the model diameter {max_diameter(K, N)} at N={N}",
        )
    if method == "closed_form":
        return closed_form_bound(K, N, r0).value
    return first_dirichlet_eigen(Density.model(K, N), r0, tol=solver_tol).eigenvalue


@dataclass(frozen=True)
class KkBoundResult:
    """Outcome of the N-optimization of the mass bound.

    bracketed=False flags an objective that stayed monotone across the
    scanned range (minimum reported at a search boundary); note carries the
    human-readable diagnostic.
    """

    j: int
    N_star: float
    K_star: float
    bound: float
    method: str
    profile: tuple | None
    bracketed: bool
    note: str


def _objective(spec, j, method, solver_tol):
    def f(N: float) -> float:
        try:
            return kk_mass_bound_at(spec, j, N, method=method, solver_tol=solver_tol)
        except PreconditionError as exc:
            if exc.code == "infeasible":
                return math.inf
            raise
    return f


def kk_mass_bound_optimal(spec: CompactificationSpec, j: int = 1,
                          method: str = "closed_form", grid_points: int = 160,
                          golden_tol: float = 1e-6, want_profile: bool = False,
                          solver_tol: float = 1e-8) -> KkBoundResult:
    """Minimize the mass bound over N in (D-d, 10^3 (D-d)].

    A logarithmic grid in u = N - (D-d) from 1e-3 up brackets the minimum;
    golden-section search in log u refines it to relative tolerance
    ``golden_tol``.  N values whose K(N) > 0 puts r0 beyond the model
    diameter are infeasible and excluded (treated as +inf).
    """
    if grid_points < 8:
        raise PreconditionError("domain", f"grid_points must be at least 8, got {grid_points}")
    if not 0 < golden_tol < 1e-1:
        raise PreconditionError("domain", f"golden_tol must lie in (0, 0.1), got {golden_tol}")
    n = spec.n_internal
    f = _objective(spec, j, method, solver_tol)
    u_lo, u_hi = 1e-3, 1000.0 * n - n
    us = np.geomspace(u_lo, u_hi, int(grid_points))
    vals = np.array([f(n + u) for u in us])
    if not np.any(np.isfinite(vals)):
        raise PreconditionError(
            "infeasible", "every scanned N is infeasible for this compactification"
        )
    i = int(np.nanargmin(np.where(np.isfinite(vals), vals, np.nan)))
    profile = tuple((float(n + u), float(v)) for u, v in zip(us, vals)) if want_profile else None

    interior = 0 < i < us.size - 1 and np.isfinite(vals[i - 1]) and np.isfinite(vals[i + 1])
    if not interior:
        N_star = float(n + us[i])
        return KkBoundResult(
            j=int(j), N_star=N_star, K_star=kk_curvature(spec, N_star),
            bound=float(vals[i]), method=method, profile=profile, bracketed=False,
            note="objective is monotone across the scanned range; "
                 "minimum reported at a search boundary",
        )

    # Golden-section in log u on the bracketing triple.
    a, b = math.log(us[i - 1]), math.log(us[i + 1])
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(n + math.exp(x1)), f(n + math.exp(x2))
    # Width w in log u means u (hence N - (D-d)) is pinned to relative
    # accuracy about w, so the stop test is on the raw log-interval width.
    for _ in range(400):
        if b - a <= golden_tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(n + math.exp(x1))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(n + math.exp(x2))
    else:
        raise NonconvergenceError("golden", "golden-section failed to shrink the bracket")
    u_star = math.exp(0.5 * (a + b))
    N_star = float(n + u_star)
    bound = f(N_star)
    return KkBoundResult(
        j=int(j), N_star=N_star, K_star=kk_curvature(spec, N_star),
        bound=float(bound), method=method, profile=profile, bracketed=True, note="",
    )


def weighted_laplacian_apply(psi_samples, f_samples, metric_1d_grid) -> np.ndarray:
    """-(psi'' + f' psi') on the interior nodes of a 1-D grid.

    Sign convention matches the eigenproblem: applying this to the first
    model eigenfunction with f = log h_{K,N} returns approximately
    lambda * psi at interior nodes.  Boundary entries are set to zero; only
    interior values are meaningful.
    """
    psi = np.asarray(psi_samples, dtype=float)
    fs = np.asarray(f_samples, dtype=float)
    x = np.asarray(metric_1d_grid, dtype=float)
    if not (psi.ndim == fs.ndim == x.ndim == 1):
        raise PreconditionError("grid-mismatch", "inputs must be 1-d arrays")
    if not (psi.size == fs.size == x.size):
        raise PreconditionError(
            "grid-mismatch",
            f"lengths differ: psi {psi.size}, f {fs.size}, grid {x.size}",
        )
    if x.size < 3:
        raise PreconditionError("grid-mismatch", "need at least 3 grid nodes")
    if np.any(np.diff(x) <= 0):
        raise PreconditionError("grid-mismatch", "grid must be strictly increasing")

    hl = x[1:-1] - x[:-2]
    hr = x[2:] - x[1:-1]
    w = hl * hr * (hl + hr)

    def d1(y):
        return (hl ** 2 * y[2:] - hr ** 2 * y[:-2] + (hr ** 2 - hl ** 2) * y[1:-1]) / w

    def d2(y):
        return 2.0 * (hl * y[2:] + hr * y[:-2] - (hl + hr) * y[1:-1]) / w

    out = np.zeros_like(psi)
    out[1:-1] = -(d2(psi) + d1(fs) * d1(psi))
    return out
