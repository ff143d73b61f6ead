"""First Dirichlet eigenvalues of weighted Sturm-Liouville problems on [0, r0].

The problem is the minimization of int (phi')^2 h dtheta / int phi^2 h dtheta
over functions vanishing at r0, with natural (no) boundary condition at the
left end where the weight h may vanish.  Two routes are provided:

* a conforming piecewise-linear discretization whose generalized eigenvalue
  is a variational upper bound, refined by mesh bisection and finished with
  one Richardson extrapolation step;
* a shooting method integrating the ODE phi'' + (log h)' phi' + lambda phi = 0
  from near the singular end and root-finding on phi(r0).

An adaptive Gauss-Kronrod quadrature for integrals against the measure
h dtheta and the flux-identity diagnostic live here as well.
"""

from __future__ import annotations

import bisect as _bisect_mod
import heapq
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.linalg import lapack
from scipy.optimize import brentq

from .errors import NonconvergenceError, PreconditionError
from .modelspace import Density, max_diameter

# ------------------------------------------------------------------ quadrature
# 15-point Kronrod extension of 7-point Gauss-Legendre (positive half).
_XGK_HALF = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK_HALF = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG_HALF = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_XK = np.concatenate((-_XGK_HALF[:7], _XGK_HALF[::-1]))
_WK = np.concatenate((_WGK_HALF[:7], _WGK_HALF[::-1]))
_WG = np.zeros(15)
_WG[1:14:2] = np.concatenate((_WG_HALF[:3], _WG_HALF[::-1]))


def _vectorized(f):
    """Wrap a callable so it maps float arrays to float arrays."""
    if not callable(f):
        c = float(f)
        return lambda x: np.full(np.shape(x), c)

    def wrapped(x):
        res = np.asarray(f(x), dtype=float)
        if res.shape != np.shape(x):
            res = np.broadcast_to(res, np.shape(x)).astype(float)
        return res

    return wrapped


def _gk_panel(fh, a, b):
    """One Gauss-Kronrod pass of an already-vectorized integrand fh."""
    hw = 0.5 * (b - a)
    vals = fh(0.5 * (a + b) + hw * _XK)
    res_k = hw * float(vals @ _WK)
    res_g = hw * float(vals @ _WG)
    return res_k, abs(res_k - res_g)


def weighted_integral(f, h: Density, a: float, b: float,
                      rel_tol: float = 1e-10, max_intervals: int = 4096) -> float:
    """Adaptive quadrature of int_a^b f(theta) h(theta) dtheta.

    ``f`` may be a constant or a numpy-vectorizable callable.  The initial
    partition is graded toward a vanishing left endpoint and includes the
    sample nodes of sampled densities, so integrands stay smooth per panel.
    """
    if not isinstance(h, Density):
        raise PreconditionError("domain", "h must be a Density instance")
    a, b = float(a), float(b)
    if not (0.0 <= a < b) or not math.isfinite(b):
        raise PreconditionError("domain", f"bad integration interval [{a}, {b}]")
    if b > h.right * (1.0 + 1e-12):
        raise PreconditionError("domain", f"interval end {b} outside density domain [0, {h.right}]")
    if not rel_tol > 0:
        raise PreconditionError("domain", "rel_tol must be positive")

    fv = _vectorized(f)
    hv = _vectorized(h)
    fh = lambda x: fv(x) * hv(x)

    breaks = {a, b}
    if h.kind == "sampled":
        breaks.update(float(t) for t in h.grid if a < t < b)
    if a == 0.0 and float(h(0.0)) == 0.0:
        breaks.update(a + (b - a) * g for g in (1e-6, 1e-4, 1e-2, 1e-1))
    pts = sorted(breaks)

    counter = itertools.count()
    heap = []
    total = 0.0
    err_total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        res, err = _gk_panel(fh, lo, hi)
        total += res
        err_total += err
        heapq.heappush(heap, (-err, next(counter), lo, hi, res, err))

    n_panels = len(pts) - 1
    min_width = 64.0 * np.finfo(float).eps * (b - a)
    settled_err = 0.0
    while err_total + settled_err > rel_tol * max(abs(total), 1e-300):
        if not heap or n_panels >= max_intervals:
            raise NonconvergenceError(
                "quadrature",
                f"adaptive quadrature stalled at {n_panels} panels with "
                f"relative error {(err_total + settled_err) / max(abs(total), 1e-300):.3e}",
            )
        _, _, lo, hi, res, err = heapq.heappop(heap)
        err_total -= err
        total -= res
        if hi - lo < min_width:
            # Cannot split further in double precision; freeze this panel.
            total += res
            settled_err += err
            continue
        mid = 0.5 * (lo + hi)
        for seg in ((lo, mid), (mid, hi)):
            res_s, err_s = _gk_panel(fh, *seg)
            total += res_s
            err_total += err_s
            heapq.heappush(heap, (-err_s, next(counter), seg[0], seg[1], res_s, err_s))
        n_panels += 1
    return total


# ------------------------------------------------------------------ grids

@dataclass(frozen=True)
class GridSpec:
    """Initial mesh recipe: node count plus uniform or geometric grading.

    Geometric grading clusters nodes toward theta = 0 with the given ratio.
    The uniform default is adequate because the first eigenfunction is
    smooth up to the vanishing-weight end (it is analytic in theta^2 there);
    only the weight is singular, and that is handled by per-element
    quadrature, not by the mesh.
    """

    node_count: int = 512
    grading: str = "uniform"
    ratio: float = 0.9

    def __post_init__(self):
        if self.node_count < 16:
            raise PreconditionError("domain", f"node_count must be >= 16, got {self.node_count}")
        if self.grading not in ("uniform", "geometric"):
            raise PreconditionError("domain", f"unknown grading {self.grading!r}")
        if not 0.0 < self.ratio < 1.0:
            raise PreconditionError("domain", f"geometric ratio must lie in (0,1), got {self.ratio}")

    def nodes(self, r0: float, include=()) -> np.ndarray:
        if self.grading == "uniform":
            base = np.linspace(0.0, r0, self.node_count)
        else:
            tail = r0 * self.ratio ** np.arange(self.node_count - 2, -1, -1)
            base = np.concatenate(([0.0], tail))
        extra = [t for t in include if 0.0 < t < r0]
        if extra:
            base = np.union1d(base, np.asarray(extra, dtype=float))
            keep = np.concatenate(([True], np.diff(base) > 1e-14 * r0))
            base = base[keep]
            base[-1] = r0
        return base


def _bisect_nodes(nodes: np.ndarray) -> np.ndarray:
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    out = np.empty(nodes.size + mids.size)
    out[0::2] = nodes
    out[1::2] = mids
    return out


# ------------------------------------------------------------------ assembly

@dataclass
class WeightedEigenProblem:
    """Tridiagonal pencil (A, B) of the hat-function discretization.

    Unknowns sit at nodes[:-1]; the right endpoint carries the Dirichlet
    condition and is eliminated.  A is the weighted stiffness matrix,
    B the weighted mass matrix, both symmetric.
    """

    nodes: np.ndarray
    stiff_diag: np.ndarray
    stiff_off: np.ndarray
    mass_diag: np.ndarray
    mass_off: np.ndarray

    @property
    def n_unknowns(self) -> int:
        return self.stiff_diag.size

    def dense(self):
        m = self.n_unknowns
        A = np.diag(self.stiff_diag)
        B = np.diag(self.mass_diag)
        idx = np.arange(m - 1)
        A[idx, idx + 1] = A[idx + 1, idx] = self.stiff_off
        B[idx, idx + 1] = B[idx + 1, idx] = self.mass_off
        return A, B


_QX, _QW = np.polynomial.legendre.leggauss(8)
_QX = 0.5 * (_QX + 1.0)
_QW = 0.5 * _QW


def assemble_weighted_problem(h: Density, r0: float, grid=None) -> WeightedEigenProblem:
    """Assemble stiffness and mass matrices for the weight h on [0, r0]."""
    _validate_problem(h, r0)
    if grid is None:
        grid = GridSpec()
    if isinstance(grid, GridSpec):
        include = h.grid if h.kind == "sampled" else ()
        nodes = grid.nodes(r0, include)
    else:
        nodes = np.asarray(grid, dtype=float)
        if nodes.ndim != 1 or nodes.size < 3 or nodes[0] != 0.0 or nodes[-1] != r0 \
                or np.any(np.diff(nodes) <= 0):
            raise PreconditionError("grid", "explicit grid must increase strictly from 0 to r0")

    w = np.diff(nodes)
    pts = nodes[:-1, None] + w[:, None] * _QX[None, :]
    hv = np.asarray(h(pts.ravel()), dtype=float).reshape(pts.shape)

    m0 = w * (hv @ _QW)
    mll = w * (hv @ (_QW * (1.0 - _QX) ** 2))
    mlr = w * (hv @ (_QW * _QX * (1.0 - _QX)))
    mrr = w * (hv @ (_QW * _QX ** 2))
    s = m0 / w**2

    n = nodes.size
    stiff_diag = np.zeros(n - 1)
    stiff_diag[0] = s[0]
    stiff_diag[1:] = s[:-1] + s[1:]
    mass_diag = np.zeros(n - 1)
    mass_diag[0] = mll[0]
    mass_diag[1:] = mrr[:-1] + mll[1:]
    return WeightedEigenProblem(
        nodes=nodes,
        stiff_diag=stiff_diag,
        stiff_off=-s[:-1],
        mass_diag=mass_diag,
        mass_off=mlr[:-1],
    )


def _validate_problem(h: Density, r0: float) -> None:
    if not isinstance(h, Density):
        raise PreconditionError("domain", "h must be a Density instance")
    if not (r0 > 0 and math.isfinite(r0)):
        raise PreconditionError("domain", f"r0 must be positive and finite, got {r0}")
    if r0 > h.right * (1.0 + 1e-12):
        raise PreconditionError("domain", f"r0 = {r0} exceeds the density domain [0, {h.right}]")
    if h.kind == "model" and h.K > 0:
        d = max_diameter(h.K, h.N)
        if r0 >= d * (1.0 - 1e-12):
            raise PreconditionError(
                "domain", f"r0 = {r0} must stay strictly below the diameter bound {d}"
            )
    if not h.positive_on_interior(r0):
        raise PreconditionError(
            "domain", "density vanishes at an interior sample node; the solver refuses"
        )


# ------------------------------------------------------------------ eigenpair

def _tri_mv(diag, off, x):
    y = diag * x
    y[:-1] += off * x[1:]
    y[1:] += off * x[:-1]
    return y


def _smallest_eigenpair(prob: WeightedEigenProblem):
    """Smallest eigenpair of (A, B) by inverse iteration with a Cholesky-free
    tridiagonal factorization of A.  Returns (lambda, vector, n_trimmed)."""
    ad, ao = prob.stiff_diag, prob.stiff_off
    bd, bo = prob.mass_diag, prob.mass_off
    m = ad.size

    # Rows where both matrices underflowed to zero (possible on strongly
    # graded meshes with large N) carry no information; drop them.
    k0 = 0
    while k0 < m - 2 and ad[k0] == 0.0 and bd[k0] == 0.0:
        k0 += 1
    ad, bd = ad[k0:], bd[k0:]
    ao, bo = ao[k0:], bo[k0:]

    d, e, info = lapack.dpttrf(ad, ao)
    while info > 0 and k0 < m - 2:
        # Denormal leading pivots can break positive definiteness; trim more.
        k0 += 1
        ad, bd, ao, bo = ad[1:], bd[1:], ao[1:], bo[1:]
        d, e, info = lapack.dpttrf(ad, ao)
    if info != 0:
        raise NonconvergenceError("factorization", f"tridiagonal factorization failed (info={info})")

    xs = prob.nodes[k0:-1]
    r0 = prob.nodes[-1]
    x = 1.0 - (xs / r0) ** 2
    x /= math.sqrt(float(x @ _tri_mv(bd, bo, x)))

    mu_prev = None
    stag = 0
    mu = math.inf
    for it in range(200):
        rhs = _tri_mv(bd, bo, x)
        y, info = lapack.dpttrs(d, e, rhs)
        if info != 0:
            raise NonconvergenceError("eigen-iteration", f"tridiagonal solve failed (info={info})")
        bnorm = math.sqrt(float(y @ _tri_mv(bd, bo, y)))
        if not (bnorm > 0 and math.isfinite(bnorm)):
            raise NonconvergenceError("eigen-iteration", "inverse iteration produced a degenerate iterate")
        y /= bnorm
        mu = float(y @ _tri_mv(ad, ao, y))
        if mu_prev is not None and abs(mu - mu_prev) <= 1e-14 * abs(mu):
            stag += 1
            if stag >= 2 and it >= 4:
                x = y
                break
        else:
            stag = 0
        mu_prev = mu
        x = y
    else:
        if mu_prev is None or abs(mu - mu_prev) > 1e-10 * abs(mu):
            raise NonconvergenceError("eigen-iteration", "inverse iteration did not stagnate")

    if float(np.sum(x)) < 0:
        x = -x
    if float(np.min(x)) < -1e-7 * float(np.max(x)):
        raise NonconvergenceError("eigen-iteration", "iterate is not one-signed; not the ground state")
    return mu, x, k0


# ------------------------------------------------------------------ solutions

@dataclass
class EigenSolution:
    """Converged first Dirichlet eigenpair on [0, r0].

    phi is sampled on ``grid``, normalized to sup-norm 1 with nonnegative
    sign; dphi holds the recovered derivative.  refinement_history records
    the raw per-level eigenvalue estimates (the final eigenvalue adds one
    Richardson step on top of the last entry for the matrix method).
    """

    eigenvalue: float
    grid: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    method: str
    refinement_history: list
    flux_residual: float


def _poly_derivative(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Derivative of scattered samples via sliding local quartic fits."""
    n = x.size
    win = min(5, n)
    start = np.clip(np.arange(n) - win // 2, 0, n - win)
    idx = start[:, None] + np.arange(win)[None, :]
    xi = x[idx] - x[:, None]
    scale = np.max(np.abs(xi), axis=1, keepdims=True)
    s = xi / scale
    V = s[:, :, None] ** np.arange(win)[None, None, :]
    coef = np.linalg.solve(V, y[idx][:, :, None])
    return coef[:, 1, 0] / scale[:, 0]


def _slope_kinks(h: Density):
    """Sample nodes where the interpolated weight changes slope abruptly.

    phi' is only piecewise smooth across such nodes (the flux h phi' is the
    continuous quantity), so derivative recovery must not fit across them.
    """
    if h.kind != "sampled":
        return []
    g = h.values ** (1.0 / (h.interp_dim - 1.0))
    s = np.diff(g) / np.diff(h.grid)
    jump = np.abs(np.diff(s))
    scale = np.maximum(np.abs(s[:-1]), np.abs(s[1:]))
    mask = jump > 0.2 * np.maximum(scale, 1e-300)
    return [float(t) for t, m in zip(h.grid[1:-1], mask) if m]


def _piecewise_derivative(x: np.ndarray, y: np.ndarray, breaks) -> np.ndarray:
    """_poly_derivative applied separately between the given break abscissae.

    Break points falling on grid nodes produce one-sided derivatives there
    (the right-sided one wins for the shared node).
    """
    cuts = sorted({int(np.searchsorted(x, b)) for b in breaks})
    cuts = [c for c in cuts if 1 < c < x.size - 1]
    if not cuts:
        return _poly_derivative(x, y)
    out = np.empty_like(y)
    edges = [0] + cuts + [x.size - 1]
    for a, b in zip(edges[:-1], edges[1:]):
        out[a:b + 1] = _poly_derivative(x[a:b + 1], y[a:b + 1])
    return out


def flux_identity_residual(sol: EigenSolution, h: Density) -> float:
    """Scale-free defect of the identity phi'(t) h(t) = -lambda int_0^t phi h.

    The maximum over grid nodes of |phi' h + lambda F| is normalized by
    lambda * F(r0), F being the cumulative integral of phi against h.
    """
    x, phi, dphi = sol.grid, sol.phi, sol.dphi
    if not (x.shape == phi.shape == dphi.shape):
        raise PreconditionError("grid", "solution arrays have mismatched shapes")
    lam = sol.eigenvalue
    spline = CubicSpline(x, phi)
    qx, qw = np.polynomial.legendre.leggauss(4)
    qx = 0.5 * (qx + 1.0)
    qw = 0.5 * qw
    w = np.diff(x)
    pts = x[:-1, None] + w[:, None] * qx[None, :]
    hv = np.asarray(h(pts.ravel()), dtype=float).reshape(pts.shape)
    panels = w * ((hv * spline(pts)) @ qw)
    F = np.concatenate(([0.0], np.cumsum(panels)))
    defect = dphi * np.asarray(h(x), dtype=float) + lam * F
    denom = abs(lam) * F[-1]
    if not denom > 0:
        raise PreconditionError("domain", "cumulative weighted integral of phi vanished")
    return float(np.max(np.abs(defect)) / denom)


def _build_matrix_solution(h, nodes, lam, vec, k0, history, tol):
    n = nodes.size
    phi = np.zeros(n)
    phi[k0:n - 1] = vec
    phi[:k0] = vec[0]
    top = float(np.max(np.abs(phi)))
    phi /= top
    phi = np.maximum(phi, 0.0)
    dphi = _piecewise_derivative(nodes, phi, _slope_kinks(h))
    sol = EigenSolution(
        eigenvalue=lam,
        grid=nodes,
        phi=phi,
        dphi=dphi,
        method="matrix",
        refinement_history=history,
        flux_residual=math.nan,
    )
    sol.flux_residual = flux_identity_residual(sol, h)
    return sol


def first_dirichlet_eigen(h: Density, r0: float, tol: float = 1e-8,
                          grid: GridSpec | None = None, method: str = "matrix",
                          max_refinements: int = 8) -> EigenSolution:
    """Smallest Dirichlet eigenvalue of the weight h on [0, r0].

    The matrix route refines the mesh by bisection until two successive
    eigenvalue estimates agree to tol relatively, applies one Richardson
    step, and accepts only once the flux-identity residual falls below
    100*tol (the eigenfunction can lag the eigenvalue on rough weights).
    The shooting route brackets around a coarse matrix estimate and
    delegates to ``shoot_eigen``.
    """
    _validate_problem(h, r0)
    if not (1e-12 < tol < 1e-3):
        raise PreconditionError("domain", f"tol must lie in (1e-12, 1e-3), got {tol}")
    if method not in ("matrix", "shooting"):
        raise PreconditionError("domain", f"unknown method {method!r}")
    if grid is None:
        grid = GridSpec()

    if method == "shooting":
        return _shooting_solution(h, r0, tol, grid)

    include = h.grid if h.kind == "sampled" else ()
    nodes = grid.nodes(r0, include)
    history: list[float] = []
    prev = None
    stuck_flux = None
    for _ in range(max_refinements + 1):
        prob = assemble_weighted_problem(h, r0, nodes)
        lam, vec, k0 = _smallest_eigenpair(prob)
        history.append(lam)
        if prev is not None and abs(lam - prev) <= tol * abs(lam):
            lam_ex = lam + (lam - prev) / 3.0
            sol = _build_matrix_solution(h, nodes, lam_ex, vec, k0, history, tol)
            if sol.flux_residual <= 100.0 * tol:
                return sol
            stuck_flux = sol.flux_residual
        prev = lam
        nodes = _bisect_nodes(nodes)
    if stuck_flux is not None:
        raise NonconvergenceError(
            "flux",
            f"flux-identity residual {stuck_flux:.3e} stayed above 100*tol "
            f"within {max_refinements} refinements",
        )
    raise NonconvergenceError(
        "refinement",
        f"eigenvalue did not settle to rel tol {tol} within {max_refinements} "
        f"refinements (history: {history})",
    )


# ------------------------------------------------------------------ shooting

def _fast_log_derivative(h: Density):
    """Scalar-fast (log h)' for the shooting right-hand side."""
    if h.kind == "model":
        nm1 = h.N - 1.0
        kap = h.K / nm1
        if kap == 0.0:
            return lambda t: nm1 / t
        rk = math.sqrt(abs(kap))
        if kap > 0:
            def dlog(t, rk=rk, nm1=nm1, kap=kap):
                if rk * t < 1e-4:
                    return nm1 * (1.0 / t - kap * t / 3.0)
                return nm1 * rk / math.tan(rk * t)
        else:
            def dlog(t, rk=rk, nm1=nm1, kap=kap):
                if rk * t < 1e-4:
                    return nm1 * (1.0 / t - kap * t / 3.0)
                return nm1 * rk / math.tanh(rk * t)
        return dlog

    p = h.interp_dim - 1.0
    gvals = (h.values ** (1.0 / p)).tolist()
    grid = h.grid.tolist()
    nseg = len(grid) - 1

    def dlog(t):
        i = min(max(_bisect_mod.bisect_right(grid, t) - 1, 0), nseg - 1)
        slope = (gvals[i + 1] - gvals[i]) / (grid[i + 1] - grid[i])
        g = gvals[i] + slope * (t - grid[i])
        if g <= 0:
            raise PreconditionError("domain", "density vanishes inside the shooting interval")
        return p * slope / g

    return dlog


def _shooting_machinery(h: Density, r0: float):
    eps0 = r0 * 1e-6
    mass0 = weighted_integral(1.0, h, 0.0, eps0, rel_tol=1e-10)
    heps = float(h(eps0))
    if not heps > 0:
        raise PreconditionError("domain", "density vanishes at the shooting start point")
    dlog = _fast_log_derivative(h)

    def integrate(lam, dense=False):
        def rhs(t, y):
            return (y[1], -lam * y[0] - dlog(t) * y[1])

        # Initial slope from the flux identity: phi' (eps) = -lam m([0,eps]) / h(eps).
        ivp = solve_ivp(rhs, (eps0, r0), [1.0, -lam * mass0 / heps],
                        method="DOP853", rtol=1e-11, atol=1e-13, dense_output=dense)
        if not ivp.success:
            raise NonconvergenceError("stiffness", f"ODE integration failed: {ivp.message}")
        return ivp

    return eps0, integrate


def shoot_eigen(h: Density, r0: float, bracket, tol: float = 1e-8) -> float:
    """Shooting eigenvalue: root of lambda -> phi(r0) inside ``bracket``."""
    _validate_problem(h, r0)
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (0.0 < lo < hi) or not math.isfinite(hi):
        raise PreconditionError("bracket", f"bracket must satisfy 0 < lo < hi, got ({lo}, {hi})")
    if not (1e-12 < tol < 1e-3):
        raise PreconditionError("domain", f"tol must lie in (1e-12, 1e-3), got {tol}")

    _, integrate = _shooting_machinery(h, r0)

    def miss(lam):
        return float(integrate(lam).y[0, -1])

    f_lo, f_hi = miss(lo), miss(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0:
        raise PreconditionError(
            "bracket",
            f"no sign change of phi(r0) on ({lo}, {hi}): endpoints give ({f_lo:.3e}, {f_hi:.3e})",
        )
    lam = brentq(miss, lo, hi, xtol=tol * lo, rtol=max(1e-13, 0.01 * tol))
    resid = abs(miss(lam))
    if resid > 100.0 * tol:
        raise NonconvergenceError("shooting", f"|phi(r0)| = {resid:.3e} did not fall below tolerance")
    return float(lam)


def _shooting_solution(h: Density, r0: float, tol: float, grid: GridSpec) -> EigenSolution:
    est = first_dirichlet_eigen(h, r0, tol=1e-6, grid=grid, method="matrix").eigenvalue
    lam = shoot_eigen(h, r0, (0.9 * est, 1.1 * est), tol)

    eps0, integrate = _shooting_machinery(h, r0)
    ivp = integrate(lam, dense=True)
    nodes = grid.nodes(r0, h.grid if h.kind == "sampled" else ())
    phi = np.empty_like(nodes)
    dphi = np.empty_like(nodes)
    inside = nodes >= eps0
    vals = ivp.sol(nodes[inside])
    phi[inside] = vals[0]
    dphi[inside] = vals[1]
    # Below the start point phi is flat to O(eps^2); pin the natural boundary.
    phi[~inside] = 1.0
    dphi[~inside] = 0.0
    phi[-1] = 0.0
    top = float(np.max(np.abs(phi)))
    phi = np.maximum(phi / top, 0.0)
    dphi /= top
    sol = EigenSolution(
        eigenvalue=lam,
        grid=nodes,
        phi=phi,
        dphi=dphi,
        method="shooting",
        refinement_history=[est, lam],
        flux_residual=math.nan,
    )
    sol.flux_residual = flux_identity_residual(sol, h)
    if sol.flux_residual > 100.0 * tol:
        raise NonconvergenceError(
            "flux", f"flux-identity residual {sol.flux_residual:.3e} exceeds 100*tol"
        )
    return sol
