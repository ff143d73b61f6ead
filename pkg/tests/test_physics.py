import math

import numpy as np
import pytest

from cdeigen.errors import PreconditionError
from cdeigen.modelspace import Density
from cdeigen.eigensolve import first_dirichlet_eigen
from cdeigen.physics import (
    CompactificationSpec,
    KkBoundResult,
    kk_curvature,
    kk_mass_bound_at,
    kk_mass_bound_optimal,
    weighted_laplacian_apply,
)


def spec_a():
    # hand-checked below: K(3) = 1 - (3+4-2)*4 / ((6-2)*(3-6+4)) = -4
    return CompactificationSpec(D=6, d=4, Lambda=1.0, sigma_w=2.0, diam=2.0)


def test_spec_validation():
    s = spec_a()
    assert s.n_internal == 2
    with pytest.raises(PreconditionError):
        CompactificationSpec(D=4, d=4, Lambda=0.0, sigma_w=0.0, diam=1.0)
    with pytest.raises(PreconditionError):
        CompactificationSpec(D=4, d=0, Lambda=0.0, sigma_w=0.0, diam=1.0)
    with pytest.raises(PreconditionError):
        CompactificationSpec(D=4.5, d=2, Lambda=0.0, sigma_w=0.0, diam=1.0)
    with pytest.raises(PreconditionError):
        CompactificationSpec(D=4, d=2, Lambda=0.0, sigma_w=0.0, diam=0.0)
    with pytest.raises(PreconditionError):
        CompactificationSpec(D=4, d=2, Lambda=0.0, sigma_w=-1.0, diam=1.0)
    with pytest.raises(PreconditionError):
        CompactificationSpec(D=4, d=2, Lambda=math.inf, sigma_w=0.0, diam=1.0)


def test_kk_curvature_hand_checked_values():
    assert kk_curvature(spec_a(), 3.0) == pytest.approx(-4.0, rel=1e-14)
    s = CompactificationSpec(D=10, d=4, Lambda=0.0, sigma_w=1.0, diam=1.0)
    # K(7) = -(7+4-2)*1 / (8*(7-10+4)) = -9/8
    assert kk_curvature(s, 7.0) == pytest.approx(-1.125, rel=1e-14)


def test_kk_curvature_no_warp_gives_lambda():
    s = CompactificationSpec(D=6, d=4, Lambda=-0.7, sigma_w=0.0, diam=2.0)
    for N in (2.5, 3.0, 17.0):
        assert kk_curvature(s, N) == -0.7


def test_kk_curvature_limits():
    s = spec_a()
    # N -> inf: K -> Lambda - sigma^2/(D-2) = 1 - 4/4 = 0
    assert kk_curvature(s, 1e9) == pytest.approx(0.0, abs=1e-7)
    # N -> (D-d)+: the warp term blows up negatively
    assert kk_curvature(s, 2.0 + 1e-9) < -1e8


def test_kk_curvature_domain_errors():
    with pytest.raises(PreconditionError):
        kk_curvature(spec_a(), 2.0)
    with pytest.raises(PreconditionError):
        kk_curvature(spec_a(), 1.5)
    with pytest.raises(PreconditionError):
        kk_curvature(CompactificationSpec(D=2, d=1, Lambda=0.0, sigma_w=1.0, diam=1.0), 1.5)


def test_mass_bound_at_n3_identity():
    # K=-4 at N=3 for spec_a; r0 = diam/(2j) = 1; lambda = -K/2 + pi^2/r0^2
    expect = 2.0 + math.pi ** 2
    assert kk_mass_bound_at(spec_a(), 1, 3.0, method="closed_form") == \
        pytest.approx(expect, rel=1e-12)
    assert kk_mass_bound_at(spec_a(), 1, 3.0, method="solver") == \
        pytest.approx(expect, rel=1e-6)


def test_mass_bound_at_closed_form_dominates_solver():
    s = spec_a()
    for N in (2.4, 3.7, 5.0):
        solver = kk_mass_bound_at(s, 1, N, method="solver")
        closed = kk_mass_bound_at(s, 1, N, method="closed_form")
        assert solver <= closed * (1.0 + 1e-6), N


def test_mass_bound_at_grows_with_mode_index():
    s = spec_a()
    b1 = kk_mass_bound_at(s, 1, 3.5, method="closed_form")
    b2 = kk_mass_bound_at(s, 2, 3.5, method="closed_form")
    b4 = kk_mass_bound_at(s, 4, 3.5, method="closed_form")
    assert b1 < b2 < b4


def test_mass_bound_at_infeasible_positive_curvature():
    s = CompactificationSpec(D=6, d=4, Lambda=50.0, sigma_w=0.0, diam=10.0)
    with pytest.raises(PreconditionError) as exc:
        kk_mass_bound_at(s, 1, 3.0)
    assert exc.value.code == "infeasible"


def test_mass_bound_at_validation():
    with pytest.raises(PreconditionError):
        kk_mass_bound_at(spec_a(), 0, 3.0)
    with pytest.raises(PreconditionError):
        kk_mass_bound_at(spec_a(), 1, 2.0)
    with pytest.raises(PreconditionError):
        kk_mass_bound_at(spec_a(), 1, 3.0, method="other")


def test_optimal_interior_minimum():
    res = kk_mass_bound_optimal(spec_a(), want_profile=True)
    assert isinstance(res, KkBoundResult)
    assert res.bracketed
    assert res.j == 1 and res.method == "closed_form"
    assert res.N_star > spec_a().n_internal
    assert res.K_star == pytest.approx(kk_curvature(spec_a(), res.N_star), rel=1e-12)
    assert res.bound == pytest.approx(
        kk_mass_bound_at(spec_a(), 1, res.N_star, method="closed_form"), rel=1e-12)
    # the golden refinement cannot sit above the best scanned grid value
    finite = [b for _, b in res.profile if b is not None]
    assert res.bound <= min(finite) * (1.0 + 1e-12)
    # and neighbors do not beat it in the scanned direction
    for fac in (0.98, 1.02):
        assert res.bound <= kk_mass_bound_at(
            spec_a(), 1, res.N_star * fac, method="closed_form") * (1.0 + 1e-9)


def test_optimal_profile_shape():
    res = kk_mass_bound_optimal(spec_a(), grid_points=24, want_profile=True)
    assert len(res.profile) == 24
    for N, b in res.profile:
        assert N > spec_a().n_internal
        assert b is None or math.isfinite(b)
    res2 = kk_mass_bound_optimal(spec_a(), grid_points=24)
    assert res2.profile is None
    assert res2.bound == pytest.approx(res.bound, rel=1e-12)


def test_optimal_boundary_minimum_without_warp():
    s = CompactificationSpec(D=6, d=4, Lambda=-1.0, sigma_w=0.0, diam=2.0)
    res = kk_mass_bound_optimal(s)
    assert not res.bracketed
    assert res.note is not None and "boundary" in res.note
    # monotone objective: the reported point hugs the feasible edge
    assert res.N_star <= s.n_internal + 0.01


def test_optimal_depends_only_on_internal_dimension_without_warp():
    a = CompactificationSpec(D=10, d=4, Lambda=-1.0, sigma_w=0.0, diam=3.0)
    b = CompactificationSpec(D=8, d=2, Lambda=-1.0, sigma_w=0.0, diam=3.0)
    ra = kk_mass_bound_optimal(a)
    rb = kk_mass_bound_optimal(b)
    assert ra.N_star == rb.N_star
    assert ra.bound == rb.bound


def test_optimal_all_infeasible_raises():
    s = CompactificationSpec(D=6, d=4, Lambda=80.0, sigma_w=0.0, diam=50.0)
    with pytest.raises(PreconditionError) as exc:
        kk_mass_bound_optimal(s)
    assert exc.value.code == "infeasible"


def test_optimal_validation():
    with pytest.raises(PreconditionError):
        kk_mass_bound_optimal(spec_a(), grid_points=2)
    with pytest.raises(PreconditionError):
        kk_mass_bound_optimal(spec_a(), golden_tol=0.0)
    with pytest.raises(PreconditionError):
        kk_mass_bound_optimal(spec_a(), j=-1)
    with pytest.raises(PreconditionError):
        kk_mass_bound_optimal(spec_a(), method="fancy")


def test_laplacian_apply_polynomial():
    x = np.linspace(0.0, 1.0, 401)
    psi = x ** 2
    f = np.ones_like(x)
    out = weighted_laplacian_apply(psi, f, x)
    assert out[0] == 0.0 and out[-1] == 0.0
    interior = out[1:-1]
    assert np.allclose(interior, -2.0, atol=1e-6)


def test_laplacian_apply_nonuniform_grid():
    rng = np.random.default_rng(42)
    x = np.sort(rng.uniform(0.0, 1.0, 300))
    x[0], x[-1] = 0.0, 1.0
    psi = np.sin(2.0 * x)
    f = np.full_like(x, 3.0)
    out = weighted_laplacian_apply(psi, f, x)
    # -(f psi')'/f = -psi'' for constant f
    assert np.allclose(out[1:-1], 4.0 * np.sin(2.0 * x[1:-1]), atol=5e-2)


def test_laplacian_apply_recovers_eigen_equation():
    # -(psi'' + (log h)' psi') = lambda psi for the converged eigenpair
    h = Density.model(-2.0, 3.0)
    sol = first_dirichlet_eigen(h, 1.0)
    x = sol.grid[1:]  # stay off the vanishing-weight endpoint
    logh = np.log(np.asarray(h(x)))
    out = weighted_laplacian_apply(sol.phi[1:], logh, x)
    inner = slice(x.size // 10, -x.size // 10)
    resid = out[inner] - sol.eigenvalue * sol.phi[1:][inner]
    assert np.max(np.abs(resid)) < 5e-3 * sol.eigenvalue


def test_laplacian_apply_validation():
    x = np.linspace(0.0, 1.0, 5)
    with pytest.raises(PreconditionError) as exc:
        weighted_laplacian_apply(np.zeros(4), np.ones(5), x)
    assert exc.value.code == "grid-mismatch"
    with pytest.raises(PreconditionError):
        weighted_laplacian_apply(np.zeros((5, 1)), np.ones(5), x)
    with pytest.raises(PreconditionError):
        weighted_laplacian_apply(np.zeros(2), np.ones(2), x[:2])
    bad = x.copy()
    bad[2] = bad[1]
    with pytest.raises(PreconditionError):
        weighted_laplacian_apply(np.zeros(5), np.ones(5), bad)
