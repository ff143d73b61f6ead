import math

import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.special import jv

from cdeigen.bounds import (
    BoundValue,
    bessel_first_zero,
    bessel_j,
    closed_form_bound,
    essential_spectrum_threshold,
    neumann_upper_bound,
)
from cdeigen.eigensolve import first_dirichlet_eigen
from cdeigen.errors import PreconditionError
from cdeigen.modelspace import Density, max_diameter, s_kappa


def reference_first_zero(nu):
    """First positive zero of J_nu by sign-stepping scipy.special.jv."""
    x = max(nu, 0.5)
    step = max(0.5, 0.6 * x ** (1.0 / 3.0))
    f_prev = jv(nu, x)
    while f_prev == 0.0:
        x += 1e-9
        f_prev = jv(nu, x)
    for _ in range(10000):
        x_next = x + step
        f_next = jv(nu, x_next)
        if f_prev * f_next < 0:
            return brentq(lambda t: jv(nu, t), x, x_next, xtol=1e-14, rtol=8.9e-16)
        x, f_prev = x_next, f_next
    raise AssertionError(f"no sign change found for nu={nu}")


def test_bessel_j_matches_scipy_small_orders():
    rng = np.random.default_rng(314159)
    for _ in range(300):
        nu = rng.uniform(-0.99, 12.0)
        x = rng.uniform(0.01, 11.9)
        mine = bessel_j(nu, x)
        ref = jv(nu, x)
        assert mine == pytest.approx(ref, rel=5e-9, abs=1e-12), (nu, x)


def test_bessel_j_matches_scipy_recurrence_regime():
    rng = np.random.default_rng(271828)
    for _ in range(150):
        nu = rng.uniform(0.0, 60.0)
        x = rng.uniform(12.0, 80.0)
        mine = bessel_j(nu, x)
        ref = jv(nu, x)
        assert mine == pytest.approx(ref, rel=2e-10, abs=5e-14), (nu, x)


def test_bessel_j_large_order():
    for nu, x in [(150.0, 160.0), (400.0, 420.0), (1000.0, 1010.0)]:
        assert bessel_j(nu, x) == pytest.approx(jv(nu, x), rel=1e-9), (nu, x)


def test_bessel_j_domain_errors():
    with pytest.raises(PreconditionError):
        bessel_j(-1.5, 1.0)
    with pytest.raises(PreconditionError):
        bessel_j(0.5, 0.0)
    with pytest.raises(PreconditionError):
        bessel_j(0.5, -2.0)


def test_first_zero_classical_values():
    assert bessel_first_zero(0.5) == pytest.approx(math.pi, abs=1e-12)
    assert bessel_first_zero(0.0) == pytest.approx(2.404825557695773, rel=1e-12)
    assert bessel_first_zero(1.0) == pytest.approx(3.8317059702075125, rel=1e-12)
    assert bessel_first_zero(-0.5) == pytest.approx(math.pi / 2.0, rel=1e-12)


def test_first_zero_against_scipy_brentq():
    grid = [-0.9, -0.3, 0.0, 0.25, 0.5, 1.0, 2.5, 5.0, 9.9, 10.0,
            10.5, 17.0, 42.3, 100.0, 317.2, 1000.0]
    for nu in grid:
        assert bessel_first_zero(nu) == pytest.approx(
            reference_first_zero(nu), rel=1e-12), nu


def test_first_zero_random_orders():
    rng = np.random.default_rng(5551)
    for nu in rng.uniform(-0.95, 250.0, size=40):
        nu = float(nu)
        assert bessel_first_zero(nu) == pytest.approx(
            reference_first_zero(nu), rel=1e-12), nu


def test_first_zero_very_large_order_asymptotics():
    # j_{nu,1} = nu + 1.8557571 nu^(1/3) + 1.033150 nu^(-1/3) + O(1/nu)
    for nu in (1e4, 1e5):
        j1 = bessel_first_zero(nu)
        pred = nu + 1.8557571 * nu ** (1.0 / 3.0) + 1.033150 * nu ** (-1.0 / 3.0)
        assert j1 == pytest.approx(pred, abs=2e-3 / nu ** (1 / 3)), nu


def test_first_zero_bracket_and_interlacing():
    rng = np.random.default_rng(77)
    for nu in rng.uniform(-0.9, 400.0, size=60):
        j1 = bessel_first_zero(float(nu))
        assert j1 > max(nu, 0.0)
        assert j1 ** 2 < 2.0 * (nu + 1.0) * (nu + 3.0)


def test_first_zero_strictly_increasing_in_order():
    nus = np.linspace(-0.9, 30.0, 120)
    zeros = [bessel_first_zero(float(v)) for v in nus]
    assert np.all(np.diff(zeros) > 0.0)


def test_first_zero_domain_error():
    with pytest.raises(PreconditionError):
        bessel_first_zero(-1.0)
    with pytest.raises(PreconditionError):
        bessel_first_zero(-2.3)


def test_closed_form_bound_dispatch():
    b = closed_form_bound(0.0, 5.0, 2.0)
    assert isinstance(b, BoundValue)
    assert b.exact and b.formula_tag == "bessel_k0"
    j = bessel_first_zero(5.0 / 2.0 - 1.0)
    assert b.value == pytest.approx(j * j / 4.0, rel=1e-13)

    b = closed_form_bound(-2.0, 3.0, 1.0)
    assert b.exact and b.formula_tag == "exact_n3"
    assert b.value == pytest.approx(1.0 + math.pi ** 2, rel=1e-13)

    b = closed_form_bound(0.0, 3.0, 2.0)
    assert b.exact
    assert b.value == pytest.approx(math.pi ** 2 / 4.0, rel=1e-12)

    b = closed_form_bound(-1.0, 2.0, 1.0)
    assert not b.exact and b.formula_tag == "upper_n_lt_3"
    j0 = bessel_first_zero(0.0)
    assert b.value == pytest.approx(2.0 / 6.0 + j0 * j0, rel=1e-12)

    b = closed_form_bound(-4.0, 5.0, 1.0)
    assert not b.exact and b.formula_tag == "upper_n_gt_3"
    j32 = bessel_first_zero(1.5)
    s = s_kappa(-1.0, 1.0)  # sinh(1)
    expect = 4.0 + j32 * j32 + 2.0 * (1.0 / s ** 2 - 1.0)
    assert b.value == pytest.approx(expect, rel=1e-12)


def test_closed_form_bound_n3_seam_is_continuous():
    # N -> 3 from either side reproduces the exact N=3 formula
    k, r0 = -2.0, 1.3
    exact = closed_form_bound(k, 3.0, r0).value
    lo = closed_form_bound(k, 3.0 - 1e-9, r0).value
    hi = closed_form_bound(k, 3.0 + 1e-9, r0).value
    assert lo == pytest.approx(exact, rel=1e-6)
    assert hi == pytest.approx(exact, rel=1e-6)


def test_closed_form_bound_domain_errors():
    with pytest.raises(PreconditionError):
        closed_form_bound(1.0, 3.0, max_diameter(1.0, 3.0))
    with pytest.raises(PreconditionError):
        closed_form_bound(0.0, 1.0, 1.0)
    with pytest.raises(PreconditionError):
        closed_form_bound(0.0, 3.0, 0.0)


def test_closed_form_dominates_solver():
    rng = np.random.default_rng(8080)
    for _ in range(6):
        K = rng.uniform(-4.0, 1.5)
        N = rng.uniform(1.5, 8.0)
        r0 = rng.uniform(0.4, 2.0)
        if K > 0:
            r0 = min(r0, 0.85 * max_diameter(K, N))
        lam = first_dirichlet_eigen(Density.model(K, N), r0).eigenvalue
        bound = closed_form_bound(K, N, r0).value
        assert lam <= bound * (1.0 + 1e-6), (K, N, r0, lam, bound)


def test_neumann_upper_bound_flat_oracle():
    # the uniform weight on [0, D] has Neumann eigenvalues (j pi / D)^2
    for N in (2.0, 3.0, 5.0):
        for j in (1, 2, 3):
            for D in (1.0, math.pi):
                b = neumann_upper_bound(0.0, N, D, j)
                assert (j * math.pi / D) ** 2 <= b * (1.0 + 1e-9), (N, j, D)


def test_neumann_upper_bound_n3_closed_form():
    # at K=0, N=3 the bound is exactly 4 j^2 pi^2 / D^2
    for j in (1, 2, 4):
        b = neumann_upper_bound(0.0, 3.0, 2.0, j)
        assert b == pytest.approx(4.0 * j * j * math.pi ** 2 / 4.0, rel=1e-12)


def test_neumann_upper_bound_methods_agree():
    a = neumann_upper_bound(-1.0, 3.0, 2.0, 2, method="closed_form")
    b = neumann_upper_bound(-1.0, 3.0, 2.0, 2, method="solver")
    assert a == pytest.approx(b, rel=1e-6)  # N=3 formula is exact


def test_neumann_upper_bound_grows_with_j():
    vals = [neumann_upper_bound(-2.0, 4.0, 3.0, j) for j in (1, 2, 3, 4)]
    assert np.all(np.diff(vals) > 0.0)


def test_neumann_upper_bound_validation():
    with pytest.raises(PreconditionError):
        neumann_upper_bound(0.0, 3.0, math.inf, 1)
    with pytest.raises(PreconditionError):
        neumann_upper_bound(0.0, 3.0, 2.0, 0)
    with pytest.raises(PreconditionError):
        neumann_upper_bound(0.0, 3.0, 2.0, 2, method="guess")
    with pytest.raises(PreconditionError):
        # r0 = diam/2 reaches the diameter bound pi*sqrt(2)
        neumann_upper_bound(1.0, 3.0, 2.0 * max_diameter(1.0, 3.0), 1)


def test_essential_spectrum_threshold():
    assert essential_spectrum_threshold(0.0, 4.0) == 0.0
    assert essential_spectrum_threshold(-4.0, 3.0) == pytest.approx(2.0, rel=1e-15)
    assert essential_spectrum_threshold(-1.0, 5.0) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(PreconditionError) as exc:
        essential_spectrum_threshold(1.0, 3.0)
    assert exc.value.code == "hypothesis"
    with pytest.raises(PreconditionError) as exc:
        essential_spectrum_threshold(-1.0, 2.5)
    assert exc.value.code == "hypothesis"
