import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from prandtl import (DomainError, GlauertExpansion, GridFunction, MultiplierTable, QuadratureError,
                     apply_prandtl_pv, apply_prandtl_spectral, glauert_apply, glauert_project,
                     multiplier, pairing, sample, verify_coth_image)
from prandtl.grid import sample_omega
from prandtl.operators import coth_image_exact, edge_tail, multiplier_bounds, theta_of_omega

from conftest import sqrt1mx2


def dsqrt(x):
    return -x / sqrt1mx2(x)


def mode(n):
    return (lambda x: np.sin(n * np.arccos(x)),
            lambda x: -n * np.cos(n * np.arccos(x)) / sqrt1mx2(x))


# ------------------------------------------------------------ multiplier

def test_multiplier_at_zero_and_series_join():
    assert multiplier(0.0) == 1 / math.pi
    for xi in (1e-4 * (1 - 1e-9), 1e-4 * (1 + 1e-9)):
        exact = xi / math.tanh(math.pi * xi)
        assert multiplier(xi) == pytest.approx(exact, rel=1e-14)


def test_multiplier_even_and_saturating():
    xi = np.linspace(-50, 50, 1001)
    np.testing.assert_array_equal(multiplier(xi), multiplier(-xi))
    assert multiplier(20.0) == 20.0
    assert multiplier(1.0) == pytest.approx(1 / math.tanh(math.pi), rel=1e-15)


@given(st.one_of(st.just(0.0), st.floats(1e-3, 1e6), st.floats(-1e6, -1e-3)))
def test_multiplier_two_sided_bound(xi):
    lower, m2, upper = multiplier_bounds(xi)
    assert lower[0] <= m2[0] <= upper[0]
    assert multiplier(xi) >= 1 / math.pi


@pytest.mark.parametrize("xi", [1e-12, 6e-8, 1e-5, -3e-7])
def test_multiplier_bound_near_zero_within_rounding(xi):
    # the lower gap pi^2 xi^4 / 9 is below one ulp of m^2 here
    lower, m2, upper = multiplier_bounds(xi)
    ulp = np.spacing(m2[0])
    assert lower[0] <= m2[0] + 2 * ulp and m2[0] <= upper[0] + 2 * ulp


def test_multiplier_table(grid):
    t = MultiplierTable(grid.spectral)
    assert t.values.shape == (grid.n,)
    assert not t.values.flags.writeable
    assert t.values.min() == pytest.approx(1 / math.pi)


# ------------------------------------------------------------ spectral operator

def test_spectral_image_of_sqrt_profile(grid):
    Ku = apply_prandtl_spectral(sample(sqrt1mx2, grid))
    assert np.max(np.abs(Ku.values - 0.5 * grid.weight)) <= 1e-8


def test_tail_correction_is_what_buys_accuracy(grid):
    u = sample(sqrt1mx2, grid)
    plain = apply_prandtl_spectral(u, tail_correction=False)
    err = np.max(np.abs(plain.values - 0.5 * grid.weight))
    assert 1e-6 < err < 1e-4


def test_tail_basis_is_exact_on_its_own_span(grid):
    tail = edge_tail(grid)
    u = GridFunction(grid, 0.3 * tail.even - 1.7 * tail.odd)
    expected = 0.3 * tail.even_image - 1.7 * tail.odd_image
    assert np.max(np.abs(apply_prandtl_spectral(u).values - expected)) < 1e-13


def test_periodic_operator_symmetric_and_positive(small_grid):
    rng = np.random.default_rng(1)
    u = GridFunction(small_grid, rng.standard_normal(small_grid.n))
    g = GridFunction(small_grid, rng.standard_normal(small_grid.n))
    Ku = apply_prandtl_spectral(u, tail_correction=False)
    Kg = apply_prandtl_spectral(g, tail_correction=False)
    assert abs(pairing(Ku, g) - pairing(u, Kg)) <= 1e-10 * abs(pairing(Ku, g))
    assert pairing(Ku, u).real >= pairing(u, u).real / math.pi * (1 - 1e-12)


def test_spectral_operator_linear(grid):
    a = sample(sqrt1mx2, grid)
    b = sample_omega(lambda w: 1 / np.cosh(2 * w), grid)
    lhs = apply_prandtl_spectral(2 * a + (-3j) * b).values
    rhs = 2 * apply_prandtl_spectral(a).values - 3j * apply_prandtl_spectral(b).values
    assert np.max(np.abs(lhs - rhs)) < 1e-12


# ------------------------------------------------------------ PV quadrature

def test_pv_sqrt_profile():
    assert apply_prandtl_pv(sqrt1mx2, dsqrt, 0.3) == pytest.approx(0.5, abs=1e-10)


def test_pv_second_mode():
    u = lambda x: 2 * x * sqrt1mx2(x)
    du = lambda x: (2 - 4 * x * x) / sqrt1mx2(x)
    assert apply_prandtl_pv(u, du, 0.25) == pytest.approx(0.5, abs=1e-10)


def test_pv_accepts_scalar_callables():
    u = lambda x: math.sqrt(1 - x * x)
    du = lambda x: -x / math.sqrt(1 - x * x)
    assert apply_prandtl_pv(u, du, -0.4) == pytest.approx(0.5, abs=1e-10)


@pytest.mark.parametrize("x", [1.0, -1.0, 2.0])
def test_pv_domain(x):
    with pytest.raises(DomainError):
        apply_prandtl_pv(sqrt1mx2, dsqrt, x)


def test_pv_reports_non_convergence():
    # u and u' inconsistent: the endpoint closure never settles
    with pytest.raises(QuadratureError) as info:
        apply_prandtl_pv(sqrt1mx2, lambda x: x / sqrt1mx2(x), 0.2)
    assert info.value.estimate is not None


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_glauert_eigen_relation_against_quadrature(n):
    u, du = mode(n)
    for x in (-0.8, -0.3, 0.05, 0.6, 0.93):
        th = math.acos(x)
        assert apply_prandtl_pv(u, du, x) == pytest.approx(n * math.sin(n * th) / (2 * math.sin(th)), abs=1e-9)


# ------------------------------------------------------------ Glauert

def test_glauert_expansion_validation():
    with pytest.raises(ValueError):
        GlauertExpansion(np.array([]))
    with pytest.raises(ValueError):
        GlauertExpansion(np.array([1.0, np.nan]))
    e = GlauertExpansion([0.0, 1.0])
    assert e.N == 2
    assert not e.coefficients.flags.writeable


@pytest.mark.parametrize("theta", [0.0, math.pi, -0.1, 4.0])
def test_glauert_apply_domain(theta):
    with pytest.raises(DomainError):
        glauert_apply(GlauertExpansion([1.0]), theta)


def test_glauert_apply_values():
    e = GlauertExpansion([1.0])
    assert glauert_apply(e, 0.7) == pytest.approx(0.5)
    e2 = GlauertExpansion([0.0, 1.0j])
    assert glauert_apply(e2, 1.0) == pytest.approx(1j * 2 * math.cos(1.0))


def test_theta_of_omega_exact_at_edges(grid):
    theta = theta_of_omega(grid.omega)
    inner = np.abs(grid.x) < 0.9
    np.testing.assert_allclose(theta[inner], np.arccos(grid.x[inner]), atol=1e-14)
    assert theta[0] < math.pi and theta[-1] > 0


def test_spectral_matches_glauert_on_sine_modes(grid):
    theta = theta_of_omega(grid.omega)
    idx = np.flatnonzero(np.abs(grid.x) <= 0.95)[::60]
    for n in range(1, 9):
        e = GlauertExpansion(np.eye(8)[n - 1])
        u = GridFunction(grid, e.evaluate_theta(theta))
        spec = apply_prandtl_spectral(u).values[idx] / grid.weight[idx]
        assert np.max(np.abs(spec - glauert_apply(e, theta[idx]))) < 1e-8
        np.testing.assert_allclose(glauert_project(u, 8).coefficients, e.coefficients, atol=1e-12)


def test_evaluate_in_x(grid):
    e = GlauertExpansion([1.0, 0.5])
    x = np.array([-0.5, 0.2])
    np.testing.assert_allclose(e.evaluate(x), sqrt1mx2(x) * (1 + x))


# ------------------------------------------------------------ coth image

# -pi coth(pi xi) by direct hyperbolic evaluation
@pytest.mark.parametrize("xi,expected", [(0.5, -3.4253771499192953), (1.0, -3.153348094937162),
                                         (2.0, -3.1416145652844603)])
def test_coth_image_frozen_values(xi, expected):
    val = verify_coth_image(xi)
    assert val.real == 0.0
    assert val.imag == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize("xi", [0.5, 1.0, 2.0, -1.3, 7.5])
def test_coth_image_against_closed_form(xi):
    assert abs(verify_coth_image(xi) - coth_image_exact(xi)) <= 1e-6


@pytest.mark.parametrize("xi", [0.0, 10.5, math.nan])
def test_coth_image_domain(xi):
    with pytest.raises(DomainError):
        verify_coth_image(xi)
