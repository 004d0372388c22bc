import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from prandtl import (DomainError, GridError, GridFunction, OmegaGrid, SamplingError, omega_of_x,
                     sample, x_of_omega)
from prandtl.grid import sample_omega


def test_default_geometry(grid):
    assert grid.n == 4096 and grid.half_width == 12.0
    assert grid.h == pytest.approx(0.005859375, rel=0, abs=1e-15)
    assert grid.omega[0] == -12.0
    assert grid.omega[-1] == pytest.approx(12.0 - grid.h)
    assert grid.omega[grid.n // 2] == 0.0


def test_nodes_strictly_inside_and_increasing(grid):
    assert np.all(np.abs(grid.x) < 1.0)
    assert np.all(np.diff(grid.x) > 0)


@pytest.mark.parametrize("n,L", [(4096, 12.0), (8192, 12.0), (256, 4.0), (2 ** 20, 12.0), (4096, 16.0)])
def test_endpoint_clustering(n, L):
    g = OmegaGrid(n, L)
    bound = 2.0 * math.exp(-2.0 * L + 2.0 * g.h)
    lo, hi = g.endpoint_distance
    assert hi[-1] <= bound and lo[0] <= bound
    # the stored doubles agree with the exact distances up to rounding of x
    assert abs((1.0 - g.x[-1]) - hi[-1]) <= 4 * np.finfo(float).eps
    assert abs((1.0 + g.x[0]) - lo[0]) <= 4 * np.finfo(float).eps


def test_spectral_grid_duality(grid):
    s = grid.spectral
    assert s.dxi * grid.h == pytest.approx(math.pi / grid.n, rel=1e-15)
    assert s.xi[grid.n // 2] == 0.0
    assert s.pairs_with(grid)
    assert not s.pairs_with(OmegaGrid(4096, 10.0))


def test_weight_matches_one_minus_x_squared(grid):
    inner = np.abs(grid.x) < 0.99
    np.testing.assert_allclose(grid.weight[inner], (1 - grid.x[inner] ** 2), rtol=1e-13)
    np.testing.assert_allclose(grid.sech ** 2, grid.weight, rtol=1e-15)


@pytest.mark.parametrize("n", [0, 7, 100, 4095, 4])
def test_bad_n(n):
    with pytest.raises(GridError):
        OmegaGrid(n, 12.0)


@pytest.mark.parametrize("L", [0.0, -1.0, math.inf, math.nan])
def test_bad_half_width(L):
    with pytest.raises(GridError):
        OmegaGrid(64, L)


def test_too_wide_window_rounds_to_endpoint():
    with pytest.raises(GridError, match="reduce L"):
        OmegaGrid(4096, 40.0)


@given(st.floats(-0.999999, 0.999999))
def test_map_round_trip(x):
    assert x_of_omega(omega_of_x(x)) == pytest.approx(x, abs=1e-15)


@pytest.mark.parametrize("x", [1.0, -1.0, 1.5, math.nan])
def test_omega_of_x_domain(x):
    with pytest.raises(DomainError):
        omega_of_x(x)


def test_x_of_omega_array_and_domain():
    out = x_of_omega(np.array([-1.0, 0.0, 1.0]))
    np.testing.assert_allclose(out, np.tanh([-1.0, 0.0, 1.0]))
    with pytest.raises(DomainError):
        x_of_omega(math.inf)


def test_sample_vectorised_and_scalar(small_grid):
    vec = sample(lambda x: x ** 2, small_grid)
    scal = sample(lambda x: math.cos(x), small_grid)
    np.testing.assert_allclose(vec.values, small_grid.x ** 2)
    np.testing.assert_allclose(scal.values, np.cos(small_grid.x))
    const = sample(lambda x: 3.0, small_grid)
    assert np.all(const.values == 3.0)


def test_sample_reports_bad_node(small_grid):
    with np.errstate(invalid="ignore", divide="ignore"):
        with pytest.raises(SamplingError, match="j=0"):
            sample(lambda x: np.log(x + 1.0 - (1.0 + small_grid.x[0])), small_grid)
    with pytest.raises(SamplingError, match="j="):
        sample_omega(lambda w: np.where(w > 1, np.nan, w), small_grid)


def test_grid_function_is_immutable(small_grid):
    u = sample(lambda x: x, small_grid)
    with pytest.raises(ValueError):
        u.values[0] = 1.0


def test_grid_function_arithmetic(small_grid):
    u = sample(lambda x: x, small_grid)
    v = sample(lambda x: 1 - x, small_grid)
    np.testing.assert_allclose((u + v).values, 1.0)
    np.testing.assert_allclose((2 * u - u).values, u.values)
    with pytest.raises(GridError):
        u + sample(lambda x: x, OmegaGrid(256, 12.0))


def test_grid_function_checks_shape_and_finiteness(small_grid):
    with pytest.raises(GridError):
        GridFunction(small_grid, np.zeros(3))
    with pytest.raises(SamplingError):
        GridFunction(small_grid, np.full(small_grid.n, np.inf))


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([8, 64, 1024]), st.floats(1.0, 15.0))
def test_grid_invariants_hold_when_constructed(n, L):
    g = OmegaGrid(n, L)
    assert np.all(np.diff(g.x) > 0) and g.x[0] > -1 and g.x[-1] < 1
