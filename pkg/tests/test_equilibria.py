import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dpde.controls import U1, Constant
from dpde.dynamics import SimConfig, simulate
from dpde.equilibria import (Family, ShapeRatio, constant_equilibrium, equilibrium_residual,
                             exponential_equilibrium, self_similar_radius, shape_ratio, shape_ratio_of,
                             zero_equilibrium)
from dpde.errors import DegenerateBoundaryRadius
from dpde.geometry import make_grid


@given(c=st.floats(-1e3, 1e3, allow_nan=False), n=st.integers(8, 300))
def test_constant_residual_is_exactly_zero(c, n):
    grid = make_grid(n)
    assert np.all(equilibrium_residual(np.full(grid.n_nodes, c), grid) == 0.0)


def test_quadratic_residual():
    grid = make_grid(50)
    th = grid.thetas
    res = equilibrium_residual(th ** 2, grid)
    assert np.allclose(res[1:-1], -2 * th[1:-1] ** 2, rtol=1e-12, atol=1e-12)


def test_exponential_residual_second_order():
    maxima = []
    for n in (100, 200, 400):
        grid = make_grid(n)
        prof = exponential_equilibrium(1.0, 0.5, grid)
        maxima.append(np.max(np.abs(equilibrium_residual(prof.s_e, grid)[1:-1])))
    orders = np.log2(np.array(maxima[:-1]) / np.array(maxima[1:]))
    assert np.all(orders >= 1.9), orders
    # leading error term is -h^2 lambda^4 s^2 / 4
    assert maxima[1] <= 1.1 * 0.5 ** 4 / 4 * make_grid(200).dtheta ** 2


def test_exponential_profile_fields():
    grid = make_grid(64)
    prof = exponential_equilibrium(1.0, 2.0, grid)
    assert prof.family is Family.EXPONENTIAL
    assert prof.s_e[-1] == prof.u_e == 1.0
    assert prof.neumann_defect == pytest.approx(2 * math.exp(-2 * math.pi))
    assert prof.neumann_defect == pytest.approx(3.7e-3, abs=5e-5)


def test_exponential_lambda_zero_is_constant():
    grid = make_grid(32)
    prof = exponential_equilibrium(0.7, 0.0, grid)
    assert np.all(prof.s_e == 0.7)
    assert prof.neumann_defect == 0.0
    assert prof.family is Family.CONSTANT


def test_defect_decays_past_inverse_pi():
    grid = make_grid(32)
    assert exponential_equilibrium(1.0, 5.0, grid).neumann_defect < exponential_equilibrium(1.0, 2.0, grid).neumann_defect


def test_exponential_rejects_nonpositive_u():
    with pytest.raises(ValueError):
        exponential_equilibrium(0.0, 1.0, make_grid(16))


def test_zero_and_constant_families():
    grid = make_grid(16)
    assert zero_equilibrium(grid).family is Family.ZERO
    assert constant_equilibrium(0.0, grid).family is Family.ZERO
    prof = constant_equilibrium(2.5, grid)
    assert prof.family is Family.CONSTANT and prof.s_e[-1] == prof.u_e


def test_self_similar_dilation_at_t0():
    grid = make_grid(40)
    prof = exponential_equilibrium(2.0, 1.0, grid)
    assert np.allclose(self_similar_radius(prof, 3.0, 0.0), prof.s_e * 1.5, rtol=1e-15)


def test_self_similar_constant_profile():
    grid = make_grid(40)
    r = self_similar_radius(constant_equilibrium(0.5, grid), 1.0, 3.0)
    assert np.allclose(r, 1 + 3 * 0.5, rtol=1e-15)


def test_self_similar_shape_ratio_time_independent():
    grid = make_grid(100)
    prof = exponential_equilibrium(1.0, 0.8, grid)
    a = self_similar_radius(prof, 1.0, 0.0)
    b = self_similar_radius(prof, 1.0, 7.0)
    assert np.allclose(a / a[-1], b / b[-1], rtol=4e-16, atol=0)
    times = np.linspace(0, 10, 41)
    radii = np.stack([self_similar_radius(prof, 1.0, t) for t in times])
    assert shape_ratio_of(times, radii).variation() <= 1e-12


def test_self_similar_rejects_bad_inputs():
    grid = make_grid(16)
    with pytest.raises(ValueError):
        self_similar_radius(zero_equilibrium(grid), 1.0, 1.0)
    with pytest.raises(ValueError):
        self_similar_radius(constant_equilibrium(1.0, grid), -1.0, 1.0)


def test_zero_control_shape_ratio_constant():
    tr = simulate(SimConfig(n_cells=50, t_final=10.0, initial_r=lambda th: 1 + 0.2 * np.cos(th)), Constant(0.0))
    sr, var = shape_ratio(tr)
    assert var == 0.0
    assert np.all(sr.rho[:, -1] == 1.0)


def test_zero_control_run_stays_on_zero_family():
    tr = simulate(SimConfig(n_cells=50, t_final=3.0), Constant(0.0))
    assert np.array_equal(tr.final.s, zero_equilibrium(tr.grid).s_e)


def test_constant_control_shape_ratio_window():
    tr = simulate(SimConfig(t_final=8.0), U1)
    _, var = shape_ratio(tr, (4.0, 8.0))
    assert var <= 0.05


def test_degenerate_boundary_radius():
    radii = np.ones((3, 9))
    radii[1, -1] = 0.0
    with pytest.raises(DegenerateBoundaryRadius):
        shape_ratio_of([0.0, 1.0, 2.0], radii)


def test_variation_window_selection():
    times = np.array([0.0, 1.0, 2.0])
    rho = np.array([[1.0, 1.0], [2.0, 1.0], [2.5, 1.0]])
    sr = ShapeRatio(times, rho)
    assert sr.variation() == 1.5
    assert sr.variation(1.0, 2.0) == 0.5
    with pytest.raises(ValueError):
        sr.variation(5.0, 6.0)
