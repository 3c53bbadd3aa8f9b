import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dpde.controls import U1, U2, U3, Constant, Tabulated
from dpde.dynamics import (CoupledState, SimConfig, SimMode, simulate, snapshot_times, stable_dt, step,
                           terminal_state)
from dpde.errors import ConfigError, NonPositiveRadius, UnstableStep
from dpde.geometry import laplace_beltrami, make_grid


def series_oracle(theta, t, terms=200):
    k = np.arange(terms)[:, None]
    mu = k + 0.5
    coef = 2 * (-1.0) ** k / (np.pi * mu)
    return 1 - np.sum(coef * np.exp(-mu ** 2 * t) * np.cos(mu * theta[None, :]), axis=0)


def state(grid, r, s=0.0, s_R=None, t=0.0):
    r = np.broadcast_to(np.asarray(r, dtype=float), (grid.n_nodes,)).copy()
    s = np.broadcast_to(np.asarray(s, dtype=float), (grid.n_nodes,)).copy()
    if s_R is not None:
        s_R = np.broadcast_to(np.asarray(s_R, dtype=float), (grid.n_nodes,)).copy()
    return CoupledState(t=t, r=r, s=s, grid=grid, s_R=s_R)


# --- stable_dt ----------------------------------------------------------------

def test_stable_dt_unit_circle():
    grid = make_grid(100)
    assert stable_dt(state(grid, 1.0), 0.9) == pytest.approx(0.9 * (np.pi / 100) ** 2 / 2, rel=1e-15)


def test_stable_dt_scales_with_metric():
    grid = make_grid(100)
    assert stable_dt(state(grid, 2.0), 0.9) == pytest.approx(4 * stable_dt(state(grid, 1.0), 0.9), rel=1e-14)


def test_stable_dt_uses_min_metric():
    grid = make_grid(200)
    th = grid.thetas
    g = (2 + np.cos(th)) ** 2 + np.sin(th) ** 2
    expected = 0.5 * grid.dtheta ** 2 / 2 * g.min()
    # the discrete r' differs from -sin by O(h^2)
    assert stable_dt(state(grid, 2 + np.cos(th)), 0.5) == pytest.approx(expected, rel=1e-4)


def test_stable_dt_static_ignores_radius():
    grid = make_grid(50)
    assert stable_dt(state(grid, 3.0), 1.0, SimMode.STATIC_SINGLE) == pytest.approx(grid.dtheta ** 2 / 2)


def test_stable_dt_rejects_nonpositive_radius():
    grid = make_grid(20)
    r = np.ones(grid.n_nodes)
    r[5] = 0.0
    with pytest.raises(NonPositiveRadius):
        stable_dt(state(grid, r), 0.9)


# --- step ----------------------------------------------------------------------

def test_zero_control_step_is_identity():
    grid = make_grid(64)
    st0 = state(grid, 1.3)
    dt = stable_dt(st0, 0.9)
    st1 = step(st0, dt, 0.0, SimMode.GROWING_SINGLE)
    assert st1.t == dt
    assert np.array_equal(st1.r, st0.r) and np.array_equal(st1.s, st0.s)


def test_static_single_step_applies_dirichlet_only():
    grid = make_grid(40)
    st0 = state(grid, 1.0)
    st1 = step(st0, stable_dt(st0, 0.9, SimMode.STATIC_SINGLE), 1.0, SimMode.STATIC_SINGLE)
    assert st1.s[-1] == 1.0
    assert np.all(st1.s[:-1] == 0.0)
    # r is updated from the old s, which was zero everywhere
    assert np.all(st1.r == 1.0)
    st2 = step(st1, stable_dt(st1, 0.9, SimMode.STATIC_SINGLE), 1.0, SimMode.STATIC_SINGLE)
    grown = np.flatnonzero(st2.r != 1.0)
    assert list(grown) == [grid.n_cells]


def test_step_matches_geometry_operator_in_interior():
    grid = make_grid(80)
    th = grid.thetas
    r = 2 + 0.3 * np.cos(th)
    s = 0.2 + 0.1 * np.cos(2 * th)
    st0 = state(grid, r, s)
    dt = 0.5 * stable_dt(st0, 1.0)
    st1 = step(st0, dt, s[-1], SimMode.GROWING_SINGLE)
    expected = s + dt * laplace_beltrami(s, r, grid)
    assert np.allclose(st1.s[1:-1], expected[1:-1], rtol=0, atol=1e-14)
    assert np.allclose(st1.r, r + dt * s, rtol=0, atol=1e-15)


def test_double_step_mirror_symmetry():
    grid = make_grid(60)
    th = grid.thetas
    r = 1 + 0.1 * np.cos(2 * th)
    sL = 0.3 * np.exp(th - np.pi)
    st0 = state(grid, r, sL, sL[::-1].copy())
    st = st0
    for _ in range(25):
        st = step(st, stable_dt(st, 0.9), (0.4, 0.4), SimMode.GROWING_DOUBLE)
        assert np.max(np.abs(st.r - st.r[::-1])) <= 1e-13
        assert np.max(np.abs(st.s_L - st.s_R[::-1])) <= 1e-13


def test_step_rejects_unstable_dt():
    grid = make_grid(30)
    st0 = state(grid, 1.0)
    with pytest.raises(UnstableStep):
        step(st0, 1.01 * stable_dt(st0, 1.0), 0.0, SimMode.GROWING_SINGLE)


def test_step_reports_nonpositive_radius_location():
    grid = make_grid(30)
    s = np.zeros(grid.n_nodes)
    s[-1] = -1e6
    st0 = state(grid, 1.0, s)
    with pytest.raises(NonPositiveRadius) as err:
        step(st0, stable_dt(st0, 0.9), -1e6, SimMode.GROWING_SINGLE)
    assert err.value.theta == pytest.approx(np.pi)
    assert err.value.t > 0


# --- simulate --------------------------------------------------------------------

def test_snapshot_times_include_ends():
    assert list(snapshot_times(1.0, 0.3)) == pytest.approx([0, 0.3, 0.6, 0.9, 1.0])
    assert list(snapshot_times(1.0, 0.5)) == pytest.approx([0, 0.5, 1.0])


def test_trajectory_times_and_boundary_values():
    tr = simulate(SimConfig(n_cells=40, t_final=2.0, snapshot_every=0.25), U2)
    assert np.allclose(tr.times, np.arange(9) * 0.25, rtol=0, atol=1e-15)
    for snap in tr.snapshots:
        assert snap.s[-1] == pytest.approx(U2(snap.t), abs=1e-15)


def test_zero_control_fixed_point():
    tr = simulate(SimConfig(t_final=10.0), Constant(0.0))
    assert np.max(np.abs(tr.final.r - 1.0)) <= 1e-14
    assert np.all(tr.final.s == 0.0)


def test_schedule_count_mismatch():
    with pytest.raises(ConfigError):
        simulate(SimConfig(mode=SimMode.GROWING_DOUBLE, t_final=1.0), U1)
    with pytest.raises(ConfigError):
        simulate(SimConfig(t_final=1.0), (U1, U1))


def test_short_table_is_rejected():
    with pytest.raises(ValueError):
        simulate(SimConfig(t_final=2.0), Tabulated([0.0, 1.0], [0.0, 1.0]))


def test_simulation_failure_has_time_stamp():
    with pytest.raises(NonPositiveRadius) as err:
        simulate(SimConfig(t_final=5.0), Constant(-2.0))
    assert 0 < err.value.t <= 5.0


@pytest.mark.parametrize("sched", [U1, U2], ids=["u1", "u2"])
def test_maximum_principle(sched):
    tr = simulate(SimConfig(n_cells=60, t_final=8.0, snapshot_every=0.05), sched)
    eps = 1e-10
    seen_lo = seen_hi = 0.0
    for snap in tr.snapshots:
        ts = np.linspace(0, snap.t, 400)
        us = np.array([sched(t) for t in ts])
        seen_lo = min(seen_lo, us.min())
        seen_hi = max(seen_hi, us.max())
        assert snap.s.min() >= seen_lo - eps
        assert snap.s.max() <= seen_hi + eps


def test_double_mode_mirror_symmetry_full_run():
    cfg = SimConfig(mode=SimMode.GROWING_DOUBLE, t_final=10.0)
    tr = simulate(cfg, (U3, U3))
    for snap in tr.snapshots:
        assert np.max(np.abs(snap.r - snap.r[::-1])) <= 1e-9


def test_static_mode_matches_series():
    cfg = SimConfig(mode=SimMode.STATIC_SINGLE, n_cells=200, t_final=0.5)
    s = terminal_state(cfg, U1).s
    err = np.max(np.abs(s - series_oracle(cfg.grid.thetas, 0.5)))
    assert err <= 1e-3


def test_static_mode_second_order():
    errs = []
    for n in (50, 100, 200):
        cfg = SimConfig(mode=SimMode.STATIC_SINGLE, n_cells=n, t_final=0.5)
        s = terminal_state(cfg, U1).s
        errs.append(np.max(np.abs(s - series_oracle(cfg.grid.thetas, 0.5))))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 1.8), orders


def test_growing_refinement_order_on_sine_control():
    finals = [terminal_state(SimConfig(n_cells=n, t_final=10.0), U2).r for n in (50, 100, 200, 400)]
    diffs = [np.max(np.abs(finals[i + 1][::2] - finals[i])) for i in range(3)]
    orders = np.log2(np.array(diffs[:-1]) / np.array(diffs[1:]))
    assert np.all(orders >= 1.5), orders


@given(amp=st.floats(-0.3, 0.6), n=st.sampled_from([16, 24, 40]))
def test_single_source_radius_follows_integrated_signal(amp, n):
    # r(T) - r(0) equals the time integral of s, which stays within the control's range
    cfg = SimConfig(n_cells=n, t_final=1.0, snapshot_every=1.0)
    tr = simulate(cfg, Constant(amp))
    growth = tr.final.r - 1.0
    lo, hi = min(0.0, amp), max(0.0, amp)
    assert np.all(growth >= lo - 1e-12) and np.all(growth <= hi + 1e-12)


def test_state_arrays_are_read_only():
    tr = simulate(SimConfig(n_cells=16, t_final=0.5), U1)
    with pytest.raises(ValueError):
        tr.final.r[0] = 2.0
