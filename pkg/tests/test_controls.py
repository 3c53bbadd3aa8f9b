import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dpde.controls import (U1, U2, U3, Constant, GevreyStep, Tabulated, WindowedSine, eval_schedule,
                           gevrey_jet, gevrey_value)
from dpde.jets import Jet


# --- jets -------------------------------------------------------------------

def test_jet_product_and_quotient():
    x = Jet.variable(0.7, 6)
    p = x * x * x
    assert np.allclose(p.derivatives()[:4], [0.343, 3 * 0.49, 6 * 0.7, 6])
    q = (p / x).derivatives()
    assert np.allclose(q[:3], [0.49, 1.4, 2.0]) and np.allclose(q[3:], 0, atol=1e-10)


@pytest.mark.parametrize("x0", [0.3, 1.0, 2.5])
def test_jet_elementary_functions(x0):
    x = Jet.variable(x0, 7)
    k = np.arange(8)
    fact = np.array([math.factorial(i) for i in k], dtype=float)
    assert np.allclose(x.exp().c, math.exp(x0) / fact)
    # d^k log x = (-1)^(k-1) (k-1)! / x^k
    logd = x.log().derivatives()
    assert logd[0] == pytest.approx(math.log(x0))
    for i in range(1, 8):
        assert logd[i] == pytest.approx((-1) ** (i - 1) * math.factorial(i - 1) / x0 ** i, rel=1e-12)
    alpha = -1.65
    powd = (x ** alpha).derivatives()
    coef = 1.0
    for i in range(8):
        assert powd[i] == pytest.approx(coef * x0 ** (alpha - i), rel=1e-12)
        coef *= alpha - i


@given(st.floats(0.05, 0.95), st.floats(1.0, 3.0))
def test_jet_exp_log_roundtrip(x0, sigma):
    x = Jet.variable(x0, 8)
    p = x * (1 - x)
    back = (p ** sigma).log() / sigma
    assert np.allclose(back.c, p.log().c, rtol=1e-10, atol=1e-10)


# --- schedules --------------------------------------------------------------

def test_named_controls():
    assert eval_schedule(U1, 3.3) == 1.0
    assert eval_schedule(U2, 1.25) == pytest.approx(0.5, abs=1e-15)
    assert eval_schedule(U2, 6.0) == 0.0
    assert abs(eval_schedule(U3, 2.5)) < 1e-15
    assert eval_schedule(U3, 4.0) == 0.0
    assert eval_schedule(U3, 0.625) == pytest.approx(0.2 * math.sin(math.pi / 4))


@pytest.mark.parametrize("sched,edge", [(U2, 5.0), (U3, 2.5)])
def test_windowed_sine_continuity(sched, edge):
    for dt in (1e-6, 1e-9):
        assert abs(sched(edge - dt)) < 1e-5 and sched(edge + dt) == 0.0


def test_schedule_validation():
    with pytest.raises(ValueError):
        WindowedSine(0.5, 0.0, 5.0)
    with pytest.raises(ValueError):
        WindowedSine(math.inf, 1.0, 5.0)
    with pytest.raises(ValueError):
        Tabulated([0.0, 1.0, 1.0], [0, 1, 2])
    with pytest.raises(ValueError):
        Tabulated([0.5, 1.0], [0, 1])
    with pytest.raises(ValueError):
        eval_schedule(U1, -1.0)


def test_tabulated_interpolation_and_range():
    tab = Tabulated([0.0, 1.0, 3.0], [0.0, 2.0, -2.0])
    assert tab(0.5) == 1.0 and tab(2.0) == 0.0 and tab(3.0) == -2.0
    with pytest.raises(ValueError):
        tab(3.5)


def test_kernel_evaluation_matches_python():
    from dpde.controls import control_value
    tab = Tabulated(np.linspace(0, 10, 17), np.sin(np.linspace(0, 10, 17)))
    for sched in (U1, U2, U3, Constant(-0.3), tab):
        spec = sched.kernel_spec()
        for t in np.linspace(0, 10, 101):
            assert control_value(*spec, t) == sched(t)


# --- Gevrey step ------------------------------------------------------------

STEP = GevreyStep(duration=5.0, sigma=1.65, max_order=10)


def test_gevrey_flat_endpoints():
    start = gevrey_jet(STEP, 0.0).derivatives()
    end = gevrey_jet(STEP, 5.0).derivatives()
    assert start[0] == 0.0 and end[0] == 1.0
    assert np.all(np.abs(start[1:]) <= 1e-12) and np.all(np.abs(end[1:]) <= 1e-12)


@pytest.mark.parametrize("eps", [1e-3, 1e-2, 0.05])
def test_gevrey_flat_near_endpoints(eps):
    # derivatives decay to zero when approaching the ends (not just at them)
    for t in (eps, 5.0 - eps):
        d = gevrey_jet(STEP, t).derivatives()
        assert np.all(np.abs(d[1:]) <= 1e-10)


def test_gevrey_midpoint_value():
    assert gevrey_value(STEP, 2.5) == pytest.approx(0.5, abs=1e-14)
    d = gevrey_jet(STEP, 2.5).derivatives()
    # odd symmetry about the midpoint kills even derivatives
    assert np.all(np.abs(d[2::2]) <= 1e-10 * np.max(np.abs(d[1:])))


def _all_derivatives(t):
    d = gevrey_jet(STEP, t).derivatives()
    d[0] = gevrey_value(STEP, t)  # quadrature, independent of the jet
    return d


@pytest.mark.parametrize("t", [0.6, 1.0, 1.7, 2.5, 3.3, 4.0, 4.4])
def test_gevrey_jet_chain_against_finite_differences(t):
    # each order must be the fourth-order central difference of the one below it
    h = 1e-3
    fd = (-_all_derivatives(t + 2 * h) + 8 * _all_derivatives(t + h)
          - 8 * _all_derivatives(t - h) + _all_derivatives(t - 2 * h)) / (12 * h)
    jet = _all_derivatives(t)[1:]
    floor = 1e-6 * np.max(np.abs(jet))
    assert np.all(np.abs(fd[:-1] - jet) <= 1e-6 * np.abs(jet) + floor)


def _central(f, k, t, h):
    if k == 1:
        return (f(t + h) - f(t - h)) / (2 * h)
    if k == 2:
        return (f(t + h) - 2 * f(t) + f(t - h)) / h ** 2
    if k == 3:
        return (f(t + 2 * h) - 2 * f(t + h) + 2 * f(t - h) - f(t - 2 * h)) / (2 * h ** 3)
    return (f(t + 2 * h) - 4 * f(t + h) + 6 * f(t) - 4 * f(t - h) + f(t - 2 * h)) / h ** 4


def richardson(f, k, t, h):
    """Two Richardson levels on top of the O(h^2) central stencils."""
    a, b, c = (_central(f, k, t, h / m) for m in (1, 2, 4))
    return (16 * (4 * c - b) / 3 - (4 * b - a) / 3) / 15


@pytest.mark.parametrize("t", [1.0, 1.7, 2.5, 3.3, 4.0])
def test_gevrey_jet_orders_1_to_4_against_richardson(t):
    jet = gevrey_jet(STEP, t).derivatives()
    value = lambda x: gevrey_value(STEP, x)
    scale = np.max(np.abs(jet[1:5]))
    for k in range(1, 5):
        fd = richardson(value, k, t, 0.04)
        # normalised by the largest order so derivatives that vanish at T/2 stay meaningful
        assert abs(fd - jet[k]) <= 1e-6 * max(abs(jet[k]), scale), k


def test_gevrey_monotone_and_symmetric():
    ts = np.linspace(0, 5, 1001)
    y = np.array([gevrey_value(STEP, t) for t in ts])
    assert np.all(np.diff(y) >= 0)
    assert np.allclose(y + y[::-1], 1.0, rtol=0, atol=1e-10)


@given(st.floats(1.0, 3.0), st.floats(0.5, 20.0), st.floats(0.0, 1.0))
def test_gevrey_properties(sigma, T, frac):
    step = GevreyStep(T, sigma, 6)
    t = frac * T
    y = gevrey_value(step, t)
    assert -1e-15 <= y <= 1 + 1e-15
    mirror = gevrey_value(step, T - t)
    assert y + mirror == pytest.approx(1.0, abs=1e-10)


def test_gevrey_validation():
    with pytest.raises(ValueError):
        GevreyStep(5.0, sigma=0.5)
    with pytest.raises(ValueError):
        GevreyStep(5.0, max_order=0)
    with pytest.raises(ValueError):
        gevrey_jet(STEP, 5.5)
