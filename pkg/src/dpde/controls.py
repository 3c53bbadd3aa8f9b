"""Boundary-control schedules and the Gevrey smooth step used for motion planning."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit

from .jets import Jet

# Kernel encoding of a schedule, see ``ControlSchedule.kernel_spec``.
KIND_CONSTANT = 0
KIND_WINDOWED_SINE = 1
KIND_TABULATED = 2

_EMPTY = np.zeros(0)


class ControlSchedule:
    """Open-loop boundary control ``u(t)``; instances are immutable and callable."""

    def __call__(self, t: float) -> float:
        raise NotImplementedError

    def kernel_spec(self):
        """``(kind, params, times, values)`` as consumed by :func:`control_value`."""
        raise NotImplementedError

    def check_horizon(self, t_final: float) -> None:
        """Raise if the schedule cannot be evaluated on ``[0, t_final]``."""


@dataclass(frozen=True)
class Constant(ControlSchedule):
    value: float

    def __call__(self, t):
        return float(self.value)

    def kernel_spec(self):
        return KIND_CONSTANT, np.array([float(self.value)]), _EMPTY, _EMPTY


@dataclass(frozen=True)
class WindowedSine(ControlSchedule):
    """``amplitude * sin(omega t)`` on ``[t_on, t_off]`` and zero elsewhere."""

    amplitude: float
    omega: float
    t_off: float
    t_on: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.amplitude):
            raise ValueError("amplitude must be finite")
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if not self.t_off >= self.t_on:
            raise ValueError("empty activity window")

    def __call__(self, t):
        if self.t_on <= t <= self.t_off:
            return self.amplitude * math.sin(self.omega * t)
        return 0.0

    def kernel_spec(self):
        params = np.array([self.amplitude, self.omega, self.t_on, self.t_off], dtype=float)
        return KIND_WINDOWED_SINE, params, _EMPTY, _EMPTY


class Tabulated(ControlSchedule):
    """Piecewise-linear interpolation of ``(times, values)``."""

    def __init__(self, times, values):
        times = np.array(times, dtype=float)
        values = np.array(values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape or times.size < 2:
            raise ValueError("times and values must be 1-D arrays of equal length >= 2")
        if np.any(np.diff(times) <= 0):
            raise ValueError("table times must be strictly increasing")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
            raise ValueError("table entries must be finite")
        if times[0] > 0:
            raise ValueError("table must start at t <= 0")
        times.flags.writeable = False
        values.flags.writeable = False
        self.times = times
        self.values = values

    def __repr__(self):
        return f"Tabulated(n={self.times.size}, t=[{self.times[0]}, {self.times[-1]}])"

    def __call__(self, t):
        if t < self.times[0] or t > self.times[-1]:
            raise ValueError(f"t={t} outside table range [{self.times[0]}, {self.times[-1]}]")
        return float(np.interp(t, self.times, self.values))

    def kernel_spec(self):
        return KIND_TABULATED, _EMPTY, self.times, self.values

    def check_horizon(self, t_final):
        if t_final > self.times[-1]:
            raise ValueError(f"table ends at {self.times[-1]} before t_final={t_final}")


class FlatSeries(Tabulated):
    """Tabulated control produced by the flatness planner; keeps a handle on the plan."""

    def __init__(self, plan, times, values):
        super().__init__(times, values)
        self.plan = plan

    def __repr__(self):
        return f"FlatSeries(c={self.plan.target_value}, T={self.plan.horizon}, K={self.plan.truncation})"


def eval_schedule(sched: ControlSchedule, t: float) -> float:
    if t < 0:
        raise ValueError("controls are defined for t >= 0")
    return sched(t)


@njit(cache=True)
def control_value(kind, params, times, values, t):
    if kind == KIND_CONSTANT:
        return params[0]
    if kind == KIND_WINDOWED_SINE:
        if params[2] <= t <= params[3]:
            return params[0] * math.sin(params[1] * t)
        return 0.0
    return np.interp(t, times, values)


OMEGA = 2 * math.pi / 5

U1 = Constant(1.0)
U2 = WindowedSine(amplitude=0.5, omega=OMEGA, t_off=5.0)
# sin vanishes at t = 2.5, so switching off there keeps u3 continuous.
U3 = WindowedSine(amplitude=0.2, omega=OMEGA, t_off=2.5)

NAMED_CONTROLS = {"u1": U1, "u2": U2, "u3": U3}


# --- Gevrey smooth step -----------------------------------------------------

_PANELS = 64
_GL_ORDER = 24


@dataclass(frozen=True)
class GevreyStep:
    """Smooth 0 -> 1 step over ``[0, duration]`` with flat ends.

    ``y(t) = Phi(t/T) / Phi(1)``, ``Phi(tau) = int_0^tau exp(-1/(x(1-x))**sigma) dx``.
    """

    duration: float
    sigma: float = 1.65
    max_order: int = 10

    def __post_init__(self):
        if not 1.0 <= self.sigma <= 3.0:
            raise ValueError("sigma must lie in [1, 3]")
        if self.max_order < 1:
            raise ValueError("max_order must be >= 1")
        if not self.duration > 0:
            raise ValueError("duration must be positive")

    def __call__(self, t):
        return gevrey_value(self, t)


def _bump(x, sigma):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x > 0) & (x < 1)
    p = x[inside] * (1 - x[inside])
    with np.errstate(over="ignore"):
        out[inside] = np.exp(-(p ** -sigma))
    return out


@lru_cache(maxsize=32)
def _panel_table(sigma):
    nodes, weights = np.polynomial.legendre.leggauss(_GL_ORDER)
    edges = np.linspace(0.0, 1.0, _PANELS + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = mid[:, None] + half[:, None] * nodes[None, :]
    panel = half * (_bump(x, sigma) @ weights)
    cumulative = np.concatenate([[0.0], np.cumsum(panel)])
    return nodes, weights, edges, cumulative


def _primitive(tau, sigma):
    """``Phi(tau)`` by composite Gauss-Legendre on fixed panels plus a partial panel."""
    nodes, weights, edges, cumulative = _panel_table(sigma)
    if tau <= 0:
        return 0.0
    if tau >= 1:
        return float(cumulative[-1])
    j = min(int(tau * _PANELS), _PANELS - 1)
    a = edges[j]
    half = 0.5 * (tau - a)
    partial = half * (_bump(a + half * (nodes + 1), sigma) @ weights)
    return float(cumulative[j] + partial)


def gevrey_value(step: GevreyStep, t: float) -> float:
    tau = t / step.duration
    return _primitive(tau, step.sigma) / _primitive(1.0, step.sigma)


def _bump_jet(tau, sigma, order):
    x = Jet.variable(tau, order)
    p = x * (1 - x)
    w = -(p ** -sigma)
    return w.exp()


def gevrey_jet(step: GevreyStep, t: float, order: int | None = None) -> Jet:
    """Jet of the Gevrey step at ``t``; derivatives come from the bump's jet.

    ``order`` overrides ``step.max_order`` (the planner needs one extra order
    for residual estimates).
    """
    K = step.max_order if order is None else order
    T = step.duration
    if not 0 <= t <= T:
        raise ValueError(f"t={t} outside [0, {T}]")
    tau = t / T
    c = np.zeros(K + 1)
    total = _primitive(1.0, step.sigma)
    if tau <= 0:
        return Jet(c)
    if tau >= 1:
        c[0] = 1.0
        return Jet(c)
    c[0] = _primitive(tau, step.sigma) / total
    if K >= 1:
        bump = _bump_jet(tau, step.sigma, K - 1)
        k = np.arange(1, K + 1)
        # Phi' = bump, then rescale tau -> t / T
        c[1:] = bump.c / k / total * (1.0 / T) ** k
    return Jet(c)
