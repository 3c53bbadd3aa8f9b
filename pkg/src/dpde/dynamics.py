"""Explicit time integration of the coupled radius/signal systems.

Three modes share one finite-difference kernel:

* ``GROWING_SINGLE``: ``r_t = s``, ``s_t = LB_r s``, ``s(pi) = u``, ``s_theta(0) = 0``.
* ``STATIC_SINGLE``: same, but the signal diffuses with the frozen unit-circle
  operator ``s_t = s_thetatheta``; the radius is still integrated.
* ``GROWING_DOUBLE``: ``r_t = s_L + s_R`` with ``s_L(pi) = u_L``, ``s_R(0) = u_R``
  and zero-slope conditions at the opposite ends.

Both fields are advanced by forward Euler from the same time level. Zero-slope
conditions use a mirror ghost node; Dirichlet values are written after the
interior update.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence, Union

import numpy as np
from numba import njit

from .controls import ControlSchedule, control_value
from .errors import ConfigError, NonPositiveRadius, UnstableStep
from .geometry import Grid, check_radius, make_grid


class SimMode(enum.Enum):
    GROWING_SINGLE = "growing_single"
    STATIC_SINGLE = "static_single"
    GROWING_DOUBLE = "growing_double"

    @property
    def n_controls(self) -> int:
        return 2 if self is SimMode.GROWING_DOUBLE else 1

    @property
    def code(self) -> int:
        return _MODE_CODES[self]


_MODE_CODES = {SimMode.GROWING_SINGLE: 0, SimMode.STATIC_SINGLE: 1, SimMode.GROWING_DOUBLE: 2}

FieldSpec = Union[float, np.ndarray, Callable[[np.ndarray], np.ndarray]]


def _frozen(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class CoupledState:
    t: float
    r: np.ndarray
    s: np.ndarray
    grid: Grid = field(repr=False)
    s_R: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "r", _frozen(self.grid.check(self.r, "r")))
        object.__setattr__(self, "s", _frozen(self.grid.check(self.s, "s")))
        if self.s_R is not None:
            object.__setattr__(self, "s_R", _frozen(self.grid.check(self.s_R, "s_R")))
        for name in ("r", "s", "s_R"):
            v = getattr(self, name)
            if v is not None and not np.all(np.isfinite(v)):
                raise ValueError(f"{name} has non-finite entries at t={self.t}")

    @property
    def s_L(self):
        return self.s


@dataclass(frozen=True)
class SimConfig:
    mode: SimMode = SimMode.GROWING_SINGLE
    n_cells: int = 100
    t_final: float = 8.0
    dt_safety: float = 0.9
    snapshot_every: float = 0.5
    initial_r: FieldSpec = 1.0
    initial_s: FieldSpec = 0.0
    initial_s_R: FieldSpec = 0.0

    def __post_init__(self):
        if not isinstance(self.mode, SimMode):
            object.__setattr__(self, "mode", SimMode(self.mode))
        if not self.t_final > 0:
            raise ConfigError(f"t_final must be positive, got {self.t_final}", key="t_final")
        if not self.snapshot_every > 0:
            raise ConfigError(f"snapshot_every must be positive, got {self.snapshot_every}", key="snapshot_every")
        if not 0 < self.dt_safety <= 1:
            raise ConfigError(f"dt_safety must lie in (0, 1], got {self.dt_safety}", key="dt_safety")

    @property
    def grid(self) -> Grid:
        return make_grid(self.n_cells)

    def with_(self, **changes) -> "SimConfig":
        return replace(self, **changes)


def realize(spec: FieldSpec, grid: Grid) -> np.ndarray:
    """Nodal values of a field given as a constant, an array or a function of theta."""
    if callable(spec):
        values = np.asarray(spec(grid.thetas), dtype=float)
        values = np.broadcast_to(values, (grid.n_nodes,)).copy()
    elif np.ndim(spec) == 0:
        values = np.full(grid.n_nodes, float(spec))
    else:
        values = np.array(spec, dtype=float)
    return grid.check(values)


@dataclass(frozen=True)
class Trajectory:
    snapshots: tuple
    config: SimConfig

    @property
    def grid(self) -> Grid:
        return self.snapshots[0].grid

    @property
    def times(self) -> np.ndarray:
        return np.array([st.t for st in self.snapshots])

    @property
    def r(self) -> np.ndarray:
        """Radii stacked as ``(n_snapshots, n_nodes)``."""
        return np.stack([st.r for st in self.snapshots])

    @property
    def s(self) -> np.ndarray:
        return np.stack([st.s for st in self.snapshots])

    @property
    def s_R(self) -> np.ndarray | None:
        if self.snapshots[0].s_R is None:
            return None
        return np.stack([st.s_R for st in self.snapshots])

    @property
    def final(self) -> CoupledState:
        return self.snapshots[-1]

    def at(self, t: float, atol: float = 1e-9) -> CoupledState:
        times = self.times
        i = int(np.argmin(np.abs(times - t)))
        if abs(times[i] - t) > atol:
            raise KeyError(f"no snapshot at t={t}")
        return self.snapshots[i]


# --- kernel -----------------------------------------------------------------

STATUS_OK = 0
STATUS_NONPOSITIVE = 1


@njit(cache=True)
def _metric_terms(r, h, static, g, b):
    """Fill ``g = r^2 + r_theta^2`` and the advection coefficient ``b``."""
    n = r.size - 1
    if static:
        for i in range(n + 1):
            g[i] = 1.0
            b[i] = 0.0
        return
    inv2h = 1.0 / (2.0 * h)
    invh2 = 1.0 / (h * h)
    for i in range(1, n):
        rt = (r[i + 1] - r[i - 1]) * inv2h
        rtt = ((r[i - 1] + r[i + 1]) - 2.0 * r[i]) * invh2
        gi = r[i] * r[i] + rt * rt
        g[i] = gi
        b[i] = rt * (r[i] + rtt) / (gi * gi)
    rt = (3.0 * (r[1] - r[0]) - (r[2] - r[1])) * inv2h
    rtt = (2.0 * ((r[2] - r[1]) - (r[1] - r[0])) - ((r[3] - r[2]) - (r[2] - r[1]))) * invh2
    g[0] = r[0] * r[0] + rt * rt
    b[0] = rt * (r[0] + rtt) / (g[0] * g[0])
    rt = (3.0 * (r[n] - r[n - 1]) - (r[n - 1] - r[n - 2])) * inv2h
    rtt = (2.0 * ((r[n - 2] - r[n - 1]) - (r[n - 1] - r[n])) - ((r[n - 3] - r[n - 2]) - (r[n - 2] - r[n - 1]))) * invh2
    g[n] = r[n] * r[n] + rt * rt
    b[n] = rt * (r[n] + rtt) / (g[n] * g[n])


@njit(cache=True)
def _diffuse(s, g, b, h, dt, neumann_left, out):
    """Forward-Euler interior update of ``s``; the Dirichlet end is left for the caller."""
    n = s.size - 1
    invh2 = 1.0 / (h * h)
    inv2h = 1.0 / (2.0 * h)
    for i in range(1, n):
        lap = ((s[i - 1] + s[i + 1]) - 2.0 * s[i]) * invh2
        ds = (s[i + 1] - s[i - 1]) * inv2h
        out[i] = s[i] + dt * (lap / g[i] - b[i] * ds)
    if neumann_left:
        out[0] = s[0] + dt * (((s[1] + s[1]) - 2.0 * s[0]) * invh2 / g[0])
    else:
        out[n] = s[n] + dt * (((s[n - 1] + s[n - 1]) - 2.0 * s[n]) * invh2 / g[n])


@njit(cache=True)
def _stable_dt(g, h, safety):
    gmin = g[0]
    for i in range(1, g.size):
        if g[i] < gmin:
            gmin = g[i]
    return safety * (h * h / 2.0) * gmin


@njit(cache=True)
def _step_once(r, s, sR, static, double, h, dt, u_l, u_r, g, b, s_new, sR_new):
    """One Euler step in place, with ``g``/``b`` already evaluated at the old radius.

    Returns the first node where the new radius is not positive, or -1.
    """
    n = r.size - 1
    _diffuse(s, g, b, h, dt, True, s_new)
    s_new[n] = u_l
    if double:
        _diffuse(sR, g, b, h, dt, False, sR_new)
        sR_new[0] = u_r
    bad = -1
    if double:
        for i in range(n + 1):
            r[i] = r[i] + dt * (s[i] + sR[i])
            s[i] = s_new[i]
            sR[i] = sR_new[i]
            if bad < 0 and not r[i] > 0.0:
                bad = i
    else:
        for i in range(n + 1):
            r[i] = r[i] + dt * s[i]
            s[i] = s_new[i]
            if bad < 0 and not r[i] > 0.0:
                bad = i
    return bad


@njit(cache=True)
def _single_step(r, s, sR, mode, h, dt, u_l, u_r):
    n = r.size - 1
    g = np.empty(n + 1)
    b = np.empty(n + 1)
    _metric_terms(r, h, mode == 1, g, b)
    return _step_once(r, s, sR, mode == 1, mode == 2, h, dt, u_l, u_r, g, b,
                      np.empty(n + 1), np.empty(n + 1))


@njit(cache=True)
def _advance(r, s, sR, mode, h, t, t_target, safety,
             kind_l, par_l, tim_l, val_l, kind_r, par_r, tim_r, val_r):
    """Integrate in place from ``t`` to ``t_target``.

    Returns ``(status, t_reached, bad_node, n_steps)``.
    """
    n = r.size - 1
    static = mode == 1
    double = mode == 2
    g = np.empty(n + 1)
    b = np.empty(n + 1)
    s_new = np.empty(n + 1)
    sR_new = np.empty(n + 1)
    steps = 0
    while t < t_target:
        _metric_terms(r, h, static, g, b)
        dt = _stable_dt(g, h, safety)
        t_next = t + dt
        # snap onto the target rather than leave a sliver step behind
        if t_next >= t_target or (t_target - t_next) <= 1e-12 * t_target:
            t_next = t_target
            dt = t_target - t
        u_l = control_value(kind_l, par_l, tim_l, val_l, t_next)
        u_r = 0.0
        if double:
            u_r = control_value(kind_r, par_r, tim_r, val_r, t_next)
        bad = _step_once(r, s, sR, static, double, h, dt, u_l, u_r, g, b, s_new, sR_new)
        t = t_next
        steps += 1
        if bad >= 0:
            return STATUS_NONPOSITIVE, t, bad, steps
    return STATUS_OK, t, -1, steps


# --- public API -------------------------------------------------------------


def _metric_for(state: CoupledState, static: bool):
    g = np.empty(state.grid.n_nodes)
    b = np.empty(state.grid.n_nodes)
    _metric_terms(np.asarray(state.r), state.grid.dtheta, static, g, b)
    return g, b


def stable_dt(state: CoupledState, dt_safety: float, mode: SimMode = SimMode.GROWING_SINGLE) -> float:
    """``dt_safety * dtheta**2 / 2 * min(g)``, with ``g = 1`` in static mode."""
    static = mode is SimMode.STATIC_SINGLE
    if not static:
        check_radius(state.r, state.grid)
    g, _ = _metric_for(state, static)
    return float(_stable_dt(g, state.grid.dtheta, dt_safety))


def _controls_pair(u, mode):
    if mode is SimMode.GROWING_DOUBLE:
        try:
            u_l, u_r = u
        except (TypeError, ValueError):
            raise ConfigError("double-source mode needs two control values") from None
        return float(u_l), float(u_r)
    if np.ndim(u) != 0:
        raise ConfigError("single-source modes take one control value")
    return float(u), 0.0


def step(state: CoupledState, dt: float, u, mode: SimMode) -> CoupledState:
    """One forward-Euler step of length ``dt`` with boundary value(s) ``u``.

    ``u`` is a scalar in single-source modes and ``(u_L, u_R)`` in double mode.
    """
    mode = SimMode(mode)
    u_l, u_r = _controls_pair(u, mode)
    limit = stable_dt(state, 1.0, mode)
    if not 0 < dt <= limit * (1 + 1e-12):
        raise UnstableStep(f"dt={dt!r} outside (0, {limit!r}] at t={state.t}")
    if mode is SimMode.GROWING_DOUBLE and state.s_R is None:
        raise ConfigError("double-source mode needs a state with s_R")
    r = np.array(state.r)
    s = np.array(state.s)
    sR = np.array(state.s_R) if mode is SimMode.GROWING_DOUBLE else np.zeros(0)
    t = state.t + dt
    bad = _single_step(r, s, sR, mode.code, state.grid.dtheta, float(dt), u_l, u_r)
    if bad >= 0:
        raise NonPositiveRadius(
            f"radius {r[bad]!r} <= 0 at t={t!r}, theta={state.grid.thetas[bad]:.6g}",
            t=t, theta=float(state.grid.thetas[bad]))
    return CoupledState(t=t, r=r, s=s, grid=state.grid,
                        s_R=sR if mode is SimMode.GROWING_DOUBLE else None)


def initial_state(config: SimConfig, schedules: Sequence[ControlSchedule]) -> CoupledState:
    """Initial data with the boundary controls at ``t = 0`` already imposed."""
    grid = config.grid
    r = realize(config.initial_r, grid)
    check_radius(r, grid)
    s = realize(config.initial_s, grid)
    s[-1] = schedules[0](0.0)
    s_R = None
    if config.mode is SimMode.GROWING_DOUBLE:
        s_R = realize(config.initial_s_R, grid)
        s_R[0] = schedules[1](0.0)
    return CoupledState(t=0.0, r=r, s=s, grid=grid, s_R=s_R)


def snapshot_times(t_final: float, every: float) -> np.ndarray:
    k = np.arange(int(math.floor(t_final / every + 1e-9)) + 1)
    times = k * every
    times = times[times < t_final - 1e-9 * max(1.0, t_final)]
    return np.append(times, t_final)


def _normalize_schedules(config, schedules):
    if isinstance(schedules, ControlSchedule):
        schedules = (schedules,)
    schedules = tuple(schedules)
    if len(schedules) != config.mode.n_controls:
        raise ConfigError(
            f"mode {config.mode.value} needs {config.mode.n_controls} control schedule(s), got {len(schedules)}")
    for sched in schedules:
        sched.check_horizon(config.t_final)
    return schedules


def simulate(config: SimConfig, schedules) -> Trajectory:
    """Integrate from 0 to ``config.t_final`` recording snapshots every ``snapshot_every``.

    The step size is recomputed from the stability bound at every step and
    clipped so that snapshot times are hit exactly.
    """
    schedules = _normalize_schedules(config, schedules)
    state = initial_state(config, schedules)
    grid = state.grid
    double = config.mode is SimMode.GROWING_DOUBLE
    r = np.array(state.r)
    s = np.array(state.s)
    sR = np.array(state.s_R) if double else np.zeros(0)
    spec_l = schedules[0].kernel_spec()
    spec_r = schedules[1].kernel_spec() if double else schedules[0].kernel_spec()

    snaps = [state]
    t = 0.0
    for t_target in snapshot_times(config.t_final, config.snapshot_every)[1:]:
        status, t, bad, _ = _advance(r, s, sR, config.mode.code, grid.dtheta, t, float(t_target),
                                     config.dt_safety, *spec_l, *spec_r)
        if status == STATUS_NONPOSITIVE:
            raise NonPositiveRadius(
                f"radius {r[bad]!r} <= 0 at t={t:.6g}, theta={grid.thetas[bad]:.6g}",
                t=t, theta=float(grid.thetas[bad]))
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(r))):
            raise UnstableStep(f"non-finite values by t={t:.6g}")
        snaps.append(CoupledState(t=float(t_target), r=r.copy(), s=s.copy(), grid=grid,
                                  s_R=sR.copy() if double else None))
    return Trajectory(snapshots=tuple(snaps), config=config)


def terminal_state(config: SimConfig, schedules) -> CoupledState:
    """Final state only; cheaper than :func:`simulate` when snapshots are not needed."""
    return simulate(config.with_(snapshot_every=config.t_final), schedules).final
