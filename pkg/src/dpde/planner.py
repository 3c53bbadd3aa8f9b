"""Motion planning for the boundary-controlled diffusion and the growing membrane.

Two tools live here:

* Flatness planning for ``s_t = s_thetatheta``, ``s_theta(0) = 0``, ``s(pi) = u``.
  With flat output ``y(t) = s(t, 0)`` every solution is
  ``s(t, theta) = sum_k y^(k)(t) theta^(2k) / (2k)!``, so picking ``y`` as a
  Gevrey step from 0 to ``c`` yields a control that steers rest to the
  uniform state ``c`` in finite time.
* Shooting-type optimization of a piecewise-linear control for the coupled
  growing system, targeting a terminal radius with a small terminal signal.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .controls import FlatSeries, GevreyStep, Tabulated, gevrey_jet
from .dynamics import SimConfig, SimMode, Trajectory, terminal_state
from .errors import MismatchedGrids, NoDescent, NonPositiveRadius, SeriesDivergence, SimulationFailure
from .geometry import Grid, l2_norm, make_grid, trapezoid_weights

log = logging.getLogger(__name__)

TAIL_TOLERANCE = 1e-3
ARMIJO = 1e-4
MAX_BACKTRACKS = 6


@dataclass(frozen=True)
class GeneralizedHeatProblem:
    """``phi_t = f phi'' + g phi' + h phi`` on ``[0, pi]``; zero slope at 0, control at pi.

    Only ``f = 1, g = h = 0`` is planned by :func:`flatness_control`.
    """

    f: np.ndarray
    g: np.ndarray
    h: np.ndarray
    grid: Grid

    def __post_init__(self):
        for name in ("f", "g", "h"):
            object.__setattr__(self, name, self.grid.check(getattr(self, name), name))
        if np.any(self.f <= 0):
            raise ValueError("diffusion coefficient f must be positive")

    @classmethod
    def standard(cls, grid: Grid) -> "GeneralizedHeatProblem":
        n = grid.n_nodes
        return cls(np.ones(n), np.zeros(n), np.zeros(n), grid)

    @property
    def is_standard(self) -> bool:
        return bool(np.all(self.f == 1) and not np.any(self.g) and not np.any(self.h))


@dataclass(frozen=True)
class FlatPlan:
    target_value: float
    horizon: float
    truncation: int
    sigma: float
    control: FlatSeries = field(repr=False)
    max_tail: float = 0.0

    @property
    def step(self) -> GevreyStep:
        return GevreyStep(self.horizon, self.sigma, self.truncation)

    def flat_output_derivatives(self, t: float, order: int | None = None) -> np.ndarray:
        """``c * [y, y', ..., y^(order)]`` at ``t``."""
        order = self.truncation if order is None else order
        return self.target_value * gevrey_jet(self.step, t, order).derivatives()


def _even_weights(theta, K):
    """``theta^(2k) / (2k)!`` for ``k = 0..K``, shape ``(K+1, len(theta))``."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    k = np.arange(K + 1)[:, None]
    fact = np.array([math.factorial(2 * i) for i in range(K + 1)], dtype=float)[:, None]
    return theta[None, :] ** (2 * k) / fact


def flatness_control(c: float, T: float, K: int = 12, sigma: float = 1.65, samples: int = 2001) -> FlatPlan:
    """Control steering the standard heat problem from rest to the uniform value ``c`` over ``[0, T]``."""
    if not T > 0:
        raise ValueError("horizon must be positive")
    if K < 4:
        raise ValueError("truncation K must be >= 4")
    if samples < 2:
        raise ValueError("need at least two samples")
    step = GevreyStep(T, sigma, K)
    times = np.linspace(0.0, T, samples)
    w_pi = _even_weights(np.pi, K)[:, 0]
    values = np.empty(samples)
    worst = 0.0
    for i, t in enumerate(times):
        d = c * gevrey_jet(step, t).derivatives()
        values[i] = d @ w_pi
        worst = max(worst, abs(d[K]) * w_pi[K])
    if worst > TAIL_TOLERANCE * abs(c):
        raise SeriesDivergence(
            f"series tail {worst:.3g} exceeds {TAIL_TOLERANCE:g}*|c|; raise K or lower sigma")
    plan = FlatPlan(float(c), float(T), int(K), float(sigma), control=None, max_tail=worst)
    control = FlatSeries(plan, times, values)
    object.__setattr__(plan, "control", control)
    return plan


def flatness_field(plan: FlatPlan, t: float, grid: Grid) -> np.ndarray:
    """Truncated series ``phi(t, theta)`` on the grid nodes."""
    d = plan.flat_output_derivatives(t)
    return d @ _even_weights(grid.thetas, plan.truncation)


def flatness_residual(plan: FlatPlan, t: float, theta) -> np.ndarray:
    """``phi_t - phi_thetatheta`` of the truncated series, both evaluated term by term."""
    K = plan.truncation
    d = plan.flat_output_derivatives(t, K + 1)
    w = _even_weights(theta, K)
    phi_t = d[1:K + 2] @ w
    phi_xx = d[1:K + 1] @ w[:K]
    return phi_t - phi_xx


# --- optimization-based planning -------------------------------------------


@dataclass
class PlanReport:
    iterations: int
    cost_history: np.ndarray
    terminal_shape_error: float
    terminal_signal_error: float
    schedule: Tabulated
    knot_values: np.ndarray
    gradient_norm: float
    converged: bool
    reason: str
    simulations: int = 0

    @property
    def cost(self) -> float:
        return float(self.cost_history[-1])


def _mass_factor(knot_times):
    """``L`` with ``L.T @ L`` the P1 mass matrix, so ``||L u||**2 = int u(t)**2 dt`` exactly."""
    n = knot_times.size
    h = np.diff(knot_times)
    M = np.zeros((n, n))
    for j in range(n - 1):
        M[j, j] += h[j] / 3
        M[j + 1, j + 1] += h[j] / 3
        M[j, j + 1] += h[j] / 6
        M[j + 1, j] += h[j] / 6
    return np.linalg.cholesky(M).T


class _Objective:
    def __init__(self, r0, r1, T, knot_times, weights, n_cells, dt_safety):
        self.grid = make_grid(n_cells)
        self.r0 = self.grid.check(r0, "r0")
        self.r1 = self.grid.check(r1, "r1")
        self.knot_times = knot_times
        w_shape, w_signal, w_reg = weights
        sq = np.sqrt(trapezoid_weights(self.grid))
        self.shape_scale = math.sqrt(w_shape) * sq
        self.signal_scale = math.sqrt(w_signal) * sq
        self.reg = math.sqrt(w_reg) * _mass_factor(knot_times)
        self.config = SimConfig(mode=SimMode.GROWING_SINGLE, n_cells=n_cells, t_final=T,
                                dt_safety=dt_safety, snapshot_every=T, initial_r=self.r0, initial_s=0.0)
        self.calls = 0

    def terminal(self, u):
        self.calls += 1
        return terminal_state(self.config, Tabulated(self.knot_times, u))

    def residual(self, u):
        state = self.terminal(u)
        return np.concatenate([self.shape_scale * (state.r - self.r1),
                               self.signal_scale * state.s,
                               self.reg @ u])

    def simulated_part(self, u):
        return self.residual(u)[: 2 * self.grid.n_nodes]


def optimize_control(r0, r1, T: float, knots: int = 20, weights=(1.0, 1.0, 1e-4), tol: float = 1e-8,
                     max_iters: int = 200, *, dt_safety: float = 0.9, fd_step: float = 1e-6,
                     u_init=None, callback: Callable | None = None) -> PlanReport:
    """Fit knot values of a piecewise-linear control so the growing system ends near ``r1``.

    Minimizes ``w_shape ||r(T) - r1||**2 + w_signal ||s(T)||**2 + w_reg ||u||**2``
    starting from ``(r0, s = 0)``. The Jacobian of the residual vector is built
    by forward differences, one extra simulation per knot. Each iteration
    takes a Levenberg-Marquardt (damped Gauss-Newton) direction and accepts
    it only after an Armijo backtracking search, so the cost never increases.
    """
    r0 = np.asarray(r0, dtype=float)
    r1 = np.asarray(r1, dtype=float)
    if r0.shape != r1.shape:
        raise MismatchedGrids("r0 and r1 live on different grids")
    if np.any(r0 <= 0) or np.any(r1 <= 0):
        raise ValueError("r0 and r1 must be positive")
    if knots < 4:
        raise ValueError("need at least 4 knots")
    w_shape, w_signal, w_reg = map(float, weights)
    if w_shape <= 0 or w_signal < 0 or w_reg < 0:
        raise ValueError("weights must be non-negative with w_shape > 0")

    knot_times = np.linspace(0.0, T, knots)
    obj = _Objective(r0, r1, T, knot_times, (w_shape, w_signal, w_reg), r0.size - 1, dt_safety)
    n_sim = 2 * obj.grid.n_nodes
    u = np.zeros(knots) if u_init is None else np.array(u_init, dtype=float)

    def evaluate(v):
        try:
            return obj.residual(v)
        except NonPositiveRadius as exc:
            raise SimulationFailure(f"simulation degenerated: {exc}", knots=v.copy()) from exc

    res = evaluate(u)
    cost = float(res @ res)
    history = [cost]
    mu = 1e-3
    grad_norm = math.inf
    reason = "max_iters"
    converged = False
    it = 0
    while True:
        if cost <= tol * tol:
            reason, converged = "cost below tol**2", True
            break
        jac = np.empty((res.size, knots))
        jac[n_sim:] = obj.reg
        for j in range(knots):
            du = fd_step * max(1.0, abs(u[j]))
            v = u.copy()
            v[j] += du
            jac[:n_sim, j] = (evaluate(v)[:n_sim] - res[:n_sim]) / du
        grad = 2 * jac.T @ res
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm <= tol:
            reason, converged = "gradient below tol", True
            break
        if it >= max_iters:
            break
        JtJ = jac.T @ jac
        rhs = -jac.T @ res
        accepted = False
        while mu < 1e12:
            lhs = JtJ + mu * (np.diag(np.diag(JtJ)) + np.eye(knots) * 1e-12 * np.trace(JtJ))
            d = np.linalg.solve(lhs, rhs)
            slope = float(grad @ d)
            if slope >= 0:
                d, slope = -grad, -grad_norm ** 2
            alpha = 1.0
            for _ in range(MAX_BACKTRACKS):
                trial = u + alpha * d
                try:
                    trial_res = obj.residual(trial)
                except NonPositiveRadius:
                    trial_res = None
                if trial_res is not None:
                    trial_cost = float(trial_res @ trial_res)
                    if trial_cost <= cost + ARMIJO * alpha * slope:
                        accepted = True
                        break
                alpha *= 0.5
            if accepted:
                # a full step means the damping can relax, a shortened one that it was too weak
                mu = max(mu / 5, 1e-10) if alpha == 1.0 else mu * 2
                break
            mu *= 10
        it += 1
        if not accepted:
            report = _report(obj, u, history, it - 1, grad_norm, False, "line search stalled")
            raise NoDescent(f"no descent from J={cost:.6g} (|grad|={grad_norm:.3g})", report=report)
        u, res, cost = trial, trial_res, trial_cost
        history.append(cost)
        log.debug("iter %d  J=%.6e  |grad|=%.3e  alpha=%g  mu=%.1e", it, cost, grad_norm, alpha, mu)
        if callback is not None:
            callback(it, u, cost)
    return _report(obj, u, history, it, grad_norm, converged, reason)


def _report(obj, u, history, iterations, grad_norm, converged, reason):
    state = obj.terminal(u)
    return PlanReport(
        iterations=iterations,
        cost_history=np.array(history),
        terminal_shape_error=l2_norm(state.r - obj.r1, obj.grid),
        terminal_signal_error=l2_norm(state.s, obj.grid),
        schedule=Tabulated(obj.knot_times, u),
        knot_values=np.array(u),
        gradient_norm=grad_norm,
        converged=converged,
        reason=reason,
        simulations=obj.calls,
    )


def tracking_error(traj: Trajectory, reference) -> float:
    """``sup_t ||r(t) - r_ref(t)||_L2`` over the trajectory's snapshots.

    ``reference`` may be a callable ``t -> radius array``, another trajectory
    with the same snapshot times, or an array of shape ``(n_snapshots, n_nodes)``.
    """
    grid = traj.grid
    times = traj.times
    if isinstance(reference, Trajectory):
        if reference.grid.n_cells != grid.n_cells:
            raise MismatchedGrids("reference trajectory lives on another grid")
        if reference.times.shape != times.shape or np.any(np.abs(reference.times - times) > 1e-9):
            raise ValueError("reference trajectory has different snapshot times")
        ref = reference.r
    elif callable(reference):
        ref = [reference(t) for t in times]
    else:
        ref = reference
    worst = 0.0
    for t, r, rr in zip(times, traj.r, ref):
        rr = np.asarray(rr, dtype=float)
        if rr.shape != r.shape:
            raise MismatchedGrids(f"reference at t={t} has shape {rr.shape}, expected {r.shape}")
        worst = max(worst, l2_norm(r - rr, grid))
    return worst
