"""Equilibrium families and the shape-ratio diagnostic.

Under a constant control ``u_e`` a signal profile ``s_e`` with ``s_e(pi) = u_e``
grows the radius linearly, ``r_e(t) = s_e t + r_0``. The shape
``r_e / r_e(pi)`` is stationary exactly when ``r_e`` is a dilation of ``s_e``,
which forces ``s_e s_e'' = (s_e')**2``. Constants solve this with both
boundary conditions; ``u_e exp(lambda (theta - pi))`` solves it with a
zero-slope defect ``u_e lambda exp(-lambda pi)`` at ``theta = 0``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBoundaryRadius
from .geometry import Grid, first_derivative, second_derivative


class Family(enum.Enum):
    ZERO = "zero"
    CONSTANT = "constant"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class EquilibriumProfile:
    s_e: np.ndarray
    u_e: float
    family: Family
    grid: Grid
    lam: float = 0.0
    neumann_defect: float = 0.0


def equilibrium_residual(s_e, grid: Grid) -> np.ndarray:
    """Nodal ``s * s'' - (s')**2`` with the solver's stencils."""
    s_e = grid.check(s_e)
    d1 = first_derivative(s_e, grid)
    return s_e * second_derivative(s_e, grid) - d1 * d1


def zero_equilibrium(grid: Grid) -> EquilibriumProfile:
    return EquilibriumProfile(np.zeros(grid.n_nodes), 0.0, Family.ZERO, grid)


def constant_equilibrium(u_e: float, grid: Grid) -> EquilibriumProfile:
    if u_e == 0:
        return zero_equilibrium(grid)
    return EquilibriumProfile(np.full(grid.n_nodes, float(u_e)), float(u_e), Family.CONSTANT, grid)


def exponential_equilibrium(u_e: float, lam: float, grid: Grid) -> EquilibriumProfile:
    if not u_e > 0:
        raise ValueError("u_e must be positive")
    s_e = u_e * np.exp(lam * (grid.thetas - np.pi))
    s_e[-1] = u_e
    defect = u_e * lam * math.exp(-lam * math.pi)
    family = Family.CONSTANT if lam == 0 else Family.EXPONENTIAL
    return EquilibriumProfile(s_e, float(u_e), family, grid, lam=float(lam), neumann_defect=defect)


def self_similar_radius(profile: EquilibriumProfile, r0_pi: float, t: float) -> np.ndarray:
    """``r_e(t) = s_e * (t + r0_pi / u_e)``, a time-dependent dilation of the signal."""
    if not profile.u_e > 0:
        raise ValueError("self-similar growth needs u_e > 0")
    if not r0_pi > 0:
        raise ValueError("r0_pi must be positive")
    return profile.s_e * (t + r0_pi / profile.u_e)


@dataclass(frozen=True)
class ShapeRatio:
    times: np.ndarray
    rho: np.ndarray  # (n_times, n_nodes)

    def variation(self, t_min: float = -np.inf, t_max: float = np.inf) -> float:
        """``max_theta (max_t rho - min_t rho)`` over snapshots with ``t_min <= t <= t_max``."""
        eps = 1e-9 * max(1.0, float(np.max(np.abs(self.times))))
        sel = (self.times >= t_min - eps) & (self.times <= t_max + eps)
        if not np.any(sel):
            raise ValueError(f"no snapshots in [{t_min}, {t_max}]")
        window = self.rho[sel]
        return float(np.max(window.max(axis=0) - window.min(axis=0)))


def shape_ratio_of(times, radii) -> ShapeRatio:
    radii = np.atleast_2d(np.asarray(radii, dtype=float))
    times = np.asarray(times, dtype=float)
    edge = radii[:, -1]
    if np.any(~(edge > 0)):
        i = int(np.flatnonzero(~(edge > 0))[0])
        raise DegenerateBoundaryRadius(f"r(t={times[i]}, pi) = {edge[i]} is not positive")
    return ShapeRatio(times, radii / edge[:, None])


def shape_ratio(traj, window=(-np.inf, np.inf)):
    """Shape ratio of a trajectory and its variation over ``window``."""
    sr = shape_ratio_of(traj.times, traj.r)
    return sr, sr.variation(*window)
