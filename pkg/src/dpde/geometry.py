"""Angular grid, finite-difference stencils and the Laplace-Beltrami operator.

The membrane is the radial curve ``theta -> r(theta)`` over the half circle
``[0, pi]``. Fields are plain 1-D numpy arrays holding nodal values; the
:class:`Grid` they live on is passed alongside.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import MismatchedGrids, NonPositiveRadius

MIN_CELLS = 8


@dataclass(frozen=True)
class Grid:
    """Uniform node-centred mesh on ``[0, pi]`` including both endpoints."""

    n_cells: int

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < MIN_CELLS:
            raise ValueError(f"n_cells must be an integer >= {MIN_CELLS}, got {self.n_cells!r}")

    @property
    def dtheta(self) -> float:
        return np.pi / self.n_cells

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1

    @cached_property
    def thetas(self) -> np.ndarray:
        th = np.arange(self.n_cells + 1) * (np.pi / self.n_cells)
        th[-1] = np.pi
        th.flags.writeable = False
        return th

    def check(self, f, name="field") -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.shape != (self.n_nodes,):
            raise MismatchedGrids(f"{name} has shape {f.shape}, grid expects ({self.n_nodes},)")
        return f


def make_grid(n_cells: int) -> Grid:
    return Grid(n_cells)


@dataclass(frozen=True)
class MetricData:
    """Induced metric ``g = r**2 + r_theta**2`` plus the radius derivatives used to build it."""

    g: np.ndarray
    r_theta: np.ndarray
    r_thetatheta: np.ndarray = field(repr=False)


def first_derivative(f, grid: Grid) -> np.ndarray:
    """Second-order central differences, one-sided second-order stencils at the ends."""
    f = grid.check(f)
    h = grid.dtheta
    d = np.empty_like(f)
    d[1:-1] = (f[2:] - f[:-2]) / (2 * h)
    # end stencils written in differences so constants cancel exactly
    d[0] = (3 * (f[1] - f[0]) - (f[2] - f[1])) / (2 * h)
    d[-1] = (3 * (f[-1] - f[-2]) - (f[-2] - f[-3])) / (2 * h)
    return d


def second_derivative(f, grid: Grid) -> np.ndarray:
    f = grid.check(f)
    h2 = grid.dtheta ** 2
    d = np.empty_like(f)
    # neighbours summed first so that mirrored inputs give mirrored outputs bit for bit
    d[1:-1] = ((f[:-2] + f[2:]) - 2 * f[1:-1]) / h2
    d[0] = (2 * ((f[2] - f[1]) - (f[1] - f[0])) - ((f[3] - f[2]) - (f[2] - f[1]))) / h2
    d[-1] = (2 * ((f[-3] - f[-2]) - (f[-2] - f[-1])) - ((f[-4] - f[-3]) - (f[-3] - f[-2]))) / h2
    return d


def check_radius(r, grid: Grid) -> np.ndarray:
    r = grid.check(r, "radius")
    bad = np.flatnonzero(~(r > 0))
    if bad.size:
        i = int(bad[0])
        raise NonPositiveRadius(
            f"radius {r[i]!r} <= 0 at theta={grid.thetas[i]:.6g} (node {i})",
            theta=float(grid.thetas[i]),
        )
    return r


def metric(r, grid: Grid) -> MetricData:
    r = check_radius(r, grid)
    r_t = first_derivative(r, grid)
    r_tt = second_derivative(r, grid)
    return MetricData(g=r * r + r_t * r_t, r_theta=r_t, r_thetatheta=r_tt)


def advection_coefficient(r, m: MetricData) -> np.ndarray:
    """Coefficient multiplying ``d_theta s`` (with a minus sign) in the operator."""
    return m.r_theta * (r + m.r_thetatheta) / (m.g * m.g)


def laplace_beltrami(s, r, grid: Grid) -> np.ndarray:
    """Laplace-Beltrami operator of the curve ``r`` applied to ``s``.

    ``(1/g) s'' - (r r' + r' r'') / g**2 * s'`` with ``g = r**2 + r'**2``,
    all derivatives taken with this module's stencils.
    """
    s = grid.check(s, "signal")
    m = metric(r, grid)
    r = np.asarray(r, dtype=float)
    return second_derivative(s, grid) / m.g - advection_coefficient(r, m) * first_derivative(s, grid)


def l2_norm(f, grid: Grid) -> float:
    """Trapezoidal L2(0, pi) norm."""
    f = grid.check(f)
    return float(np.sqrt(trapezoid_weights(grid) @ (f * f)))


def trapezoid_weights(grid: Grid) -> np.ndarray:
    w = np.full(grid.n_nodes, grid.dtheta)
    w[0] = w[-1] = grid.dtheta / 2
    return w
