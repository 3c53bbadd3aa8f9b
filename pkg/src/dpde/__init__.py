"""Coupled growth/diffusion model of a radially parametrized membrane.

The radius ``r(theta, t)`` over the half circle grows at the local signal
concentration ``s``; ``s`` diffuses by the Laplace-Beltrami operator of the
current curve and is driven from one boundary point by a control ``u(t)``.
"""
from .controls import U1, U2, U3, Constant, GevreyStep, Tabulated, WindowedSine
from .dynamics import CoupledState, SimConfig, SimMode, Trajectory, simulate, step, terminal_state
from .geometry import Grid, laplace_beltrami, make_grid

__version__ = "0.1.0"

__all__ = [
    "U1", "U2", "U3", "Constant", "GevreyStep", "Tabulated", "WindowedSine",
    "CoupledState", "SimConfig", "SimMode", "Trajectory", "simulate", "step", "terminal_state",
    "Grid", "laplace_beltrami", "make_grid",
]
