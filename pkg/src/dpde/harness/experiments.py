"""Experiment runs, summary metrics and grid-refinement studies."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..dynamics import SimMode, Trajectory, simulate
from ..equilibria import shape_ratio
from ..geometry import l2_norm
from .config import parse_config
from .io import export_svg, write_summary, write_trajectory_csv
from .presets import PRESETS, ExperimentPreset, get_preset


NOMINAL_ORDER = 2


def static_series(theta, t, terms: int = 200):
    """Exact static-mode signal for ``u = 1`` from rest (eigenfunction series)."""
    theta = np.asarray(theta, dtype=float)
    m = np.arange(terms)[:, None] + 0.5
    sign = np.where(np.arange(terms) % 2 == 0, 1.0, -1.0)[:, None]
    return 1.0 - np.sum(2 * sign / (np.pi * m) * np.exp(-m * m * t) * np.cos(m * theta), axis=0)


def static_series_radius(theta, t, terms: int = 200):
    """Time integral of :func:`static_series` plus the unit initial radius.

    The undamped part of the integrated series sums to ``(pi**2 - theta**2) / 2``
    (it solves ``-F'' = 1``, ``F'(0) = 0``, ``F(pi) = 0``), which leaves only
    exponentially damped terms to sum.
    """
    theta = np.asarray(theta, dtype=float)
    m = np.arange(terms)[:, None] + 0.5
    sign = np.where(np.arange(terms) % 2 == 0, 1.0, -1.0)[:, None]
    damped = np.sum(2 * sign / (np.pi * m ** 3) * np.exp(-m * m * t) * np.cos(m * theta), axis=0)
    return 1.0 + t - (np.pi ** 2 - theta ** 2) / 2 + damped


def resolve(config) -> ExperimentPreset:
    """A preset by name, or a config file wrapped as an ad-hoc preset."""
    if isinstance(config, ExperimentPreset):
        return config
    if str(config) in PRESETS:
        return get_preset(str(config))
    cfg, schedules = parse_config(config)
    return ExperimentPreset(Path(config).stem, cfg, schedules)


def _value_at(r, thetas, theta):
    return float(np.interp(theta, thetas, r))


def summarize(traj: Trajectory, window=None) -> dict:
    """Summary metrics of a run; the shape-ratio window defaults to the second half of the run."""
    cfg = traj.config
    grid = traj.grid
    r = traj.final.r
    T = cfg.t_final
    if window is None:
        window = (T / 2, T)
    _, variation = shape_ratio(traj, window)
    metrics = {
        "mode": cfg.mode.value,
        "n_cells": cfg.n_cells,
        "t_final": float(T),
        "r_min": float(r.min()),
        "r_max": float(r.max()),
        "r_T_0": float(r[0]),
        "r_T_pi": float(r[-1]),
        "r_T_half_pi": _value_at(r, grid.thetas, math.pi / 2),
        "shape_ratio_variation": variation,
        "shape_ratio_window_start": float(window[0]),
        "shape_ratio_window_end": float(window[1]),
    }
    if cfg.mode is SimMode.GROWING_DOUBLE:
        metrics["signal_L2_T"] = l2_norm(traj.final.s + traj.final.s_R, grid)
        metrics["signal_L_L2_T"] = l2_norm(traj.final.s, grid)
        metrics["signal_R_L2_T"] = l2_norm(traj.final.s_R, grid)
    else:
        metrics["signal_L2_T"] = l2_norm(traj.final.s, grid)
    return metrics


@dataclass
class RunArtifacts:
    trajectory_csv: Path
    summary: Path
    svgs: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)
    trajectory: Trajectory | None = None


def run_experiment(config, out_dir, n_cells: int | None = None, svg_times=()) -> RunArtifacts:
    preset = resolve(config)
    if n_cells is not None:
        preset = preset.with_cells(n_cells)
    traj = simulate(preset.config, preset.schedules)
    out_dir = Path(out_dir)
    csv_path = write_trajectory_csv(traj, out_dir / f"{preset.name}.csv")
    metrics = {"name": preset.name, **summarize(traj)}
    summary = write_summary(metrics, out_dir / f"{preset.name}_summary.txt")
    svgs = export_svg(csv_path, svg_times, out_dir) if svg_times else []
    return RunArtifacts(csv_path, summary, svgs, metrics, traj)


@dataclass
class ConvergenceTable:
    preset: str
    levels: list
    differences: list  # max |r_k(T) - r_{k+1}(T)| on the coarse nodes
    orders: list  # log2(e_k / e_{k+1}); inf when both differences vanish
    oracle_errors: list | None = None  # static mode only: max |r_k(T) - exact|
    oracle_orders: list | None = None

    @property
    def estimated_errors(self) -> list:
        """Richardson estimate of each level's error, assuming the scheme's second order."""
        return [d / (1 - 2.0 ** -NOMINAL_ORDER) for d in self.differences]

    @property
    def exact(self) -> bool:
        return all(d == 0 for d in self.differences)

    def format(self) -> str:
        lines = [f"# convergence of r(T) for {self.preset}",
                 "n_cells,diff_to_next,observed_order,estimated_error"
                 + (",oracle_error,oracle_order" if self.oracle_errors else "")]
        est = self.estimated_errors
        for i, n in enumerate(self.levels):
            diff = self.differences[i] if i < len(self.differences) else None
            order = self.orders[i] if i < len(self.orders) else None
            row = [str(n), "" if diff is None else repr(diff), _order_str(order, diff),
                   "" if diff is None else repr(est[i])]
            if self.oracle_errors:
                oo = self.oracle_orders[i] if i < len(self.oracle_orders) else None
                row += [repr(self.oracle_errors[i]), "" if oo is None else repr(oo)]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"


def _order_str(order, diff):
    if order is None:
        return ""
    if math.isinf(order) and diff == 0:
        return "exact"
    return repr(order)


def _orders(errors):
    out = []
    for a, b in zip(errors[:-1], errors[1:]):
        if a == 0 and b == 0:
            out.append(math.inf)
        elif b == 0:
            out.append(math.inf)
        else:
            out.append(math.log2(a / b))
    return out


def convergence_study(preset, levels) -> ConvergenceTable:
    """Refinement study of ``r(T)`` over grids that double at each level."""
    preset = resolve(preset)
    levels = [int(n) for n in levels]
    if len(levels) < 3:
        raise ValueError("need at least three levels")
    if any(b != 2 * a for a, b in zip(levels[:-1], levels[1:])):
        raise ValueError("each level must double the previous one")
    finals = [simulate(preset.with_cells(n).config.with_(snapshot_every=preset.config.t_final),
                       preset.schedules).final for n in levels]
    diffs = [float(np.max(np.abs(a.r - b.r[::2]))) for a, b in zip(finals[:-1], finals[1:])]
    table = ConvergenceTable(preset.name, levels, diffs, _orders(diffs))
    static_unit = (preset.config.mode is SimMode.STATIC_SINGLE
                   and all(preset.schedules[0](t) == 1.0 for t in np.linspace(0, preset.config.t_final, 11))
                   and np.ndim(preset.config.initial_r) == 0 and preset.config.initial_r == 1.0
                   and np.ndim(preset.config.initial_s) == 0 and preset.config.initial_s == 0.0)
    if static_unit:
        T = preset.config.t_final
        errs = [float(np.max(np.abs(st.r - static_series_radius(st.grid.thetas, T)))) for st in finals]
        table.oracle_errors = errs
        table.oracle_orders = _orders(errs)
    return table
