"""CSV, summary and SVG writers/readers. All writes are atomic (temp file + rename)."""
from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path

import numpy as np

from ..controls import Tabulated
from ..errors import ConfigError, MissingSnapshot


def fmt(x) -> str:
    """Shortest decimal string that round-trips to the same float."""
    return repr(float(x))


def atomic_write(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def trajectory_csv(traj) -> str:
    double = traj.snapshots[0].s_R is not None
    header = "t,theta,r,s_L,s_R" if double else "t,theta,r,s"
    lines = [header]
    thetas = [fmt(x) for x in traj.grid.thetas]
    for st in traj.snapshots:
        t = fmt(st.t)
        cols = [st.r, st.s] + ([st.s_R] if double else [])
        for i, th in enumerate(thetas):
            lines.append(",".join([t, th] + [fmt(c[i]) for c in cols]))
    return "\n".join(lines) + "\n"


def write_trajectory_csv(traj, path) -> Path:
    return atomic_write(path, trajectory_csv(traj))


def read_trajectory_csv(path):
    """Return ``(times, thetas, columns)`` where ``columns[name]`` is ``(n_times, n_nodes)``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = np.array([[float(x) for x in row] for row in reader if row])
    if header[:2] != ["t", "theta"] or header[2:] not in (["r", "s"], ["r", "s_L", "s_R"]):
        raise ValueError(f"{path}: unexpected header {header}")
    times = np.unique(rows[:, 0])
    n_nodes = rows.shape[0] // times.size
    thetas = rows[:n_nodes, 1]
    cols = {name: rows[:, j + 2].reshape(times.size, n_nodes) for j, name in enumerate(header[2:])}
    return times, thetas, cols


def control_csv(sched: Tabulated) -> str:
    lines = ["t,u"] + [f"{fmt(t)},{fmt(u)}" for t, u in zip(sched.times, sched.values)]
    return "\n".join(lines) + "\n"


def write_control_csv(sched: Tabulated, path) -> Path:
    return atomic_write(path, control_csv(sched))


def read_control_csv(path) -> Tabulated:
    times, values = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t", "u"]:
            raise ConfigError(f"{path}: control CSV must start with header 't,u'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                t, u = (float(x) for x in row)
            except ValueError:
                raise ConfigError(f"{path}: bad row {row!r}", line=lineno) from None
            times.append(t)
            values.append(u)
    try:
        return Tabulated(times, values)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def read_profile_csv(path) -> np.ndarray:
    """Nodal profile from a CSV with header ``theta,value``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["theta", "value"]:
            raise ConfigError(f"{path}: profile CSV must start with header 'theta,value'")
        values = [float(row[1]) for row in reader if row]
    return np.array(values)


def write_summary(metrics: dict, path) -> Path:
    text = "".join(f"{k}={fmt(v) if isinstance(v, (float, np.floating)) else v}\n" for k, v in metrics.items())
    return atomic_write(path, text)


def read_summary(path) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        if line.strip():
            k, v = line.split("=", 1)
            try:
                out[k] = float(v)
            except ValueError:
                out[k] = v
    return out


# --- SVG --------------------------------------------------------------------

_VIEW = 400
_MARGIN = 20


def _polyline(xs, ys, scale, style):
    c = _VIEW / 2
    pts = " ".join(f"{c + scale * x:.3f},{c - scale * y:.3f}" for x, y in zip(xs, ys))
    return f'  <polyline points="{pts}" {style}/>\n'


def polar_svg(thetas, r, overlays=(), title="") -> str:
    """Closed polar curve of ``r`` mirrored to ``[-pi, pi]`` plus overlay curves.

    ``overlays`` holds ``(values, colour)`` pairs drawn as ``r + values``.
    Every curve is scaled with the same factor so the drawing fits the fixed viewBox.
    """
    thetas = np.asarray(thetas)
    full_t = np.concatenate([thetas, -thetas[-2::-1]])

    def mirrored(v):
        v = np.asarray(v)
        return np.concatenate([v, v[-2::-1]])

    curves = [(mirrored(r), 'fill="none" stroke="blue" stroke-width="1.5"')]
    for values, colour in overlays:
        curves.append((mirrored(np.asarray(r) + np.asarray(values)),
                       f'fill="none" stroke="{colour}" stroke-width="1"'))
    extent = max(float(np.max(np.abs(c))) for c, _ in curves)
    scale = (_VIEW / 2 - _MARGIN) / max(extent, 1e-12)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_VIEW} {_VIEW}" '
           f'width="{_VIEW}" height="{_VIEW}">\n']
    if title:
        out.append(f"  <title>{title}</title>\n")
    out.append(f'  <line x1="{_MARGIN}" y1="{_VIEW / 2}" x2="{_VIEW - _MARGIN}" y2="{_VIEW / 2}" '
               f'stroke="#ccc" stroke-width="0.5"/>\n')
    for rad, style in curves:
        out.append(_polyline(rad * np.cos(full_t), rad * np.sin(full_t), scale, style))
    out.append("</svg>\n")
    return "".join(out)


def export_svg(csv_path, times, out_dir) -> list[Path]:
    """One SVG per requested snapshot time of a trajectory CSV."""
    snap_times, thetas, cols = read_trajectory_csv(csv_path)
    paths = []
    for t in times:
        hits = np.flatnonzero(np.abs(snap_times - t) <= 1e-9 * max(1.0, abs(t)))
        if not hits.size:
            raise MissingSnapshot(f"no snapshot at t={t} in {csv_path}")
        k = hits[0]
        r = cols["r"][k]
        if "s" in cols:
            overlays = [(cols["s"][k], "red")]
        else:
            overlays = [(cols["s_L"][k], "red"), (cols["s_R"][k], "green")]
        svg = polar_svg(thetas, r, overlays, title=f"t={fmt(snap_times[k])}")
        name = f"{Path(csv_path).stem}_t{fmt(snap_times[k]).replace('.', 'p')}.svg"
        paths.append(atomic_write(Path(out_dir) / name, svg))
    return paths

