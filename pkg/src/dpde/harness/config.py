"""Flat ``key=value`` run configuration.

Example::

    # apple-shaped growth
    mode=growing_single
    n_cells=100
    t_final=10
    control=u2

``r0``/``s0``/``s0_right`` take ``constant:<v>`` or ``csv:<path>`` (header
``theta,value``); ``control``/``control_right`` take ``u1``, ``u2``, ``u3``,
``constant:<v>`` or ``csv:<path>`` (header ``t,u``). Relative CSV paths are
resolved against the config file's directory.
"""
from __future__ import annotations

from pathlib import Path

from ..controls import NAMED_CONTROLS, Constant
from ..dynamics import SimConfig, SimMode
from ..errors import ConfigError
from ..geometry import Grid
from .io import read_control_csv, read_profile_csv

DEFAULTS = {
    "mode": "growing_single",
    "n_cells": "100",
    "t_final": "8",
    "dt_safety": "0.9",
    "snapshot_every": "0.5",
    "r0": "constant:1",
    "s0": "constant:0",
}
KEYS = set(DEFAULTS) | {"control", "control_right", "s0_right"}


def _number(raw, key, line, kind=float):
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected {kind.__name__}, got {raw!r}", line=line, key=key) from None


def _profile(raw, key, line, base):
    kind, _, arg = raw.partition(":")
    if kind == "constant":
        return _number(arg, key, line)
    if kind == "csv":
        try:
            return read_profile_csv(base / arg)
        except OSError as exc:
            raise ConfigError(f"{key}: {exc}", line=line, key=key) from None
    raise ConfigError(f"{key}: expected constant:<v> or csv:<path>, got {raw!r}", line=line, key=key)


def _schedule(raw, key, line, base):
    if raw in NAMED_CONTROLS:
        return NAMED_CONTROLS[raw]
    kind, _, arg = raw.partition(":")
    if kind == "constant":
        return Constant(_number(arg, key, line))
    if kind == "csv":
        try:
            return read_control_csv(base / arg)
        except OSError as exc:
            raise ConfigError(f"{key}: {exc}", line=line, key=key) from None
    raise ConfigError(f"{key}: expected u1|u2|u3|constant:<v>|csv:<path>, got {raw!r}", line=line, key=key)


def parse_config_text(text: str, base=".") -> tuple[SimConfig, tuple]:
    base = Path(base)
    raw, lines = {}, {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value, got {line!r}", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}", line=lineno, key=key)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r}", line=lineno, key=key)
        raw[key], lines[key] = value, lineno
    for key, value in DEFAULTS.items():
        raw.setdefault(key, value)

    def ln(key):
        return lines.get(key)

    try:
        mode = SimMode(raw["mode"])
    except ValueError:
        choices = ", ".join(m.value for m in SimMode)
        raise ConfigError(f"mode must be one of {choices}", line=ln("mode"), key="mode") from None
    n_cells = _number(raw["n_cells"], "n_cells", ln("n_cells"), int)
    try:
        Grid(n_cells)
    except ValueError as exc:
        raise ConfigError(f"n_cells: {exc}", line=ln("n_cells"), key="n_cells") from None

    if "control" not in raw:
        raise ConfigError("missing required key 'control'", key="control")
    schedules = [_schedule(raw["control"], "control", ln("control"), base)]
    if mode is SimMode.GROWING_DOUBLE:
        if "control_right" not in raw:
            raise ConfigError("double-source mode needs 'control_right'", key="control_right")
        schedules.append(_schedule(raw["control_right"], "control_right", ln("control_right"), base))
    elif "control_right" in raw:
        raise ConfigError("control_right is only valid in growing_double mode",
                          line=ln("control_right"), key="control_right")

    s0 = _profile(raw["s0"], "s0", ln("s0"), base)
    s0_right = _profile(raw["s0_right"], "s0_right", ln("s0_right"), base) if "s0_right" in raw else s0
    try:
        config = SimConfig(
            mode=mode,
            n_cells=n_cells,
            t_final=_number(raw["t_final"], "t_final", ln("t_final")),
            dt_safety=_number(raw["dt_safety"], "dt_safety", ln("dt_safety")),
            snapshot_every=_number(raw["snapshot_every"], "snapshot_every", ln("snapshot_every")),
            initial_r=_profile(raw["r0"], "r0", ln("r0"), base),
            initial_s=s0,
            initial_s_R=s0_right,
        )
    except ConfigError as exc:
        raise ConfigError(str(exc), line=ln(exc.key), key=exc.key) from None
    return config, tuple(schedules)


def parse_config(path) -> tuple[SimConfig, tuple]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} not found")
    return parse_config_text(path.read_text(), base=path.parent)
