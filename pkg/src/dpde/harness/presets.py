"""Named shape experiments.

All start from the unit circle with zero signal. Constant-control runs stop
at ``T = 8`` and shaped-control runs at ``T = 10``.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..controls import U1, U2, U3, Constant, ControlSchedule
from ..dynamics import SimConfig, SimMode


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    config: SimConfig
    schedules: tuple[ControlSchedule, ...]
    description: str = ""

    def with_cells(self, n_cells: int) -> "ExperimentPreset":
        return ExperimentPreset(self.name, self.config.with_(n_cells=n_cells), self.schedules, self.description)


PRESETS = {
    p.name: p
    for p in [
        ExperimentPreset("fig2_growing_const", SimConfig(SimMode.GROWING_SINGLE, t_final=8.0), (U1,),
                         "constant control u1 on the growing membrane"),
        ExperimentPreset("fig_static_const", SimConfig(SimMode.STATIC_SINGLE, t_final=8.0), (U1,),
                         "constant control u1 with frozen unit-circle diffusion"),
        ExperimentPreset("fig4_apple", SimConfig(SimMode.GROWING_SINGLE, t_final=10.0), (U2,),
                         "full sine period u2, dimple at the source"),
        ExperimentPreset("fig5_circle", SimConfig(SimMode.GROWING_SINGLE, t_final=10.0), (U3,),
                         "half-sine impulse u3, near-uniform growth"),
        ExperimentPreset("fig6_double", SimConfig(SimMode.GROWING_DOUBLE, t_final=10.0), (U3, U3),
                         "u3 at both poles, vertical stretching"),
        ExperimentPreset("zero_control", SimConfig(SimMode.GROWING_SINGLE, t_final=10.0), (Constant(0.0),),
                         "no control; the unit circle is a fixed point"),
    ]
}


def get_preset(name: str) -> ExperimentPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
