"""Grid-refinement study of the geometric solver on a fixed time window."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from shocklab.john.data import DataSpec
from shocklab.john.solver import GeometricGrid, StateSlice, check_constraint, init_state, step_log

FIELDS = ("D", "A", "mu", "W", "B")


def march(data: DataSpec, grid: GeometricGrid, t_end: float) -> StateSlice:
    """Advance from the initial slice to exactly ``t_end``."""
    state = init_state(data, grid)
    s_end = math.log1p(t_end)
    while state.s < s_end:
        state = step_log(state, min(grid.log_step(state.s), s_end - state.s), grid.du)
    return state


def _error(coarse: StateSlice, ref: StateSlice) -> float:
    k = (ref.u.size - 1) // (coarse.u.size - 1)
    return max(
        float(np.max(np.abs(getattr(coarse, f) - getattr(ref, f)[::k]))) for f in FIELDS
    )


@dataclass(frozen=True)
class OrderStudy:
    n_u: int
    error_coarse: float
    error_fine: float
    ratio: float
    constraint_coarse: float
    constraint_fine: float
    constraint_ratio: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def measure_scheme_order(
    data: DataSpec, U0: float = 0.9, n_u: int = 100, t_end: float = 1.0, kappa: float = 0.5
) -> OrderStudy:
    """Errors at ``du`` and ``du/2`` against a reference at ``du/8``.

    For a second-order scheme the error ratio tends to
    ``(1 - 1/64) / (1/4 - 1/64) = 4.2``.
    """
    states = [
        march(data, GeometricGrid(U0=U0, n_u=m, kappa=kappa), t_end) for m in (n_u, 2 * n_u, 8 * n_u)
    ]
    e1, e2 = _error(states[0], states[2]), _error(states[1], states[2])
    c1, c2 = check_constraint(states[0]), check_constraint(states[1])
    return OrderStudy(n_u, e1, e2, e1 / e2, c1, c2, c1 / c2)
