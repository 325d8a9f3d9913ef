"""John's spherically symmetric shock-forming wave equation."""

from shocklab.john.convergence import OrderStudy, measure_scheme_order
from shocklab.john.data import DataSpec, SliceData
from shocklab.john.reduced import (
    PredictedShock,
    predict_shock_time,
    reduced_mu_profile,
    transversal_data_derivative,
)
from shocklab.john.solver import (
    GeometricGrid,
    ShockReport,
    StateSlice,
    check_constraint,
    diagnostics,
    init_state,
    node_monitors,
    run,
    step,
    step_log,
)

__all__ = [
    "DataSpec",
    "GeometricGrid",
    "OrderStudy",
    "PredictedShock",
    "ShockReport",
    "SliceData",
    "StateSlice",
    "check_constraint",
    "diagnostics",
    "init_state",
    "measure_scheme_order",
    "node_monitors",
    "predict_shock_time",
    "reduced_mu_profile",
    "run",
    "step",
    "step_log",
    "transversal_data_derivative",
]
