"""Adaptive ODE solvers specialized for sparse affine systems."""

from dcnetsim.solvers.controller import (
    ControllerMemory,
    combined_error_norm,
    error_norm,
    error_scale,
    initial_step,
    propose_step,
)
from dcnetsim.solvers.erk import erk_step, step_error_norm
from dcnetsim.solvers.integrate import (
    METHODS,
    Event,
    EventSchedule,
    IntegrationStalledError,
    RunStats,
    SolverConfig,
    SolverRun,
    integrate,
)
from dcnetsim.solvers.tableaus import DOP853, RK23, RK45, TABLEAUS, EmbeddedTableau

__all__ = [
    "ControllerMemory",
    "DOP853",
    "EmbeddedTableau",
    "Event",
    "EventSchedule",
    "IntegrationStalledError",
    "METHODS",
    "RK23",
    "RK45",
    "RunStats",
    "SolverConfig",
    "SolverRun",
    "TABLEAUS",
    "combined_error_norm",
    "erk_step",
    "error_norm",
    "error_scale",
    "initial_step",
    "integrate",
    "propose_step",
    "step_error_norm",
]
