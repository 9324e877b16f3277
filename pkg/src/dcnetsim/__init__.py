"""Sparse time-domain simulator for controlled DC electricity networks.

The package builds an affine closed-loop model x' = A x + b for a DC
network whose nodes are controllable generation units and whose edges are
resistive-inductive lines, then integrates it with five adaptive
time-stepping methods (RK23, RK45, DOP853, Radau IIA of order 5, and
variable-order BDF) while keeping every matrix sparse.
"""

from dcnetsim.graphs import (
    CommunicationGraph,
    NetworkTopology,
    TopologyError,
    incidence_matrix,
    ring_communication,
    validate_topology,
    weighted_laplacian,
)
from dcnetsim.scenario import (
    Scenario,
    StateVector,
    generate_initial_state,
    generate_parameters,
    load_scenario,
    save_scenario,
    steady_state_targets,
)
from dcnetsim.assembly import (
    AffineSystem,
    apply_load_change,
    assemble,
    dense_view,
    rhs,
)
from dcnetsim.solvers import (
    Event,
    EventSchedule,
    SolverConfig,
    SolverRun,
    integrate,
)

__all__ = [
    "AffineSystem",
    "CommunicationGraph",
    "Event",
    "EventSchedule",
    "NetworkTopology",
    "Scenario",
    "SolverConfig",
    "SolverRun",
    "StateVector",
    "TopologyError",
    "apply_load_change",
    "assemble",
    "dense_view",
    "generate_initial_state",
    "generate_parameters",
    "incidence_matrix",
    "integrate",
    "load_scenario",
    "rhs",
    "ring_communication",
    "save_scenario",
    "steady_state_targets",
    "validate_topology",
    "weighted_laplacian",
]

__version__ = "0.1.0"
