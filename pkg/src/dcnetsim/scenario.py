"""Scenario data: physical parameters, initial states, and their files.

A scenario bundles a topology with every per-node and per-edge constant
the closed-loop model needs.  All quantities are stored in SI units
(henry, farad, ohm, volt, ampere, second); the sampling ranges quoted
in millihenry/millifarad below are converted at generation time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from dcnetsim.graphs import (
    CommunicationGraph,
    NetworkTopology,
    TopologyError,
    ring_communication,
    validate_topology,
)

__all__ = [
    "Scenario",
    "ScenarioError",
    "StateVector",
    "generate_initial_state",
    "generate_parameters",
    "load_scenario",
    "save_scenario",
    "steady_state_targets",
]


class ScenarioError(ValueError):
    """Raised when scenario data fails validation."""


def _as_readonly(x, length, field_name) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != length:
        raise ScenarioError(
            f"field {field_name!r} must have length {length}, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise ScenarioError(f"field {field_name!r} contains non-finite values")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Scenario:
    """Topology plus all physical constants of the closed-loop model.

    Attributes
    ----------
    topology : NetworkTopology
    com : CommunicationGraph
        Communication graph among generator nodes.
    v_star : ndarray, shape (n,)
        Nominal node voltages [V].
    i_load : ndarray, shape (n,)
        Constant current loads [A]; zero at generator nodes.
    l_f : ndarray, shape (n,)
        Converter filter inductances [H].
    c_l : ndarray, shape (n,)
        Node shunt capacitances [F].
    r : ndarray, shape (m,)
        Line resistances [Ohm].
    l_line : ndarray, shape (m,)
        Line inductances [H].
    k : ndarray, shape (n,)
        Droop gains.
    w : ndarray, shape (n,)
        Sharing weights (diagonal of W).
    t_theta : ndarray, shape (n,)
        Integrator time constants [s].
    t_phi : ndarray, shape (n,)
        Measurement filter time constants [s].
    seed : int
        Seed the parameters were drawn with (bookkeeping only).
    """

    topology: NetworkTopology
    com: CommunicationGraph
    v_star: np.ndarray
    i_load: np.ndarray
    l_f: np.ndarray
    c_l: np.ndarray
    r: np.ndarray
    l_line: np.ndarray
    k: np.ndarray
    w: np.ndarray
    t_theta: np.ndarray
    t_phi: np.ndarray
    seed: int = 0

    def __post_init__(self):
        n, m = self.topology.n, self.topology.m
        if self.com.n != n:
            raise ScenarioError(
                f"communication graph is over {self.com.n} nodes, topology has {n}"
            )
        gen_nodes = set(self.topology.generators)
        for i, j in self.com.edges:
            if i not in gen_nodes or j not in gen_nodes:
                raise ScenarioError(
                    f"communication edge ({i}, {j}) touches a non-generator node"
                )
        per_node = {
            "v_star": self.v_star,
            "i_load": self.i_load,
            "l_f": self.l_f,
            "c_l": self.c_l,
            "k": self.k,
            "w": self.w,
            "t_theta": self.t_theta,
            "t_phi": self.t_phi,
        }
        for name, arr in per_node.items():
            object.__setattr__(self, name, _as_readonly(arr, n, name))
        for name in ("r", "l_line"):
            object.__setattr__(self, name, _as_readonly(getattr(self, name), m, name))
        for name in ("l_f", "c_l", "r", "l_line", "k", "w", "t_theta", "t_phi"):
            arr = getattr(self, name)
            if arr.size and not np.all(arr > 0.0):
                bad = int(np.flatnonzero(~(arr > 0.0))[0])
                raise ScenarioError(
                    f"field {name!r} must be strictly positive, entry {bad} is "
                    f"{arr[bad]}"
                )
        if np.any(self.i_load < 0.0):
            bad = int(np.flatnonzero(self.i_load < 0.0)[0])
            raise ScenarioError(f"field 'i_load' must be nonnegative, entry {bad} is negative")
        mask = self.topology.generator_mask()
        if np.any(self.i_load[mask] != 0.0):
            g = int(np.flatnonzero(mask & (self.i_load != 0.0))[0]) + 1
            raise ScenarioError(f"field 'i_load' must be zero at generator node {g}")

    @property
    def n(self) -> int:
        return self.topology.n

    @property
    def m(self) -> int:
        return self.topology.m

    @property
    def dim(self) -> int:
        """State dimension 4n + m."""
        return 4 * self.topology.n + self.topology.m

    def with_load(self, node: int, amps: float) -> "Scenario":
        """Copy of this scenario with the load at 1-based ``node`` replaced."""
        if not (1 <= node <= self.n):
            raise ScenarioError(f"node {node} out of range for n={self.n}")
        if self.topology.generator_mask()[node - 1]:
            raise ScenarioError(f"node {node} is a generator and carries no load")
        i_load = self.i_load.copy()
        i_load[node - 1] = float(amps)
        return replace(self, i_load=i_load)


@dataclass(frozen=True)
class StateVector:
    """View of a packed state x = (I, V, f, theta, phi).

    The flat layout is node currents I (n), node voltages V (n), edge
    flows f (m), controller integrators theta (n), filtered currents
    phi (n), in that order.
    """

    x: np.ndarray
    n: int
    m: int

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        if x.shape != (4 * self.n + self.m,):
            raise ScenarioError(
                f"state must have shape ({4 * self.n + self.m},), got {x.shape}"
            )
        object.__setattr__(self, "x", x)

    @classmethod
    def pack(cls, current, voltage, flow, theta, phi) -> "StateVector":
        current = np.asarray(current, dtype=np.float64)
        flow = np.asarray(flow, dtype=np.float64)
        n, m = current.shape[0], flow.shape[0]
        x = np.concatenate([current, voltage, flow, theta, phi])
        return cls(x=x, n=n, m=m)

    @property
    def current(self) -> np.ndarray:
        return self.x[: self.n]

    @property
    def voltage(self) -> np.ndarray:
        return self.x[self.n : 2 * self.n]

    @property
    def flow(self) -> np.ndarray:
        return self.x[2 * self.n : 2 * self.n + self.m]

    @property
    def theta(self) -> np.ndarray:
        return self.x[2 * self.n + self.m : 3 * self.n + self.m]

    @property
    def phi(self) -> np.ndarray:
        return self.x[3 * self.n + self.m :]


def generate_parameters(
    topology: NetworkTopology,
    seed: int,
    gamma: float = 100.0,
    com: CommunicationGraph | None = None,
) -> Scenario:
    """Draw a full parameter set for ``topology`` from a seeded RNG.

    Fixed values: v_star = 380 V, k = 1/2, w = 1, t_theta = 1 s,
    t_phi = 10 ms.  Random draws, in this order, from a fresh
    ``numpy.random.default_rng(seed)``:

    1. loads at non-generator nodes, U[10, 20] A, ascending node order;
    2. filter inductances, U[1.5, 3.5] mH;
    3. node capacitances, U[1.5, 2.5] mF;
    4. line resistances, U[40, 100] Ohm;
    5. line inductances, U[1.5, 2.5] mH.

    The communication graph defaults to the generator ring with uniform
    gain ``gamma``.
    """
    rng = np.random.default_rng(seed)
    n, m = topology.n, topology.m
    mask = topology.generator_mask()
    i_load = np.zeros(n)
    n_non_gen = n - topology.n_gen
    i_load[~mask] = rng.uniform(10.0, 20.0, size=n_non_gen)
    l_f = rng.uniform(1.5e-3, 3.5e-3, size=n)
    c_l = rng.uniform(1.5e-3, 2.5e-3, size=n)
    r = rng.uniform(40.0, 100.0, size=m)
    l_line = rng.uniform(1.5e-3, 2.5e-3, size=m)
    if com is None:
        com = ring_communication(topology, gamma=gamma)
    return Scenario(
        topology=topology,
        com=com,
        v_star=np.full(n, 380.0),
        i_load=i_load,
        l_f=l_f,
        c_l=c_l,
        r=r,
        l_line=l_line,
        k=np.full(n, 0.5),
        w=np.ones(n),
        t_theta=np.ones(n),
        t_phi=np.full(n, 1e-2),
        seed=int(seed),
    )


def generate_initial_state(scn: Scenario, seed: int) -> np.ndarray:
    """Random initial state: I ~ U[0, 10] A, V ~ U[370, 390] V, rest zero.

    Draw order from ``default_rng(seed)``: currents first, then voltages.
    Returns the packed flat array of length 4n + m.
    """
    rng = np.random.default_rng(seed)
    n, m = scn.n, scn.m
    current = rng.uniform(0.0, 10.0, size=n)
    voltage = rng.uniform(370.0, 390.0, size=n)
    return StateVector.pack(current, voltage, np.zeros(m), np.zeros(n), np.zeros(n)).x


def steady_state_targets(scn: Scenario) -> tuple[np.ndarray, float]:
    """Fair-sharing current target and the weighted voltage-average target.

    Proportional sharing makes w_i I_i equal across nodes while total
    injection balances total load, giving

        I_bar_i = (sum_j i_load_j) / (w_i * sum_j 1/w_j).

    The voltage objective tracks the weighted average sum_i v_i / w_i,
    whose target value is sum_i v_star_i / w_i.
    """
    total_load = float(np.sum(scn.i_load))
    inv_w = 1.0 / scn.w
    i_bar = inv_w * (total_load / float(np.sum(inv_w)))
    avg_v_target = float(np.sum(scn.v_star * inv_w))
    return i_bar, avg_v_target


_SCENARIO_FIELDS = (
    "v_star", "i_load", "l_f", "c_l", "r", "l_line",
    "k", "w", "t_theta", "t_phi",
)


def save_scenario(scn: Scenario, path) -> None:
    """Write a scenario to JSON with full float precision."""
    obj = {
        "topology": {
            "name": scn.topology.name,
            "n": scn.topology.n,
            "edges": [list(e) for e in scn.topology.edges],
            "generators": list(scn.topology.generators),
        },
        "com_edges": [list(e) for e in scn.com.edges],
        "gamma": scn.com.weights.tolist(),
        "seed": scn.seed,
    }
    for name in _SCENARIO_FIELDS:
        obj[name] = getattr(scn, name).tolist()
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")


def load_scenario(path) -> Scenario:
    """Load and validate a scenario JSON file.

    Raises :class:`ScenarioError` (or :class:`TopologyError` for the
    embedded topology block) with the offending field named.
    """
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ScenarioError("scenario file must hold a JSON object")
    required = {"topology", "com_edges", "gamma", "seed", *_SCENARIO_FIELDS}
    missing = sorted(required - set(obj))
    if missing:
        raise ScenarioError(f"scenario is missing required keys {missing}")
    top = validate_topology(obj["topology"])
    com_edges = []
    for e in obj["com_edges"]:
        if not (isinstance(e, (list, tuple)) and len(e) == 2):
            raise ScenarioError(f"field 'com_edges' has malformed entry {e!r}")
        i, j = int(e[0]), int(e[1])
        if i < j:
            i, j = j, i
        com_edges.append((i, j))
    gamma = obj["gamma"]
    if isinstance(gamma, (int, float)):
        gamma = [float(gamma)] * len(com_edges)
    try:
        com = CommunicationGraph(
            n=top.n, edges=tuple(com_edges), weights=np.asarray(gamma, dtype=float)
        )
    except TopologyError as exc:
        raise ScenarioError(f"field 'com_edges'/'gamma' invalid: {exc}") from exc
    seed = obj["seed"]
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ScenarioError("field 'seed' must be an integer")
    kwargs = {name: obj[name] for name in _SCENARIO_FIELDS}
    return Scenario(topology=top, com=com, seed=seed, **kwargs)
