"""Network topologies, oriented incidence matrices, and weighted Laplacians.

Nodes are numbered 1..n.  Every physical edge is stored as an oriented
pair (i, j) with i > j; inputs listing (j, i) are flipped on ingestion.
The orientation is a bookkeeping convention for the incidence matrix and
carries no physical meaning: flipping an edge flips the sign of the
corresponding flow variable but leaves every Laplacian unchanged.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

logger = logging.getLogger(__name__)

__all__ = [
    "CommunicationGraph",
    "NetworkTopology",
    "TopologyError",
    "canonical_csr",
    "communication_incidence",
    "incidence_matrix",
    "load_topology",
    "ring_communication",
    "save_topology",
    "validate_topology",
    "weighted_laplacian",
]


class TopologyError(ValueError):
    """Raised when a topology or communication graph fails validation."""


def canonical_csr(matrix) -> sparse.csr_array:
    """Return ``matrix`` as a canonical CSR array.

    Canonical means: CSR layout, column indices sorted within each row,
    no duplicate entries, and no explicitly stored zeros.  All sparse
    matrices handed between modules go through this helper so that
    structural properties (like the stored-entry counts asserted in
    tests) are well defined.
    """
    a = sparse.csr_array(matrix)
    a.sum_duplicates()
    a.eliminate_zeros()
    a.sort_indices()
    return a


@dataclass(frozen=True)
class NetworkTopology:
    """Immutable connected network with flagged generator nodes.

    Parameters
    ----------
    n : int
        Number of nodes, numbered 1..n.
    edges : tuple of (int, int)
        Oriented edges (i, j) with i > j, duplicates merged.
    generators : tuple of int
        Sorted 1-based indices of generator nodes (may be empty).
    name : str
        Optional label used by catalogs and file outputs.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    generators: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise TopologyError(f"node count must be >= 1, got {self.n}")
        seen = set()
        for i, j in self.edges:
            if i == j:
                raise TopologyError(f"self-loop at node {i} is not allowed")
            if not (1 <= j < i <= self.n):
                raise TopologyError(
                    f"edge ({i}, {j}) out of range for n={self.n} "
                    "(expected 1 <= j < i <= n)"
                )
            if (i, j) in seen:
                raise TopologyError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
        gens = self.generators
        if list(gens) != sorted(set(gens)):
            raise TopologyError("generator list must be sorted and duplicate-free")
        for g in gens:
            if not (1 <= g <= self.n):
                raise TopologyError(f"generator index {g} out of range for n={self.n}")

    @property
    def m(self) -> int:
        """Number of edges."""
        return len(self.edges)

    @property
    def n_gen(self) -> int:
        """Number of generator nodes."""
        return len(self.generators)

    def generator_mask(self) -> np.ndarray:
        """Boolean array of length n, True at generator nodes."""
        mask = np.zeros(self.n, dtype=bool)
        for g in self.generators:
            mask[g - 1] = True
        return mask

    def is_connected(self) -> bool:
        """True if the physical graph is connected (n=1 counts)."""
        if self.n == 1:
            return True
        if self.m == 0:
            return False
        b = incidence_matrix(self)
        adj = canonical_csr(abs(b) @ abs(b).T)
        n_comp, _ = csgraph.connected_components(adj, directed=False)
        return n_comp == 1


def validate_topology(obj) -> NetworkTopology:
    """Build a :class:`NetworkTopology` from a parsed JSON object.

    Accepts the on-disk schema ``{"name", "n", "edges", "generators"}``.
    Edges listed as (j, i) with j < i are flipped to the canonical
    orientation; exact duplicates after flipping are merged and the
    merge is logged.  Raises :class:`TopologyError` on malformed input
    and logs a warning if the graph is disconnected.
    """
    if not isinstance(obj, dict):
        raise TopologyError(f"topology must be a JSON object, got {type(obj).__name__}")
    for key in ("n", "edges", "generators"):
        if key not in obj:
            raise TopologyError(f"topology is missing required key {key!r}")
    name = obj.get("name", "")
    if not isinstance(name, str):
        raise TopologyError("topology name must be a string")
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise TopologyError(f"node count must be an integer, got {n!r}")
    edges = []
    seen = set()
    for k, e in enumerate(obj["edges"]):
        if not (isinstance(e, (list, tuple)) and len(e) == 2):
            raise TopologyError(f"edge #{k} must be a pair, got {e!r}")
        i, j = e
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in (i, j)):
            raise TopologyError(f"edge #{k} has non-integer endpoints {e!r}")
        if i < j:
            i, j = j, i
        if (i, j) in seen:
            logger.info("merging duplicate edge (%d, %d)", i, j)
            continue
        seen.add((i, j))
        edges.append((i, j))
    gens = obj["generators"]
    if not isinstance(gens, list) or not all(
        isinstance(g, int) and not isinstance(g, bool) for g in gens
    ):
        raise TopologyError("generators must be a list of integers")
    top = NetworkTopology(
        n=n,
        edges=tuple(edges),
        generators=tuple(sorted(set(gens))),
        name=name,
    )
    if not top.is_connected():
        logger.warning("topology %r is not connected", name or "<unnamed>")
    return top


def load_topology(path) -> NetworkTopology:
    """Load and validate a topology JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    return validate_topology(obj)


def save_topology(top: NetworkTopology, path) -> None:
    """Write a topology to its JSON schema."""
    obj = {
        "name": top.name,
        "n": top.n,
        "edges": [list(e) for e in top.edges],
        "generators": list(top.generators),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")


def incidence_matrix(top: NetworkTopology) -> sparse.csr_array:
    """Oriented incidence matrix B of shape (n, m).

    Column e for edge (i, j) holds +1 in row i and -1 in row j, so each
    column sums to zero exactly and B has exactly 2m stored entries.
    """
    m = top.m
    rows = np.empty(2 * m, dtype=np.int64)
    cols = np.empty(2 * m, dtype=np.int64)
    vals = np.empty(2 * m, dtype=np.float64)
    for e, (i, j) in enumerate(top.edges):
        rows[2 * e] = i - 1
        cols[2 * e] = e
        vals[2 * e] = 1.0
        rows[2 * e + 1] = j - 1
        cols[2 * e + 1] = e
        vals[2 * e + 1] = -1.0
    coo = sparse.coo_array((vals, (rows, cols)), shape=(top.n, m))
    return canonical_csr(coo)


def weighted_laplacian(b: sparse.csr_array, weights) -> sparse.csr_array:
    """Weighted graph Laplacian B diag(w) B^T for an incidence matrix B.

    ``weights`` must be strictly positive, one per column of B.  The
    result is symmetric with zero row sums; off-diagonal entry (i, j)
    is minus the total weight of edges joining i and j.
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.shape[0] != b.shape[1]:
        raise TopologyError(
            f"expected {b.shape[1]} edge weights, got shape {w.shape}"
        )
    bad = np.flatnonzero(~(w > 0.0))
    if bad.size:
        raise TopologyError(
            f"edge weights must be strictly positive; first offender at "
            f"edge index {bad[0]} with value {w[bad[0]]}"
        )
    lap = (b * w[np.newaxis, :]) @ b.T
    return canonical_csr(lap)


@dataclass(frozen=True)
class CommunicationGraph:
    """Undirected communication graph over generator nodes.

    Edges use global 1-based node indices with the same (i, j), i > j
    orientation as the physical graph.  ``weights`` holds one positive
    gain per edge.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if w.ndim != 1 or w.shape[0] != len(self.edges):
            raise TopologyError(
                f"expected {len(self.edges)} communication weights, got shape {w.shape}"
            )
        seen = set()
        for i, j in self.edges:
            if i == j:
                raise TopologyError(f"communication self-loop at node {i}")
            if not (1 <= j < i <= self.n):
                raise TopologyError(
                    f"communication edge ({i}, {j}) out of range for n={self.n}"
                )
            if (i, j) in seen:
                raise TopologyError(f"duplicate communication edge ({i}, {j})")
            seen.add((i, j))
        if w.size and not np.all(w > 0.0):
            raise TopologyError("communication weights must be strictly positive")

    @property
    def m_com(self) -> int:
        """Number of communication edges."""
        return len(self.edges)

    def laplacian(self) -> sparse.csr_array:
        """Weighted communication Laplacian over the full node set (n x n)."""
        b = communication_incidence(self)
        if self.m_com == 0:
            return canonical_csr(sparse.csr_array((self.n, self.n)))
        return weighted_laplacian(b, self.weights)


def communication_incidence(com: CommunicationGraph) -> sparse.csr_array:
    """Oriented incidence matrix of the communication graph, shape (n, m_com)."""
    stub = NetworkTopology(n=com.n, edges=com.edges, generators=())
    if com.m_com == 0:
        return canonical_csr(sparse.csr_array((com.n, 0)))
    return incidence_matrix(stub)


def ring_communication(top: NetworkTopology, gamma: float = 100.0) -> CommunicationGraph:
    """Ring communication graph over the generators of ``top``.

    With generators g_1 < g_2 < ... < g_k the ring consists of the
    consecutive pairs (g_2, g_1), ..., (g_k, g_{k-1}) closed by
    (g_k, g_1).  For k = 2 that closure would duplicate the single
    pair, so only one edge is kept; for k <= 1 the graph is empty.
    Every edge carries the uniform gain ``gamma``.
    """
    if gamma <= 0.0:
        raise TopologyError(f"communication gain must be positive, got {gamma}")
    g = sorted(top.generators)
    k = len(g)
    if k <= 1:
        edges: tuple[tuple[int, int], ...] = ()
    elif k == 2:
        edges = ((g[1], g[0]),)
    else:
        edges = tuple((g[i + 1], g[i]) for i in range(k - 1)) + ((g[-1], g[0]),)
    weights = np.full(len(edges), float(gamma))
    return CommunicationGraph(n=top.n, edges=edges, weights=weights)
