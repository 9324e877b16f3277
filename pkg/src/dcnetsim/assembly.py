"""Assembly of the affine closed-loop model x' = A x + b.

With state x = (I, V, f, theta, phi) the governing equations are

    L^f I'     = -V - K (I - phi) + W L_com theta + V*
    C^L V'     = I + B f - I_load
    L f'       = -B^T V - R f
    T_theta theta' = -L_com W I
    T_phi phi' = -(phi - I)

where B is the oriented incidence matrix, L_com the weighted
communication Laplacian, and K, W, L^f, C^L, R, L, T_theta, T_phi are
diagonal.  The assembled A and b absorb the diagonal mass matrices on
the left, so the system integrates as a plain linear ODE.  A is CSR
with block-sparse structure; its stored-entry count grows linearly in
n + m + m_com.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import io as spio
from scipy import sparse

from dcnetsim.graphs import canonical_csr, incidence_matrix
from dcnetsim.scenario import Scenario

__all__ = [
    "AffineSystem",
    "AssemblyError",
    "apply_load_change",
    "assemble",
    "dense_view",
    "export_matrix_market",
    "rhs",
]

DENSE_VIEW_LIMIT = 500


class AssemblyError(ValueError):
    """Raised for invalid assembly inputs or out-of-contract requests."""


@dataclass(frozen=True)
class AffineSystem:
    """Assembled sparse model x' = a x + b.

    ``a`` is canonical CSR of shape (4n+m, 4n+m) and never mutated;
    load changes swap in a fresh ``b`` and share ``a``.  ``c_l`` and
    ``i_load`` are kept so load edits can recompute the affected
    entries of ``b``.
    """

    a: sparse.csr_array
    b: np.ndarray
    n: int
    m: int
    m_com: int
    c_l: np.ndarray
    i_load: np.ndarray
    gen_mask: np.ndarray
    name: str = ""

    def __post_init__(self):
        dim = 4 * self.n + self.m
        if self.a.shape != (dim, dim):
            raise AssemblyError(f"matrix shape {self.a.shape} does not match dim {dim}")
        if self.b.shape != (dim,):
            raise AssemblyError(f"offset shape {self.b.shape} does not match dim {dim}")
        if not self.a.has_canonical_format:
            raise AssemblyError("system matrix must be canonical CSR")

    @property
    def dim(self) -> int:
        return 4 * self.n + self.m


def assemble(scn: Scenario) -> AffineSystem:
    """Build the sparse closed-loop system for a scenario.

    Block rows, after dividing by the diagonal mass matrices:

        I'     = -diag(k/l_f) I - diag(1/l_f) V + diag(w/l_f) L_com theta
                 + diag(k/l_f) phi + v_star/l_f
        V'     = diag(1/c_l) I + diag(1/c_l) B f - i_load/c_l
        f'     = -diag(1/l_line) B^T V - diag(r/l_line) f
        theta' = -diag(1/t_theta) L_com diag(w) I
        phi'   = diag(1/t_phi) I - diag(1/t_phi) phi
    """
    top = scn.topology
    n, m = top.n, top.m
    b_inc = incidence_matrix(top)
    lcom = scn.com.laplacian().tocsr()

    def dg(v):
        return sparse.dia_array((np.asarray(v)[np.newaxis, :], [0]), shape=(len(v), len(v)))

    # the two communication blocks are scaled entry by entry, keeping the
    # same multiply/divide order as the governing equations so a dense
    # entry-for-entry reconstruction reproduces them exactly
    com_rows = np.repeat(np.arange(n), np.diff(lcom.indptr))
    com_cur = sparse.csr_array(
        ((scn.w[com_rows] * lcom.data) / scn.l_f[com_rows],
         lcom.indices.copy(), lcom.indptr.copy()),
        shape=(n, n),
    )
    com_theta = sparse.csr_array(
        ((-(lcom.data * scn.w[lcom.indices])) / scn.t_theta[com_rows],
         lcom.indices.copy(), lcom.indptr.copy()),
        shape=(n, n),
    )

    blocks = [
        [dg(-scn.k / scn.l_f), dg(-1.0 / scn.l_f), None, com_cur, dg(scn.k / scn.l_f)],
        [dg(1.0 / scn.c_l), None, dg(1.0 / scn.c_l) @ b_inc, None, None],
        [None, dg(-1.0 / scn.l_line) @ b_inc.T, dg(-scn.r / scn.l_line), None, None],
        [com_theta, None, None, None, None],
        [dg(1.0 / scn.t_phi), None, None, None, dg(-1.0 / scn.t_phi)],
    ]
    a = canonical_csr(sparse.block_array(blocks, format="csr"))
    b = np.concatenate([
        scn.v_star / scn.l_f,
        -scn.i_load / scn.c_l,
        np.zeros(m),
        np.zeros(n),
        np.zeros(n),
    ])
    return AffineSystem(
        a=a,
        b=b,
        n=n,
        m=m,
        m_com=scn.com.m_com,
        c_l=scn.c_l.copy(),
        i_load=scn.i_load.copy(),
        gen_mask=top.generator_mask(),
        name=top.name,
    )


def rhs(system: AffineSystem, x: np.ndarray) -> np.ndarray:
    """Evaluate A x + b with a sparse matrix-vector product."""
    return system.a @ x + system.b


def apply_load_change(system: AffineSystem, node: int, amps: float) -> AffineSystem:
    """New system with the load at 1-based ``node`` set to ``amps``.

    Only the voltage-row entry of ``b`` for that node changes; the
    sparse matrix is shared with the input system unchanged.
    """
    if not (1 <= node <= system.n):
        raise AssemblyError(f"node {node} out of range for n={system.n}")
    if system.gen_mask[node - 1]:
        raise AssemblyError(f"node {node} is a generator and carries no load")
    amps = float(amps)
    if not np.isfinite(amps) or amps < 0.0:
        raise AssemblyError(f"load must be a nonnegative current, got {amps}")
    b = system.b.copy()
    b[system.n + node - 1] = -amps / system.c_l[node - 1]
    i_load = system.i_load.copy()
    i_load[node - 1] = amps
    return AffineSystem(
        a=system.a,
        b=b,
        n=system.n,
        m=system.m,
        m_com=system.m_com,
        c_l=system.c_l,
        i_load=i_load,
        gen_mask=system.gen_mask,
        name=system.name,
    )


def dense_view(system: AffineSystem) -> tuple[np.ndarray, np.ndarray]:
    """Dense copies of (A, b) for inspection, refused above dimension 500."""
    if system.dim > DENSE_VIEW_LIMIT:
        raise AssemblyError(
            f"dense view limited to dimension {DENSE_VIEW_LIMIT}, "
            f"system has {system.dim}"
        )
    return system.a.toarray(), system.b.copy()


def export_matrix_market(system: AffineSystem, a_path, b_path=None) -> None:
    """Write A (and optionally b as a dim x 1 matrix) in Matrix Market form."""
    spio.mmwrite(a_path, sparse.csr_matrix(system.a))
    if b_path is not None:
        spio.mmwrite(b_path, system.b[:, np.newaxis])
