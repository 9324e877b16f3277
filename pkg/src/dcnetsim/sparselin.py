"""Sparse linear algebra: products and shifted LU factorizations.

Implicit steppers repeatedly solve systems of the form

    (sigma I - A) x = r

for real or complex shifts sigma while A stays fixed.  This module
wraps sparse LU with fill-reducing column ordering behind a small
interface so factorizations can be cached and their cost audited.
A complex shift can be solved natively in complex arithmetic or via an
equivalent real block system of twice the size; both routes are kept
and must agree, which pins down the complex path against sign slips.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from dcnetsim.graphs import canonical_csr

__all__ = [
    "ShiftedLU",
    "SingularShiftError",
    "factorize_shifted",
    "solve_shifted_embedded",
    "spmv",
]


class SingularShiftError(RuntimeError):
    """Factorization hit a numerically singular pivot.

    Attributes
    ----------
    sigma : complex
        The shift that failed.
    pivot_index : int
        Index reported by the factorization, -1 if unavailable.
    """

    def __init__(self, sigma, pivot_index=-1):
        self.sigma = sigma
        self.pivot_index = int(pivot_index)
        where = f" at pivot {pivot_index}" if pivot_index >= 0 else ""
        super().__init__(
            f"shifted matrix sigma*I - A is numerically singular for "
            f"sigma={sigma}{where}"
        )


def spmv(a: sparse.csr_array, x: np.ndarray) -> np.ndarray:
    """Sparse matrix-vector product, O(nnz) time and O(rows) extra space."""
    return a @ x


@dataclass(frozen=True)
class ShiftedLU:
    """LU factors of sigma I - A with solve access.

    ``fill_nnz`` is the combined stored-entry count of the L and U
    factors, used to audit fill-in against the input matrix.
    """

    sigma: complex
    shape: tuple[int, int]
    _lu: object
    fill_nnz: int

    @property
    def is_complex(self) -> bool:
        return bool(np.iscomplexobj(np.asarray(self.sigma)) and self.sigma.imag != 0.0)

    def solve(self, r: np.ndarray) -> np.ndarray:
        """Solve (sigma I - A) x = r; complex result iff the shift is complex."""
        if self._lu.shape[0] != np.shape(r)[0]:
            raise ValueError(
                f"right-hand side has length {np.shape(r)[0]}, "
                f"matrix is {self._lu.shape[0]}"
            )
        if self.is_complex:
            return self._lu.solve(np.asarray(r, dtype=np.complex128))
        return self._lu.solve(np.asarray(r, dtype=np.float64))


def _shifted_matrix(a: sparse.csr_array, sigma) -> sparse.csc_matrix:
    n = a.shape[0]
    eye = sparse.identity(n, format="csc")
    if np.iscomplexobj(np.asarray(sigma)) and complex(sigma).imag != 0.0:
        m = complex(sigma) * eye - a.astype(np.complex128)
    else:
        m = float(np.real(sigma)) * eye - a
    return sparse.csc_matrix(m)


def factorize_shifted(a: sparse.csr_array, sigma) -> ShiftedLU:
    """LU-factorize sigma I - A with COLAMD column ordering.

    Raises :class:`SingularShiftError` if a pivot is numerically
    singular.  The returned object solves real or complex right-hand
    sides depending on the shift.
    """
    m = _shifted_matrix(a, sigma)
    try:
        lu = splu(m)
    except RuntimeError as exc:
        pivot = -1
        for tok in str(exc).replace("(", " ").replace(")", " ").split():
            if tok.isdigit():
                pivot = int(tok)
                break
        raise SingularShiftError(sigma, pivot) from exc
    return ShiftedLU(
        sigma=complex(sigma),
        shape=m.shape,
        _lu=lu,
        fill_nnz=int(lu.L.nnz + lu.U.nnz),
    )


def solve_shifted_embedded(a: sparse.csr_array, sigma, r: np.ndarray) -> np.ndarray:
    """Solve (sigma I - A) x = r through the 2N real block embedding.

    With sigma = p + i q and x = u + i v the complex system is
    equivalent to

        [ p I - A   -q I    ] [u]   [Re r]
        [ q I        p I - A] [v] = [Im r]

    This is the validation route for the native complex factorization;
    the two must agree to tight tolerance.
    """
    sigma = complex(sigma)
    n = a.shape[0]
    p, q = sigma.real, sigma.imag
    eye = sparse.identity(n, format="csr")
    block = sparse.block_array(
        [[p * eye - a, -q * eye], [q * eye, p * eye - a]], format="csc"
    )
    rr = np.concatenate([np.real(r), np.imag(np.asarray(r, dtype=complex))])
    try:
        lu = splu(sparse.csc_matrix(block))
    except RuntimeError as exc:
        raise SingularShiftError(sigma) from exc
    sol = lu.solve(rr)
    return sol[:n] + 1j * sol[n:]


def residual_bound(a: sparse.csr_array, sigma, x, r) -> float:
    """Normalized backward error ||(sigma I - A) x - r|| for testing solves."""
    m = _shifted_matrix(a, sigma)
    res = m @ x - np.asarray(r, dtype=x.dtype)
    denom = (
        np.abs(m).sum(axis=1).max() * np.max(np.abs(x)) + np.max(np.abs(r))
    )
    if denom == 0.0:
        return float(np.max(np.abs(res)))
    return float(np.max(np.abs(res)) / denom)


def _canonical(a) -> sparse.csr_array:
    """Re-export of the canonical CSR helper for callers of this module."""
    return canonical_csr(a)
