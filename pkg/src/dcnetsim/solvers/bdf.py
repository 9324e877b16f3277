"""Variable-order BDF (orders 1-5) for the affine model x' = A x + b.

Quasi-constant step implementation on a backward-difference table D:
the predictor extrapolates the interpolating polynomial, the corrector
solves the implicit relation, and a step-size change rescales D as if
the history had been sampled at the new spacing.  The leading-order
coefficients carry the standard stabilizing kappa terms, trading a bit
of the classic BDF accuracy for better angles of A(alpha) stability.

For an affine right-hand side the corrector equation

    (I - c A) d = c (A y_pred + b) - psi

is linear and solved exactly with one cached sparse LU of the shifted
matrix; no Newton iteration is needed.  The step size is held constant
until order+1 equal steps have accumulated, then order and step are
re-selected from the error norms of orders order-1, order, order+1.
"""

from __future__ import annotations

import numpy as np

from dcnetsim.assembly import AffineSystem
from dcnetsim.solvers.controller import (
    error_norm,
    initial_step,
    stall_floor,
)
from dcnetsim.sparselin import factorize_shifted, spmv

__all__ = [
    "BdfStepper",
    "advance_difference_table",
    "bdf_step",
    "change_difference_table",
    "rescale_matrix",
]

MAX_ORDER = 5
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
SAFETY = 0.9

# order 1 carries no leading-coefficient damping, so it is plain
# implicit Euler; orders 2-5 use the standard stabilizing values
KAPPA = np.array([0.0, 0.0, -1.0 / 9.0, -0.0823, -0.0415, 0.0])
GAMMA = np.hstack((0.0, np.cumsum(1.0 / np.arange(1, MAX_ORDER + 1))))
ALPHA = (1.0 - KAPPA) * GAMMA
ERROR_CONST = KAPPA * GAMMA + 1.0 / np.arange(1, MAX_ORDER + 2)


def rescale_matrix(order: int, factor: float) -> np.ndarray:
    """Triangular matrix R(factor) that re-spaces backward differences.

    Row-cumulative products of (i - 1 - factor j)/i; change of step
    h -> factor h maps the difference table D to R(factor)^T D.
    """
    idx = np.arange(1, order + 1)
    mat = np.zeros((order + 1, order + 1))
    mat[1:, 1:] = (idx[:, np.newaxis] - 1 - factor * idx[np.newaxis, :]) / idx[
        :, np.newaxis
    ]
    mat[0] = 1.0
    return np.cumprod(mat, axis=0)


def change_difference_table(d: np.ndarray, order: int, factor: float) -> None:
    """Rescale the first order+1 rows of D in place for h -> factor h."""
    ru = rescale_matrix(order, factor) @ rescale_matrix(order, 1.0)
    d[: order + 1] = ru.T @ d[: order + 1]


def advance_difference_table(d_table: np.ndarray, order: int, d: np.ndarray) -> None:
    """Absorb an accepted corrector increment ``d`` into the table.

    Afterwards row 0 holds the new solution and rows 1..order+1 the
    updated backward differences at the current spacing.
    """
    d_table[order + 2] = d - d_table[order + 1]
    d_table[order + 1] = d
    for i in reversed(range(order + 1)):
        d_table[i] += d_table[i + 1]


class BdfStepper:
    """Adaptive variable-order BDF driver over one or more segments."""

    method = "bdf"

    def __init__(self, system: AffineSystem, rtol: float, atol: float, h_max: float):
        self.a = system.a
        self.rtol = rtol
        self.atol = atol
        self.h_max = h_max
        self._lu = None
        self._lu_c = np.nan
        self.order = 1

    def _ensure_factorized(self, c: float, builder) -> None:
        if self._lu is None or c != self._lu_c:
            # (I - cA) = c ((1/c) I - A)
            self._lu = factorize_shifted(self.a, 1.0 / c)
            self._lu_c = c
            builder.count_fact(1)

    def _solve_corrector(self, c: float, rhs_vec: np.ndarray) -> np.ndarray:
        return self._lu.solve(rhs_vec / c)

    def run_segment(
        self,
        t0: float,
        t_end: float,
        x0: np.ndarray,
        b: np.ndarray,
        ev_times,
        ev_offsets,
        h_init,
        stride: int,
        span: float,
        builder,
    ):
        a = self.a
        b = b.copy()
        x = x0.copy()
        dim = x.shape[0]
        f = spmv(a, x) + b
        builder.count_rhs(1)
        if h_init is not None and h_init > 0.0:
            h = min(float(h_init), self.h_max)
        else:
            h = initial_step(
                lambda y: spmv(a, y) + b,
                x,
                f,
                t_end - t0,
                2.0,
                self.rtol,
                self.atol,
                self.h_max,
            )
            builder.count_rhs(1)
        order = 1
        self.order = 1
        n_equal = 0
        d_table = np.zeros((MAX_ORDER + 3, dim))
        d_table[0] = x
        d_table[1] = h * f
        self._lu = None
        h_floor = stall_floor(t0, span if span > 0 else t_end - t0)
        builder.sample(t0, x)
        t = t0
        next_ev = 0
        n_ev = len(ev_times)
        n_acc_seg = 0
        while t < t_end:
            if h > self.h_max:
                change_difference_table(d_table, order, self.h_max / h)
                n_equal = 0
                self._lu = None
                h = self.h_max
            if h < h_floor:
                return "stalled", t, x, h
            h_step = h
            if t + h_step >= t_end:
                h_step = t_end - t
                if h_step != h:
                    change_difference_table(d_table, order, h_step / h)
                    n_equal = 0
                    self._lu = None
                    h = h_step
            c = h_step / ALPHA[order]
            self._ensure_factorized(c, builder)
            y_pred = d_table[: order + 1].sum(axis=0)
            psi = (GAMMA[1 : order + 1] @ d_table[1 : order + 1]) / ALPHA[order]
            f_pred = spmv(a, y_pred) + b
            builder.count_rhs(1)
            d = self._solve_corrector(c, c * f_pred - psi)
            y_new = y_pred + d
            err = error_norm(
                ERROR_CONST[order] * d, x, y_new, self.rtol, self.atol
            )
            if not np.isfinite(err):
                err = 1e10
            builder.trace(t, h_step, err <= 1.0, err)
            if err > 1.0:
                factor = max(MIN_FACTOR, SAFETY * err ** (-1.0 / (order + 1)))
                change_difference_table(d_table, order, factor)
                n_equal = 0
                self._lu = None
                h = h_step * factor
                continue

            # accepted
            t = t_end if t + h_step >= t_end else t + h_step
            n_equal += 1
            n_acc_seg += 1
            advance_difference_table(d_table, order, d)
            x_old = x
            x = y_new
            swapped = False
            while next_ev < n_ev and t >= ev_times[next_ev]:
                # offset swap only; the difference table keeps its
                # pre-event history, so the predictor degrades until
                # fresh steps wash it out
                b = np.asarray(ev_offsets[next_ev]).copy()
                next_ev += 1
                swapped = True
            if (stride > 0 and n_acc_seg % stride == 0) or swapped:
                builder.sample(t, x)

            if n_equal < order + 1:
                continue

            # order and step re-selection from neighbor-order errors
            if order > 1:
                err_down = error_norm(
                    ERROR_CONST[order - 1] * d_table[order],
                    x_old,
                    x,
                    self.rtol,
                    self.atol,
                )
            else:
                err_down = np.inf
            if order < MAX_ORDER:
                err_up = error_norm(
                    ERROR_CONST[order + 1] * d_table[order + 2],
                    x_old,
                    x,
                    self.rtol,
                    self.atol,
                )
            else:
                err_up = np.inf
            norms = np.array([err_down, err, err_up])
            with np.errstate(divide="ignore"):
                factors = norms ** (-1.0 / np.arange(order, order + 3))
            order += int(np.argmax(factors)) - 1
            self.order = order
            best = float(np.max(factors))
            factor = MAX_FACTOR if not np.isfinite(best) else min(
                MAX_FACTOR, SAFETY * best
            )
            factor = max(MIN_FACTOR, factor)
            change_difference_table(d_table, order, factor)
            n_equal = 0
            self._lu = None
            h = h_step * factor
        builder.sample(t, x)
        return "ok", t, x, h


def bdf_step(system: AffineSystem, history, h, order, rtol=1e-3, atol=1e-6, b=None):
    """One standalone BDF corrector solve from a difference table.

    ``history`` is the difference table D with rows 0..order filled.
    Returns (x_next, err_estimate, d_increment); no order adaptation
    happens at this level.
    """
    order = int(order)
    if not (1 <= order <= MAX_ORDER):
        raise ValueError(f"order must be in 1..{MAX_ORDER}, got {order}")
    d_table = np.asarray(history, dtype=float)
    offset = system.b if b is None else b
    c = float(h) / ALPHA[order]
    lu = factorize_shifted(system.a, 1.0 / c)
    y_pred = d_table[: order + 1].sum(axis=0)
    psi = (GAMMA[1 : order + 1] @ d_table[1 : order + 1]) / ALPHA[order]
    f_pred = spmv(system.a, y_pred) + offset
    d = lu.solve((c * f_pred - psi) / c)
    y_new = y_pred + d
    return y_new, ERROR_CONST[order] * d, d
