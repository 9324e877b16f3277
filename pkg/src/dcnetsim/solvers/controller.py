"""Step acceptance, error norms, and adaptive step-size proposals.

All methods share the same weighted RMS error norm and the same
predictive controller: the classic factor err^(-1/k) (k = error-order
plus one) times a memory term comparing the previous accepted step,
clamped to [0.2, 10] with safety 0.9.  After a rejection the next
acceptance never grows the step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ControllerMemory",
    "combined_error_norm",
    "error_norm",
    "error_scale",
    "initial_step",
    "propose_step",
]

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
STALL_FRACTION = 1e-14


def error_scale(x_prev, x_next, rtol: float, atol: float) -> np.ndarray:
    """Per-component tolerance scale atol + rtol * max(|x_prev|, |x_next|)."""
    return atol + rtol * np.maximum(np.abs(x_prev), np.abs(x_next))


def error_norm(err, x_prev, x_next, rtol: float, atol: float) -> float:
    """Weighted RMS norm of an error estimate; acceptance means <= 1."""
    scale = error_scale(x_prev, x_next, rtol, atol)
    return float(np.sqrt(np.mean((np.asarray(err) / scale) ** 2)))


def combined_error_norm(err5, err3, scale, h: float) -> float:
    """Error norm of the 8(5,3) pair, damping the fifth-order estimate.

    Uses |h| * ||e5||^2 / sqrt((||e5||^2 + 0.01 ||e3||^2) * dim) with
    plain 2-norms of the scaled estimates, so the fifth-order estimate
    dominates unless the third-order one is far larger.
    """
    e5 = np.asarray(err5) / scale
    e3 = np.asarray(err3) / scale
    a5 = float(np.dot(e5, e5))
    a3 = float(np.dot(e3, e3))
    denom = a5 + 0.01 * a3
    if denom <= 0.0:
        return 0.0
    return abs(h) * a5 / np.sqrt(denom * len(e5))


@dataclass
class ControllerMemory:
    """Mutable controller state carried across steps of one integration."""

    h_prev: float = -1.0
    err_prev: float = -1.0
    rejected_since_accept: bool = False


def propose_step(
    h: float,
    err: float,
    k: float,
    memory: ControllerMemory,
    h_max: float,
    safety: float = SAFETY,
) -> tuple[bool, float]:
    """Decide acceptance of a step and propose the next step size.

    Parameters
    ----------
    h : float
        Step size just attempted.
    err : float
        Weighted RMS error norm of the attempt.
    k : float
        Error decay exponent (error order plus one), e.g. 5 for the
        5(4) pair, 4 for the implicit order-5 method.
    memory : ControllerMemory
        Updated in place; holds the last accepted (h, err) pair and the
        post-rejection flag.

    Returns
    -------
    (accepted, h_next)

    With no history and err = 1 the step is accepted and h_next is
    0.9 h; err -> 0 grows by the capped factor 10 (subject to h_max);
    a rejection with err = 2^k proposes 0.45 h.
    """
    if not np.isfinite(err):
        err = 1e10
    accepted = err <= 1.0
    if err == 0.0:
        factor = MAX_FACTOR
    else:
        fac = err ** (-1.0 / k)
        if memory.err_prev > 0.0 and memory.h_prev > 0.0:
            predictive = (h / memory.h_prev) * (memory.err_prev / err) ** (1.0 / k)
            if predictive < 1.0:
                fac *= predictive
        factor = safety * fac
        factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
    if accepted:
        if memory.rejected_since_accept:
            factor = min(1.0, factor)
        memory.h_prev = h
        memory.err_prev = err
        memory.rejected_since_accept = False
        h_next = min(h * factor, h_max)
    else:
        memory.rejected_since_accept = True
        factor = min(1.0, factor)
        h_next = h * factor
    return accepted, h_next


def stall_floor(t0: float, t_end: float) -> float:
    """Step size below which the integration is declared stalled."""
    return STALL_FRACTION * (t_end - t0)


def initial_step(
    rhs_fn,
    x0: np.ndarray,
    f0: np.ndarray,
    interval: float,
    k: float,
    rtol: float,
    atol: float,
    h_max: float,
) -> float:
    """Automatic first step from local derivative and curvature probes.

    Classic two-probe heuristic: a trial h0 from the size of x0 and
    x0', then a refinement from the observed derivative change over
    that trial.  Costs one extra right-hand-side evaluation.
    """
    dim = x0.shape[0]
    scale = atol + rtol * np.abs(x0)
    d0 = np.sqrt(np.mean((x0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    h0 = min(h0, interval)
    f1 = rhs_fn(x0 + h0 * f0)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / k)
    return float(min(100 * h0, h1, interval, h_max))
