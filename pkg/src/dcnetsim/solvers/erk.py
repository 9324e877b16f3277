"""Reference explicit Runge-Kutta step, one attempt at a time.

This is the plain numpy twin of the compiled segment kernel in
:mod:`dcnetsim.solvers.erk_kernel`.  The kernel is what production
integrations run; this step function is the readable reference the
kernel is tested against, and what callers use for single-step
experiments such as convergence-order measurements.
"""

from __future__ import annotations

import numpy as np

from dcnetsim.solvers.controller import combined_error_norm, error_norm, error_scale
from dcnetsim.solvers.tableaus import EmbeddedTableau

__all__ = ["erk_step", "step_error_norm"]


def erk_step(
    tab: EmbeddedTableau,
    rhs_fn,
    x: np.ndarray,
    h: float,
    f0: np.ndarray | None = None,
):
    """One embedded RK attempt from state ``x`` with step ``h``.

    Parameters
    ----------
    tab : EmbeddedTableau
    rhs_fn : callable
        Maps a state vector to its derivative (autonomous system).
    f0 : ndarray, optional
        Derivative at ``x`` if already known (first-same-as-last reuse);
        evaluated here when omitted.

    Returns
    -------
    x_next : ndarray
        Higher-order solution at the step end.
    err_estimate : ndarray or (ndarray, ndarray)
        ``h *`` (error-weight combination) for the standard pairs, or
        the raw pair of fifth/third-order combinations for the 8(5,3)
        tableau (the norm applies ``h`` itself there).
    stages : ndarray, shape (n_stages + 1, dim)
        All stage derivatives; the last row is the derivative at
        ``x_next`` and seeds the next step.
    """
    s = tab.n_stages
    x = np.asarray(x, dtype=np.float64)
    stages = np.empty((s + 1, x.shape[0]))
    stages[0] = rhs_fn(x) if f0 is None else f0
    for i in range(1, s):
        y_stage = x + h * (tab.a[i, :i] @ stages[:i])
        stages[i] = rhs_fn(y_stage)
    x_next = x + h * (tab.b @ stages[:s])
    stages[s] = rhs_fn(x_next)
    if tab.e3 is None:
        err_estimate = h * (tab.e @ stages)
    else:
        err_estimate = (tab.e @ stages, tab.e3 @ stages)
    return x_next, err_estimate, stages


def step_error_norm(
    tab: EmbeddedTableau,
    err_estimate,
    x_prev: np.ndarray,
    x_next: np.ndarray,
    h: float,
    rtol: float,
    atol: float,
) -> float:
    """Weighted norm of an :func:`erk_step` error estimate."""
    if tab.e3 is None:
        return error_norm(err_estimate, x_prev, x_next, rtol, atol)
    err5, err3 = err_estimate
    scale = error_scale(x_prev, x_next, rtol, atol)
    return combined_error_norm(err5, err3, scale, h)
