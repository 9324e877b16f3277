"""Butcher tableaus of the embedded explicit Runge-Kutta pairs.

Three pairs are provided:

* ``RK23``: Bogacki-Shampine 3(2), three stages.
* ``RK45``: Dormand-Prince 5(4), six stages.
* ``DOP853``: Hairer's 8(5,3), twelve stages with a combined
  fifth/third-order error estimate.

All three propagate the higher-order solution and reuse the derivative
at the accepted step end as the first stage of the next step, so one
attempt costs ``n_stages`` right-hand-side evaluations.  Error weights
``e`` (and ``e3`` for the 8(5,3) pair) span the stages plus that final
derivative: the raw estimate is ``h * (K^T e)`` with K of shape
``(n_stages + 1, dim)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from dcnetsim.solvers import _dop853_tables as _d853

__all__ = ["DOP853", "RK23", "RK45", "TABLEAUS", "EmbeddedTableau"]


def _frozen(a) -> np.ndarray:
    arr = np.asarray(a, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class EmbeddedTableau:
    """Coefficients of an embedded explicit Runge-Kutta pair.

    Attributes
    ----------
    name : str
    order : int
        Order of the propagating solution.
    error_order : int
        Order of the embedded error estimate; step control uses the
        exponent 1/(error_order + 1).
    a, b, c : ndarray
        Strictly lower-triangular stage matrix (s, s), solution
        weights (s,), and stage abscissae (s,).
    e : ndarray, shape (s + 1,)
        Error weights over the stages plus the step-end derivative.
    e3 : ndarray or None
        Secondary third-order error weights; only the 8(5,3) pair sets
        this, and it switches the error norm to the combined form.
    """

    name: str
    order: int
    error_order: int
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    e: np.ndarray
    e3: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "a", _frozen(self.a))
        object.__setattr__(self, "b", _frozen(self.b))
        object.__setattr__(self, "c", _frozen(self.c))
        object.__setattr__(self, "e", _frozen(self.e))
        if self.e3 is not None:
            object.__setattr__(self, "e3", _frozen(self.e3))
        s = self.b.shape[0]
        assert self.a.shape == (s, s)
        assert self.c.shape == (s,)
        assert self.e.shape == (s + 1,)
        assert self.e3 is None or self.e3.shape == (s + 1,)

    @property
    def n_stages(self) -> int:
        return self.b.shape[0]

    @property
    def error_exponent(self) -> float:
        """k such that the error norm scales like h^k."""
        return float(self.error_order + 1)


RK23 = EmbeddedTableau(
    name="rk23",
    order=3,
    error_order=2,
    a=[[0, 0, 0], [1 / 2, 0, 0], [0, 3 / 4, 0]],
    b=[2 / 9, 1 / 3, 4 / 9],
    c=[0, 1 / 2, 3 / 4],
    e=[5 / 72, -1 / 12, -1 / 9, 1 / 8],
)

RK45 = EmbeddedTableau(
    name="rk45",
    order=5,
    error_order=4,
    a=[
        [0, 0, 0, 0, 0, 0],
        [1 / 5, 0, 0, 0, 0, 0],
        [3 / 40, 9 / 40, 0, 0, 0, 0],
        [44 / 45, -56 / 15, 32 / 9, 0, 0, 0],
        [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0, 0],
        [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0],
    ],
    b=[35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
    c=[0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1],
    e=[
        71 / 57600, 0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40,
    ],
)

DOP853 = EmbeddedTableau(
    name="dop853",
    order=8,
    error_order=7,
    a=_d853.A,
    b=_d853.B,
    c=_d853.C,
    e=_d853.E5,
    e3=_d853.E3,
)

TABLEAUS = {t.name: t for t in (RK23, RK45, DOP853)}
