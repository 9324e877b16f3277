"""Time integration entry point: methods, events, traces, statistics.

One call to :func:`integrate` runs a whole simulation, stepping an
:class:`~dcnetsim.assembly.AffineSystem` across load-change events with
the selected adaptive method.  Events can be handled two ways:

* ``restart``: the run is split into segments that end exactly at each
  event time; the offset vector is updated and the stepper starts the
  next segment from scratch (step size re-initialized, history
  discarded).  Every method behaves well here.
* ``continuous``: the stepper runs straight through and the offset is
  swapped at the first accepted step boundary at or after the event
  time.  Multistep history then misfits the new dynamics, which is the
  interesting failure mode to study.

Every attempted step is recorded in a trace (time, step size,
accepted flag, error norm, cumulative right-hand-side evaluations and
factorizations); sampled states are kept per ``sample_stride``.
"""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field

import numpy as np

from dcnetsim.assembly import AffineSystem, apply_load_change
from dcnetsim.solvers import erk_kernel
from dcnetsim.solvers.bdf import BdfStepper
from dcnetsim.solvers.radau import RadauStepper
from dcnetsim.solvers.tableaus import TABLEAUS

__all__ = [
    "Event",
    "EventSchedule",
    "IntegrationStalledError",
    "METHODS",
    "RunStats",
    "SolverConfig",
    "SolverRun",
    "integrate",
]

METHODS = ("rk23", "rk45", "dop853", "radau", "bdf")
EVENT_MODES = ("restart", "continuous")


class IntegrationStalledError(RuntimeError):
    """Step size collapsed below 1e-14 of the requested span.

    Attributes ``t`` and ``h`` hold the time and step size at the
    stall; ``partial`` holds the run assembled so far.
    """

    def __init__(self, t: float, h: float, partial=None):
        self.t = float(t)
        self.h = float(h)
        self.partial = partial
        super().__init__(
            f"integration stalled at t={t:.6e} with step size h={h:.3e}"
        )


@dataclass(frozen=True)
class Event:
    """Load change: the draw at 1-based ``node`` becomes ``amps`` at ``time``."""

    time: float
    node: int
    amps: float


EventSchedule = tuple  # sequence of Event, strictly increasing in time


@dataclass(frozen=True)
class SolverConfig:
    """Integration settings.

    ``h_init`` of None requests the automatic first step (also after
    each restart-mode event).  ``sample_stride`` of s keeps every s-th
    accepted state; 0 keeps only endpoints and event boundaries, which
    is what timing studies want.
    """

    method: str = "rk45"
    rtol: float = 1e-3
    atol: float = 1e-6
    h_init: float | None = None
    h_max: float = 1e-2
    event_mode: str = "restart"
    sample_stride: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(
                f"unknown method {self.method!r}; expected one of {METHODS}"
            )
        if self.event_mode not in EVENT_MODES:
            raise ValueError(
                f"unknown event mode {self.event_mode!r}; expected one of {EVENT_MODES}"
            )
        if not (self.rtol > 0.0 and self.atol > 0.0):
            raise ValueError("rtol and atol must be positive")
        if self.h_max <= 0.0:
            raise ValueError("h_max must be positive")
        if self.h_init is not None and self.h_init <= 0.0:
            raise ValueError("h_init must be positive when given")
        if self.sample_stride < 0:
            raise ValueError("sample_stride must be >= 0")


@dataclass(frozen=True)
class RunStats:
    """Aggregate counters of one integration."""

    n_rhs: int
    n_accepted: int
    n_rejected: int
    n_factorizations: int
    wall_seconds: float


@dataclass(frozen=True)
class SolverRun:
    """Result of :func:`integrate`.

    ``t``/``x`` are the sampled trajectory (x rows align with t).  The
    trace arrays have one entry per attempted step.
    """

    method: str
    t: np.ndarray
    x: np.ndarray
    trace_t: np.ndarray
    trace_h: np.ndarray
    trace_accepted: np.ndarray
    trace_err: np.ndarray
    trace_rhs_cum: np.ndarray
    trace_fact_cum: np.ndarray
    stats: RunStats
    event_times: tuple
    config: SolverConfig

    @property
    def x_final(self) -> np.ndarray:
        return self.x[-1]

    def trace_columns(self):
        """Rows (t, h, accepted, n_rhs_cum, n_fact_cum) for the trace CSV."""
        return zip(
            self.trace_t,
            self.trace_h,
            self.trace_accepted,
            self.trace_rhs_cum,
            self.trace_fact_cum,
        )


class RunBuilder:
    """Accumulates trace rows, samples, and counters across segments."""

    def __init__(self):
        self.trace_t = []
        self.trace_h = []
        self.trace_acc = []
        self.trace_err = []
        self.trace_rhs = []
        self.trace_fact = []
        self.samples_t = []
        self.samples_x = []
        self.n_rhs = 0
        self.n_fact = 0
        self.n_acc = 0
        self.n_rej = 0

    def count_rhs(self, k: int = 1) -> None:
        self.n_rhs += k

    def count_fact(self, k: int = 1) -> None:
        self.n_fact += k

    def trace(self, t, h, accepted, err) -> None:
        self.trace_t.append(float(t))
        self.trace_h.append(float(h))
        self.trace_acc.append(bool(accepted))
        self.trace_err.append(float(err))
        self.trace_rhs.append(self.n_rhs)
        self.trace_fact.append(self.n_fact)
        if accepted:
            self.n_acc += 1
        else:
            self.n_rej += 1

    def sample(self, t, x) -> None:
        if self.samples_t and self.samples_t[-1] == float(t):
            return
        self.samples_t.append(float(t))
        self.samples_x.append(np.array(x, dtype=float, copy=True))

    def merge_kernel(self, res) -> None:
        """Fold one compiled-kernel segment result into the builder."""
        (
            _status,
            _t,
            _x,
            s_t,
            s_x,
            tr_t,
            tr_h,
            tr_acc,
            tr_err,
            tr_rhs,
            n_rhs,
            n_acc,
            n_rej,
        ) = res
        base_rhs = self.n_rhs
        for i in range(tr_t.shape[0]):
            self.trace_t.append(float(tr_t[i]))
            self.trace_h.append(float(tr_h[i]))
            self.trace_acc.append(bool(tr_acc[i]))
            self.trace_err.append(float(tr_err[i]))
            self.trace_rhs.append(base_rhs + int(tr_rhs[i]))
            self.trace_fact.append(self.n_fact)
        for i in range(s_t.shape[0]):
            self.sample(s_t[i], s_x[i])
        self.n_rhs += int(n_rhs)
        self.n_acc += int(n_acc)
        self.n_rej += int(n_rej)

    def finalize(self, method, event_times, config, wall) -> SolverRun:
        return SolverRun(
            method=method,
            t=np.asarray(self.samples_t),
            x=np.asarray(self.samples_x),
            trace_t=np.asarray(self.trace_t),
            trace_h=np.asarray(self.trace_h),
            trace_accepted=np.asarray(self.trace_acc, dtype=bool),
            trace_err=np.asarray(self.trace_err),
            trace_rhs_cum=np.asarray(self.trace_rhs, dtype=np.int64),
            trace_fact_cum=np.asarray(self.trace_fact, dtype=np.int64),
            stats=RunStats(
                n_rhs=self.n_rhs,
                n_accepted=self.n_acc,
                n_rejected=self.n_rej,
                n_factorizations=self.n_fact,
                wall_seconds=wall,
            ),
            event_times=tuple(event_times),
            config=config,
        )


def _validated_events(system: AffineSystem, events, t0: float, t_end: float):
    evs = sorted(events, key=lambda e: e.time)
    last = t0
    for e in evs:
        if not (t0 < e.time < t_end):
            raise ValueError(
                f"event at t={e.time} lies outside the open interval "
                f"({t0}, {t_end})"
            )
        if e.time <= last and last != t0:
            raise ValueError(f"event times must be strictly increasing, got {e.time}")
        last = e.time
    times = [e.time for e in evs]
    if len(set(times)) != len(times):
        raise ValueError("event times must be distinct")
    return evs


def _event_systems(system: AffineSystem, events):
    """Cumulative systems after each event, sharing the matrix."""
    systems = [system]
    for e in events:
        systems.append(apply_load_change(systems[-1], e.node, e.amps))
    return systems


def integrate(
    system: AffineSystem,
    x0: np.ndarray,
    t_span: tuple,
    events=(),
    config: SolverConfig | None = None,
) -> SolverRun:
    """Integrate x' = A x + b over ``t_span`` with load-change events.

    Raises :class:`IntegrationStalledError` if the controller collapses
    the step below 1e-14 of the span, and ``ValueError`` for malformed
    inputs (wrong state length, events outside the span, bad nodes).
    """
    if config is None:
        config = SolverConfig()
    t0, t_end = float(t_span[0]), float(t_span[1])
    if not (np.isfinite(t0) and np.isfinite(t_end) and t_end > t0):
        raise ValueError(f"bad time span ({t0}, {t_end})")
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.shape != (system.dim,):
        raise ValueError(
            f"initial state has shape {x0.shape}, system dimension is {system.dim}"
        )
    if not np.all(np.isfinite(x0)):
        raise ValueError("initial state contains non-finite values")
    events = _validated_events(system, events, t0, t_end)
    systems = _event_systems(system, events)
    span = t_end - t0

    builder = RunBuilder()
    started = _time.perf_counter()

    if config.event_mode == "restart":
        bounds = [t0, *(e.time for e in events), t_end]
        plan = [
            (bounds[i], bounds[i + 1], systems[i], (), np.zeros((0, system.dim)))
            for i in range(len(systems))
        ]
    else:
        plan = [
            (
                t0,
                t_end,
                systems[0],
                tuple(e.time for e in events),
                np.array([s.b for s in systems[1:]])
                if events
                else np.zeros((0, system.dim)),
            )
        ]

    x = x0
    if config.method in TABLEAUS:
        tab = TABLEAUS[config.method]
        for seg_t0, seg_t1, seg_sys, ev_times, ev_offsets in plan:
            res = erk_kernel.run_erk_segment(
                seg_sys.a.indptr,
                seg_sys.a.indices,
                seg_sys.a.data,
                seg_sys.b,
                np.asarray(ev_times, dtype=np.float64),
                np.asarray(ev_offsets, dtype=np.float64),
                x,
                seg_t0,
                seg_t1,
                span,
                -1.0 if config.h_init is None else float(config.h_init),
                config.h_max,
                config.rtol,
                config.atol,
                tab.a,
                tab.b,
                tab.e,
                tab.e3 if tab.e3 is not None else np.zeros_like(tab.e),
                1 if tab.e3 is not None else 0,
                tab.error_exponent,
                config.sample_stride,
            )
            builder.merge_kernel(res)
            status, t_reached, x = res[0], res[1], res[2]
            if status == erk_kernel.STATUS_STALLED:
                wall = _time.perf_counter() - started
                run = builder.finalize(
                    config.method, [e.time for e in events], config, wall
                )
                raise IntegrationStalledError(
                    t_reached, run.trace_h[-1] if len(run.trace_h) else 0.0, run
                )
    else:
        cls = RadauStepper if config.method == "radau" else BdfStepper
        if config.event_mode == "continuous":
            steppers = [cls(system, config.rtol, config.atol, config.h_max)]
        else:
            steppers = [
                cls(seg_sys, config.rtol, config.atol, config.h_max)
                for _, _, seg_sys, _, _ in plan
            ]
        for stepper, (seg_t0, seg_t1, seg_sys, ev_times, ev_offsets) in zip(
            steppers, plan
        ):
            status, t_reached, x, h_last = stepper.run_segment(
                seg_t0,
                seg_t1,
                x,
                seg_sys.b,
                ev_times,
                ev_offsets,
                config.h_init,
                config.sample_stride,
                span,
                builder,
            )
            if status == "stalled":
                wall = _time.perf_counter() - started
                run = builder.finalize(
                    config.method, [e.time for e in events], config, wall
                )
                raise IntegrationStalledError(t_reached, h_last, run)

    wall = _time.perf_counter() - started
    return builder.finalize(config.method, [e.time for e in events], config, wall)
