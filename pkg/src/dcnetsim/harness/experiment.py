"""The load-step experiment and its two control objectives.

One run integrates a network over [0, 5] s from the seeded initial
state.  At t = 1.5 s the load of the lowest-indexed non-generator node
jumps to 20 A; at t = 2.0 s it returns to its drawn value.  The
objectives checked on the sampled trajectory are proportional current
sharing (weighted node currents equalize) and average voltage
regulation (the weighted voltage average holds its reference).
"""

from __future__ import annotations

import platform
from dataclasses import dataclass, field

import numpy as np

import dcnetsim
from dcnetsim.assembly import assemble
from dcnetsim.scenario import Scenario, generate_initial_state
from dcnetsim.solvers.integrate import Event, SolverConfig, SolverRun, integrate

__all__ = [
    "ExperimentError",
    "ExperimentReport",
    "ObjectiveReport",
    "check_objectives",
    "default_events",
    "run_experiment",
    "sharing_residual",
    "voltage_residual",
    "EXPERIMENT_SPAN",
    "LOAD_STEP_AMPS",
    "PRE_EVENT_WINDOW",
    "RECOVERY_WINDOW",
]

EXPERIMENT_SPAN = (0.0, 5.0)
LOAD_STEP_AMPS = 20.0
LOAD_STEP_TIME = 1.5
LOAD_RESTORE_TIME = 2.0

# steady-state check windows: right before the load step, and the final
# half second after the longest transients have died out
PRE_EVENT_WINDOW = (1.4, 1.5)
RECOVERY_WINDOW = (4.5, 5.0)


class ExperimentError(ValueError):
    """Invalid experiment configuration or malformed report input."""


def sharing_residual(current, w) -> np.ndarray:
    """max_i |w_i I_i - c| / c with c the mean of the weighted currents.

    ``current`` has one row per sample.  A non-positive mean marks the
    sample as infinitely far from proportional sharing.
    """
    wi = np.atleast_2d(current) * np.broadcast_to(w, np.atleast_2d(current).shape)
    c = wi.mean(axis=1)
    dev = np.abs(wi - c[:, None]).max(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        res = np.where(c > 0.0, dev / np.where(c > 0.0, c, 1.0), np.inf)
    return res


def voltage_residual(voltage, v_star, w) -> np.ndarray:
    """|1^T W^-1 V - 1^T W^-1 V*| / |1^T W^-1 V*| per sample row."""
    inv_w = 1.0 / np.broadcast_to(w, np.shape(v_star))
    ref = float(np.dot(inv_w, v_star))
    val = np.atleast_2d(voltage) @ inv_w
    return np.abs(val - ref) / abs(ref)


def default_events(scn: Scenario) -> tuple:
    """Load step and restore at the lowest-indexed non-generator node."""
    gens = set(scn.topology.generators)
    node = next((i + 1 for i in range(scn.n) if i + 1 not in gens), None)
    if node is None:
        raise ExperimentError(
            "every node is a generator; the load-step experiment needs at "
            "least one load node"
        )
    return (
        Event(time=LOAD_STEP_TIME, node=node, amps=LOAD_STEP_AMPS),
        Event(time=LOAD_RESTORE_TIME, node=node, amps=float(scn.i_load[node - 1])),
    )


@dataclass(frozen=True)
class ObjectiveReport:
    """Windowed objective verdict: worst residuals and pass flags."""

    window: tuple
    sharing_max: float
    voltage_max: float
    tol_sharing: float
    tol_voltage: float

    @property
    def sharing_ok(self) -> bool:
        return bool(self.sharing_max <= self.tol_sharing)

    @property
    def voltage_ok(self) -> bool:
        return bool(self.voltage_max <= self.tol_voltage)

    @property
    def passed(self) -> bool:
        return self.sharing_ok and self.voltage_ok


@dataclass(frozen=True)
class ExperimentReport:
    """Everything one experiment run produced."""

    scenario: Scenario
    method: str
    run: SolverRun
    sharing: np.ndarray
    voltage: np.ndarray
    event_times: tuple
    final_load: np.ndarray
    objectives: dict = field(default_factory=dict)
    machine: dict = field(default_factory=dict)

    @property
    def t(self) -> np.ndarray:
        return self.run.t


def _machine_metadata() -> dict:
    return {
        "platform": platform.platform(),
        "python": platform.python_version(),
        "package_version": dcnetsim.__version__,
    }


def run_experiment(
    scenario: Scenario,
    method: str = "rk45",
    config: SolverConfig | None = None,
) -> ExperimentReport:
    """Run the load-step experiment on one scenario with one method."""
    if config is None:
        config = SolverConfig(method=method, rtol=1e-6, atol=1e-8)
    elif config.method != method:
        raise ExperimentError(
            f"config method {config.method!r} contradicts requested {method!r}"
        )
    events = default_events(scenario)
    system = assemble(scenario)
    x0 = generate_initial_state(scenario, seed=scenario.seed + 1)
    run = integrate(system, x0, EXPERIMENT_SPAN, events=events, config=config)

    n = scenario.n
    current = run.x[:, :n]
    voltage = run.x[:, n : 2 * n]
    sharing = sharing_residual(current, scenario.w)
    volt = voltage_residual(voltage, scenario.v_star, scenario.w)

    # the restore event reverts the perturbation, so the load vector at
    # the end equals the drawn one
    final_load = scenario.i_load.copy()
    final_load[events[-1].node - 1] = events[-1].amps

    report = ExperimentReport(
        scenario=scenario,
        method=method,
        run=run,
        sharing=sharing,
        voltage=volt,
        event_times=tuple(e.time for e in events),
        final_load=final_load,
        machine=_machine_metadata(),
    )
    for label, window in (("pre_event", PRE_EVENT_WINDOW),
                          ("recovery", RECOVERY_WINDOW)):
        report.objectives[label] = check_objectives(report, window=window)
    return report


def check_objectives(
    report: ExperimentReport,
    tol_sharing: float = 1e-3,
    tol_voltage: float = 1e-3,
    window: tuple = RECOVERY_WINDOW,
) -> ObjectiveReport:
    """Worst-case residuals over all samples inside ``window``.

    The window is half-open [lo, hi), so a boundary sample shared with
    an event stays out; it closes on the right only when hi is the
    final sample time.
    """
    lo, hi = float(window[0]), float(window[1])
    if not hi > lo:
        raise ExperimentError(f"empty objective window ({lo}, {hi})")
    t = report.run.t
    mask = (t >= lo) & ((t < hi) | (t == hi) & (hi == t[-1]))
    if not mask.any():
        raise ExperimentError(
            f"no samples inside the window ({lo}, {hi}); the run covered "
            f"[{t[0]}, {t[-1]}]"
        )
    return ObjectiveReport(
        window=(lo, hi),
        sharing_max=float(report.sharing[mask].max()),
        voltage_max=float(report.voltage[mask].max()),
        tol_sharing=float(tol_sharing),
        tol_voltage=float(tol_voltage),
    )
