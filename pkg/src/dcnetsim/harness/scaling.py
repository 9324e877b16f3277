"""Wall-time scaling study across the benchmark catalog.

Each (network, method) pair runs the full load-step experiment with
trajectory storage turned off; the row keeps the median wall time over
the repetitions together with the solver work counters.  Timing claims
are only ever made about slopes and orderings, never absolute seconds.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from dcnetsim.assembly import assemble
from dcnetsim.harness.catalog import CATALOG, catalog_scenario
from dcnetsim.harness.experiment import EXPERIMENT_SPAN, default_events
from dcnetsim.scenario import generate_initial_state, load_scenario
from dcnetsim.solvers.integrate import METHODS, SolverConfig, integrate

__all__ = ["run_scaling", "write_scaling_csv", "loglog_slope", "CSV_COLUMNS"]

CSV_COLUMNS = (
    "network",
    "dimension",
    "n",
    "m",
    "n_gen",
    "method",
    "wall_ms_median",
    "n_rhs",
    "n_accepted",
    "n_rejected",
    "n_fact",
)


def _timing_config(method: str, rtol: float, atol: float) -> SolverConfig:
    return SolverConfig(
        method=method, rtol=rtol, atol=atol, sample_stride=0
    )


def _scenario_from(name: str, catalog_dir):
    if catalog_dir is None:
        return catalog_scenario(name)
    path = Path(catalog_dir) / f"{name}.json"
    if not path.exists():
        raise FileNotFoundError(
            f"scenario file for network {name!r} not found at {path}"
        )
    return load_scenario(path)


def run_scaling(
    networks,
    methods=("rk23", "rk45", "dop853", "radau", "bdf"),
    repetitions: int = 3,
    rtol: float = 1e-3,
    atol: float = 1e-6,
    catalog_dir=None,
) -> list[dict]:
    """Rows of the scaling table, sorted by state dimension.

    ``catalog_dir`` of None draws scenarios from the bundled catalog;
    otherwise one JSON file per network is expected in that directory.
    Repetitions run serially; the first, untimed warmup absorbs code
    compilation and cache effects.
    """
    for method in methods:
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}")
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    rows = []
    for name in networks:
        scn = _scenario_from(name, catalog_dir)
        system = assemble(scn)
        x0 = generate_initial_state(scn, seed=scn.seed + 1)
        events = default_events(scn)
        n_gen = len(scn.topology.generators)
        for method in methods:
            config = _timing_config(method, rtol, atol)
            integrate(system, x0, EXPERIMENT_SPAN, events=events, config=config)
            walls = []
            run = None
            for _ in range(repetitions):
                run = integrate(
                    system, x0, EXPERIMENT_SPAN, events=events, config=config
                )
                walls.append(run.stats.wall_seconds * 1e3)
            rows.append(
                {
                    "network": name,
                    "dimension": system.dim,
                    "n": scn.n,
                    "m": scn.m,
                    "n_gen": n_gen,
                    "method": method,
                    "wall_ms_median": float(np.median(walls)),
                    "n_rhs": run.stats.n_rhs,
                    "n_accepted": run.stats.n_accepted,
                    "n_rejected": run.stats.n_rejected,
                    "n_fact": run.stats.n_factorizations,
                }
            )
    rows.sort(key=lambda r: (r["dimension"], r["network"], r["method"]))
    return rows


def write_scaling_csv(rows, path) -> Path:
    """Write rows using the fixed column order; returns the path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in CSV_COLUMNS})
    return path


def loglog_slope(dimension, wall_ms) -> float:
    """Least-squares slope of log wall time against log dimension."""
    x = np.log(np.asarray(dimension, dtype=float))
    y = np.log(np.asarray(wall_ms, dtype=float))
    if x.size < 2:
        raise ValueError("need at least two points for a slope")
    return float(np.polyfit(x, y, 1)[0])


def method_rows(rows, method: str) -> list[dict]:
    """Filter scaling rows for one method, keeping dimension order."""
    return [r for r in rows if r["method"] == method]
