"""Command-line entry points: simulate, scaling, validate, gen.

Every command exits 0 on success; any failure prints one JSON object
``{"error": <class>, "message": <text>}`` to stdout and exits nonzero,
so callers can branch on machine-readable output instead of scraping
tracebacks.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from dcnetsim.assembly import assemble, rhs
from dcnetsim.graphs import (
    incidence_matrix,
    load_topology,
    ring_communication,
    weighted_laplacian,
)
from dcnetsim.harness.catalog import CATALOG, catalog_topology, scaling_names
from dcnetsim.harness.experiment import run_experiment
from dcnetsim.harness.plots import emit_plots, emit_scaling_plot
from dcnetsim.harness.scaling import run_scaling, write_scaling_csv
from dcnetsim.scenario import StateVector, generate_parameters, load_scenario, save_scenario
from dcnetsim.solvers.integrate import METHODS, SolverConfig

__all__ = ["main"]


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="dcnetsim",
        description="Sparse time-domain simulation of controlled DC networks.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the load-step experiment")
    sim.add_argument("--scenario", required=True, help="scenario JSON file")
    sim.add_argument("--method", required=True, choices=METHODS)
    sim.add_argument("--rtol", type=float, default=1e-6)
    sim.add_argument("--atol", type=float, default=1e-8)
    sim.add_argument("--hmax", type=float, default=1e-2)
    sim.add_argument("--event-mode", choices=("restart", "continuous"),
                     default="restart")
    sim.add_argument("--out", required=True, help="output directory")

    sca = sub.add_parser("scaling", help="wall-time scaling study")
    sca.add_argument("--catalog", default=None,
                     help="directory of scenario JSON files (default: bundled)")
    sca.add_argument("--methods", default="rk23,rk45,dop853,radau,bdf",
                     help="comma-separated method list")
    sca.add_argument("--networks", default=None,
                     help="comma-separated network list (default: study range)")
    sca.add_argument("--reps", type=int, default=3)
    sca.add_argument("--rtol", type=float, default=1e-3)
    sca.add_argument("--atol", type=float, default=1e-6)
    sca.add_argument("--out", required=True, help="output CSV path")
    sca.add_argument("--plot", default=None, help="optional SVG path")

    val = sub.add_parser("validate", help="run the invariant suite")
    val.add_argument("--scenario", required=True, help="scenario JSON file")

    gen = sub.add_parser("gen", help="draw scenario parameters for a topology")
    gen.add_argument("--topology", required=True,
                     help="topology JSON file or bundled network name")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True, help="scenario JSON to write")
    return top


def _cmd_simulate(args) -> dict:
    scn = load_scenario(args.scenario)
    config = SolverConfig(
        method=args.method,
        rtol=args.rtol,
        atol=args.atol,
        h_max=args.hmax,
        event_mode=args.event_mode,
    )
    report = run_experiment(scn, args.method, config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "trace.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "h", "accepted", "n_rhs_cum", "n_fact_cum"])
        for t, h, acc, nr, nf in report.run.trace_columns():
            writer.writerow([f"{t:.12g}", f"{h:.12g}", int(acc), nr, nf])

    with open(out / "residuals.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "sharing_residual", "voltage_residual"])
        for t, s, v in zip(report.t, report.sharing, report.voltage):
            writer.writerow([f"{t:.12g}", f"{s:.12g}", f"{v:.12g}"])

    emit_plots(report, out)

    stats = report.run.stats
    summary = {
        "scenario": scn.topology.name,
        "method": report.method,
        "config": asdict(config),
        "event_times": list(report.event_times),
        "stats": {
            "n_rhs": stats.n_rhs,
            "n_accepted": stats.n_accepted,
            "n_rejected": stats.n_rejected,
            "n_factorizations": stats.n_factorizations,
            "wall_seconds": stats.wall_seconds,
        },
        "objectives": {
            label: {
                "window": list(obj.window),
                "sharing_max": obj.sharing_max,
                "voltage_max": obj.voltage_max,
                "sharing_ok": obj.sharing_ok,
                "voltage_ok": obj.voltage_ok,
            }
            for label, obj in report.objectives.items()
        },
        "machine": report.machine,
        "out_dir": str(out),
    }
    with open(out / "report.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=1)
        fh.write("\n")
    return summary


def _cmd_scaling(args) -> dict:
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    networks = (
        [n.strip() for n in args.networks.split(",") if n.strip()]
        if args.networks
        else scaling_names()
    )
    rows = run_scaling(
        networks,
        methods=methods,
        repetitions=args.reps,
        rtol=args.rtol,
        atol=args.atol,
        catalog_dir=args.catalog,
    )
    path = write_scaling_csv(rows, args.out)
    result = {"rows": len(rows), "csv": str(path)}
    if args.plot:
        result["plot"] = str(emit_scaling_plot(rows, args.plot))
    return result


def _invariant_checks(scn) -> list[dict]:
    checks = []

    def record(name, ok, detail):
        checks.append({"name": name, "ok": bool(ok), "detail": detail})

    top = scn.topology
    b_mat = incidence_matrix(top)
    col_sums = np.abs(np.asarray(b_mat.sum(axis=0))).max()
    record("incidence_zero_column_sums", col_sums == 0.0, f"max |sum| = {col_sums}")

    lap = weighted_laplacian(b_mat, np.ones(top.m))
    asym = np.abs((lap - lap.T).toarray()).max() if top.n <= 2000 else 0.0
    row = np.abs(np.asarray(lap.sum(axis=1))).max()
    record("laplacian_symmetric", asym <= 1e-12, f"max asymmetry = {asym}")
    record("laplacian_zero_row_sums", row <= 1e-12, f"max |row sum| = {row}")

    record("connected", top.is_connected(), f"n={top.n}, m={top.m}")

    system = assemble(scn)
    lcom_nnz = ring_communication(top).laplacian().nnz if top.n_gen else 0
    budget = 6 * scn.n + 5 * scn.m + 2 * lcom_nnz
    record(
        "jacobian_nnz_budget",
        system.a.nnz == budget,
        f"nnz = {system.a.nnz}, budget = {budget}",
    )

    x_eq = StateVector.pack(
        current=scn.i_load,
        voltage=scn.v_star,
        flow=np.zeros(scn.m),
        theta=np.zeros(scn.n),
        phi=scn.i_load,
    ).x
    resid = np.abs(rhs(system, x_eq)).max()
    scale = max(1.0, np.abs(system.b).max())
    record(
        "equilibrium_residual",
        resid <= 1e-9 * scale,
        f"max |rhs| = {resid:.3e} at offset scale {scale:.3e}",
    )

    if system.dim <= 500:
        eig = np.linalg.eigvals(system.a.toarray())
        max_re = float(eig.real.max())
        record(
            "spectrum_nonpositive",
            max_re <= 1e-6 * max(1.0, np.abs(eig).max()),
            f"max Re(lambda) = {max_re:.3e}",
        )
    return checks


def _cmd_validate(args) -> dict:
    scn = load_scenario(args.scenario)
    checks = _invariant_checks(scn)
    ok = all(c["ok"] for c in checks)
    result = {"scenario": scn.topology.name, "ok": ok, "checks": checks}
    if not ok:
        failed = ", ".join(c["name"] for c in checks if not c["ok"])
        raise SystemExit(_fail("InvariantViolation", f"failed: {failed}", result))
    return result


def _cmd_gen(args) -> dict:
    source = Path(args.topology)
    if source.exists():
        top = load_topology(source)
    elif args.topology in CATALOG:
        top = catalog_topology(args.topology)
    else:
        raise FileNotFoundError(
            f"topology {args.topology!r} is neither a file nor a bundled "
            f"network name"
        )
    scn = generate_parameters(top, seed=args.seed)
    save_scenario(scn, args.out)
    return {
        "written": str(args.out),
        "network": top.name,
        "n": top.n,
        "m": top.m,
        "dimension": 4 * top.n + top.m,
        "seed": args.seed,
    }


def _fail(kind: str, message: str, extra: dict | None = None) -> int:
    payload = {"error": kind, "message": message}
    if extra:
        payload.update(extra)
    print(json.dumps(payload))
    return 1


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    handler = {
        "simulate": _cmd_simulate,
        "scaling": _cmd_scaling,
        "validate": _cmd_validate,
        "gen": _cmd_gen,
    }[args.command]
    try:
        result = handler(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        return _fail(type(exc).__name__, str(exc))
    print(json.dumps(result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
