"""Release gate: ten package-level checks, one test per check.

Each test asserts the stated tolerance exactly; failure messages list
every offending item.  Runs use the committed scenario fixtures, so
the numbers here are reproducible bit for bit on any machine with the
same dependency versions.
"""

from types import SimpleNamespace

import numpy as np
import pytest
from scipy import sparse

from dcnetsim.graphs import incidence_matrix, weighted_laplacian
from dcnetsim.harness.catalog import CATALOG, catalog_scenario, catalog_topology, scaling_names
from dcnetsim.harness.experiment import run_experiment
from dcnetsim.harness.scaling import loglog_slope, method_rows, run_scaling
from dcnetsim.assembly import assemble
from dcnetsim.solvers.bdf import advance_difference_table, bdf_step
from dcnetsim.solvers.integrate import SolverConfig, integrate
from oracles import dense_closed_loop
from test_bdf import scalar_system, seeded_table

ALL_NAMES = list(CATALOG)
SMALL_NETWORKS = ALL_NAMES[: ALL_NAMES.index("case57") + 1]  # case4gs..case57
CROSS_NETWORKS = ("case4gs", "case9")
CROSS_METHODS = ("rk23", "rk45", "dop853", "radau")
DESK_LIMIT = 1611


@pytest.fixture(scope="session")
def experiment():
    """Memoized experiment runner shared by the trajectory checks."""
    cache = {}

    def get(network, method, event_mode="restart"):
        key = (network, method, event_mode)
        if key not in cache:
            scn = catalog_scenario(network)
            stride = 1 if scn.n <= 9 else 20
            config = SolverConfig(
                method=method, rtol=1e-6, atol=1e-8,
                event_mode=event_mode, sample_stride=stride,
            )
            cache[key] = run_experiment(scn, method, config)
        return cache[key]

    return get


def test_01_dimension_catalog():
    """4n + m computed from each network equals its listed dimension."""
    bad = []
    for name in ALL_NAMES:
        entry = CATALOG[name]
        top = catalog_topology(name)
        computed = 4 * top.n + top.m
        if computed != entry.stated_dimension:
            bad.append(
                f"{name}: 4*{top.n}+{top.m} = {computed}, "
                f"listed {entry.stated_dimension}"
            )
    assert not bad, "dimension mismatches:\n" + "\n".join(bad)


def test_02_graph_invariants():
    """Incidence columns sum to zero; Laplacian symmetric with zero row sums."""
    bad = []
    for name in ALL_NAMES:
        top = catalog_topology(name)
        b = incidence_matrix(top)
        col = np.abs(np.asarray(b.sum(axis=0))).max()
        if col != 0.0:
            bad.append(f"{name}: incidence column sum {col}")
        lap = weighted_laplacian(b, np.ones(top.m))
        asym = np.abs((lap - lap.T).toarray()).max() if top.n <= 2500 else (
            abs(lap - lap.T).max()
        )
        row = np.abs(lap @ np.ones(top.n)).max()
        if asym > 1e-12:
            bad.append(f"{name}: Laplacian asymmetry {asym:.3e}")
        if row > 1e-12:
            bad.append(f"{name}: Laplacian row sum {row:.3e}")
    assert not bad, "\n".join(bad)


def test_03_assembly_matches_dense_oracle():
    """Sparse closed-loop assembly equals the dense loop-built reference."""
    bad = []
    for name in ALL_NAMES:
        if CATALOG[name].n > 60:
            continue
        scn = catalog_scenario(name)
        system = assemble(scn)
        a_ref, b_ref = dense_closed_loop(scn)
        da = np.abs(system.a.toarray() - a_ref).max()
        db = np.abs(system.b - b_ref).max()
        if da > 1e-12 or db > 1e-12:
            bad.append(f"{name}: max|dA| = {da:.3e}, max|db| = {db:.3e}")
    assert not bad, "\n".join(bad)


def test_04_spectrum():
    """Eigenvalues sit in the closed left half plane; communication makes
    the system matrix singular."""
    bad = []
    for name in SMALL_NETWORKS:
        scn = catalog_scenario(name)
        a = assemble(scn).a.toarray()
        eig = np.linalg.eigvals(a)
        max_re = eig.real.max()
        if max_re > 1e-6:
            bad.append(f"{name}: max Re(lambda) = {max_re:.3e}")
        if len(scn.com.edges) >= 1:
            norm = np.linalg.norm(a, 2)
            smallest = np.abs(eig).min()
            if smallest > 1e-8 * norm:
                bad.append(
                    f"{name}: min |lambda| = {smallest:.3e} "
                    f"exceeds 1e-8*||A|| = {1e-8 * norm:.3e}"
                )
    assert not bad, "\n".join(bad)


def test_05_solver_orders():
    """Step-halving slopes on dx/dt = -x match each method's order."""
    sys1 = SimpleNamespace(
        a=sparse.csr_array(np.array([[-1.0]])), b=np.zeros(1), dim=1
    )

    def fixed_h_error(method, h, t_end=2.0):
        config = SolverConfig(
            method=method, rtol=0.5, atol=1e6, h_init=h, h_max=h
        )
        run = integrate(sys1, np.ones(1), (0.0, t_end), config=config)
        return abs(run.x[-1, 0] - np.exp(-t_end))

    bad = []
    for method, target, h in [
        ("rk23", 3, 1 / 8),
        ("rk45", 5, 1 / 8),
        ("dop853", 8, 1 / 2),
        ("radau", 5, 1 / 8),
    ]:
        e1, e2 = fixed_h_error(method, h), fixed_h_error(method, h / 2)
        slope = np.log2(e1 / e2)
        if abs(slope - target) > 0.3:
            bad.append(f"{method}: slope {slope:.2f}, want {target}")

    sysb = scalar_system(-1.0)
    for order in (1, 2, 3):

        def march(n_steps, order=order, t_end=0.5):
            h = t_end / n_steps
            d = seeded_table(order, 1, lambda t: np.exp(-t), 0.0, h)
            for _ in range(n_steps):
                _, _, inc = bdf_step(sysb, d, h=h, order=order)
                advance_difference_table(d, order, inc)
            return abs(d[0, 0] - np.exp(-t_end))

        slope = np.log2(march(40) / march(80))
        if abs(slope - order) > 0.3:
            bad.append(f"bdf order {order}: slope {slope:.2f}")
    assert not bad, "\n".join(bad)


def test_06_cross_method_final_states(experiment):
    """Explicit and implicit runs land on the same final state."""
    bad = []
    for network in CROSS_NETWORKS:
        finals = {
            m: experiment(network, m).run.x[-1] for m in CROSS_METHODS
        }
        for i, ma in enumerate(CROSS_METHODS):
            for mb in CROSS_METHODS[i + 1 :]:
                xa, xb = finals[ma], finals[mb]
                rel = (
                    2.0 * np.linalg.norm(xa - xb)
                    / (np.linalg.norm(xa) + np.linalg.norm(xb))
                )
                if rel > 1e-4:
                    bad.append(f"{network} {ma} vs {mb}: rel = {rel:.3e}")
    assert not bad, "\n".join(bad)


def test_07_control_objectives(experiment):
    """Sharing and voltage residuals stay within 1e-3 in both windows."""
    bad = []
    for network in SMALL_NETWORKS:
        report = experiment(network, "rk45")
        for label, obj in report.objectives.items():
            if obj.sharing_max > 1e-3:
                bad.append(
                    f"{network} {label}: sharing {obj.sharing_max:.3e}"
                )
            if obj.voltage_max > 1e-3:
                bad.append(
                    f"{network} {label}: voltage {obj.voltage_max:.3e}"
                )
    assert not bad, "objective residuals above 1e-3:\n" + "\n".join(bad)


def test_08_conservation(experiment):
    """The weighted integrator-state sum is constant on every trajectory."""
    runs = [(n, m) for n in CROSS_NETWORKS for m in CROSS_METHODS]
    runs += [(n, "rk45") for n in SMALL_NETWORKS]
    bad = []
    for network, method in sorted(set(runs)):
        report = experiment(network, method)
        scn = report.scenario
        n, m = scn.n, scn.m
        theta = report.run.x[:, 2 * n + m : 3 * n + m]
        s = theta @ scn.t_theta
        drift = np.abs(s - s[0]).max()
        if drift > 1e-8:
            bad.append(f"{network} {method}: drift {drift:.3e}")
    assert not bad, "\n".join(bad)


def test_09_scaling_shape():
    """Wall time grows about linearly with dimension for the explicit
    methods, and the implicit collocation method wins at desk scale."""
    networks = scaling_names()
    explicit = run_scaling(
        networks, methods=("rk23", "rk45", "dop853"), repetitions=3
    )
    small = [n for n in networks if CATALOG[n].dimension <= DESK_LIMIT]
    radau = run_scaling(small, methods=("radau",), repetitions=3)

    bad = []
    for method in ("rk23", "rk45", "dop853"):
        rows = method_rows(explicit, method)
        slope = loglog_slope(
            [r["dimension"] for r in rows],
            [r["wall_ms_median"] for r in rows],
        )
        if not 0.7 <= slope <= 1.3:
            bad.append(f"{method}: log-log slope {slope:.3f} outside [0.7, 1.3]")

    dop = {r["network"]: r["wall_ms_median"] for r in method_rows(explicit, "dop853")}
    for row in radau:
        if row["wall_ms_median"] > dop[row["network"]]:
            bad.append(
                f"{row['network']}: radau {row['wall_ms_median']:.1f} ms "
                f"> dop853 {dop[row['network']]:.1f} ms"
            )
    assert not bad, "\n".join(bad)


def test_10_event_discontinuity(experiment):
    """Keeping solver history across the load step hurts the multistep
    method; restarting lets every method finish."""
    cont = experiment("case9", "bdf", event_mode="continuous")
    tr_t = cont.run.trace_t
    rejected = ~cont.run.trace_accepted
    at_step = (rejected & (tr_t > 1.5) & (tr_t < 1.6)).sum()
    quiet = (rejected & (tr_t > 1.0) & (tr_t < 1.1)).sum()
    assert at_step > quiet, (
        f"rejections at the load step ({at_step}) not above the quiet "
        f"window ({quiet})"
    )

    for method in ("rk23", "rk45", "dop853", "radau", "bdf"):
        report = experiment("case9", method)
        assert report.t[-1] == 5.0, f"{method} did not reach t = 5"
