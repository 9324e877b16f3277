"""Adapter extracting raw cases from the pandapower network catalog.

The catalog dependency is imported lazily so that everything else in
the package (transform, manifest, CLI parsing) works without it; only
actually loading a case requires pandapower to be installed.
"""

from __future__ import annotations

from .transform import RawCase

#: The 26 benchmark networks this exporter mirrors, in reference-table
#: order (small test feeders first, national-scale cases last).
CASE_NAMES: tuple[str, ...] = (
    "case4gs",
    "case5",
    "case6ww",
    "case9",
    "case14",
    "case24_ieee_rts",
    "case30",
    "case_ieee30",
    "case33bw",
    "case39",
    "case57",
    "case89pegase",
    "case118",
    "case145",
    "case_illinois200",
    "case300",
    "case1354pegase",
    "case1888rte",
    "gb_network",
    "case2848rte",
    "case2869pegase",
    "case3120sp",
    "case6470rte",
    "case6495rte",
    "case6515rte",
    "case9241pegase",
)

#: Reference (n, m, n_gen) per case, used to flag discrepancies in the
#: manifest rather than silently fixing them.
EXPECTED_COUNTS: dict[str, tuple[int, int, int]] = {
    "case4gs": (4, 4, 1),
    "case5": (5, 6, 3),
    "case6ww": (6, 11, 2),
    "case9": (9, 9, 2),
    "case14": (14, 20, 4),
    "case24_ieee_rts": (24, 38, 10),
    "case30": (30, 41, 5),
    "case_ieee30": (30, 41, 5),
    "case33bw": (33, 32, 0),
    "case39": (39, 46, 9),
    "case57": (57, 80, 6),
    "case89pegase": (89, 210, 11),
    "case118": (118, 186, 53),
    "case145": (145, 453, 49),
    "case_illinois200": (200, 245, 37),
    "case300": (300, 411, 68),
    "case1354pegase": (1354, 1991, 259),
    "case1888rte": (1888, 2531, 271),
    "gb_network": (2224, 3207, 393),
    "case2848rte": (2848, 3776, 369),
    "case2869pegase": (2869, 4582, 509),
    "case3120sp": (3120, 3693, 247),
    "case6470rte": (6470, 9005, 452),
    "case6495rte": (6495, 9019, 487),
    "case6515rte": (6515, 9037, 492),
    "case9241pegase": (9241, 16049, 1444),
}

# Catalog constructors whose name differs from the case name.
_CATALOG_FUNCS = {"gb_network": "GBnetwork"}


class UnknownCaseError(ValueError):
    """Raised for a case name that is not in the catalog listing."""


class CatalogUnavailableError(RuntimeError):
    """Raised when the source catalog package cannot be imported."""


def _catalog_module():
    try:
        import pandapower.networks as networks
    except ImportError as exc:
        raise CatalogUnavailableError(
            "the pandapower network catalog is not installed, so no "
            "cases can be loaded; install the optional dependency "
            "(pip install 'gridcase-export[pandapower]') and rerun"
        ) from exc
    return networks


def load_raw_case(case_name: str) -> RawCase:
    """Load one catalog case into the neutral raw representation.

    Extraction rules: every bus is a node; lines, two-winding
    transformers, and closed bus-to-bus couplers each join two buses
    and become branch pairs (three-winding transformers join three
    buses and cannot be a single edge, so they are not extracted);
    generator flags come from the buses of controllable generating
    units — the slack machine is a boundary condition, not a
    controllable unit, and is not flagged.
    """
    if case_name not in CASE_NAMES:
        known = ", ".join(CASE_NAMES)
        raise UnknownCaseError(
            f"unknown case {case_name!r}; catalog cases are: {known}"
        )
    networks = _catalog_module()
    net = getattr(networks, _CATALOG_FUNCS.get(case_name, case_name))()
    buses = tuple(int(b) for b in net.bus.index)
    lines = tuple(
        (int(u), int(v))
        for u, v in zip(net.line["from_bus"], net.line["to_bus"])
    )
    transformers = tuple(
        (int(u), int(v))
        for u, v in zip(net.trafo["hv_bus"], net.trafo["lv_bus"])
    )
    couplers = net.switch[(net.switch["et"] == "b") & net.switch["closed"]]
    switches = tuple(
        (int(u), int(v))
        for u, v in zip(couplers["bus"], couplers["element"])
    )
    generators = tuple(int(b) for b in net.gen["bus"])
    return RawCase(
        name=case_name,
        buses=buses,
        line_pairs=lines,
        transformer_pairs=transformers,
        switch_pairs=switches,
        generator_buses=generators,
    )
