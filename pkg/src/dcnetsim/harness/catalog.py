"""Bundled benchmark catalog: 26 grid topologies and seeded scenarios.

Each entry mirrors one row of the published power-system test-case
catalog (node, edge, and generator counts plus the state dimension the
catalog lists).  The topology files live under ``dcnetsim/data`` and
load through :func:`catalog_topology`; scenario parameters are drawn
deterministically per network so every consumer sees the same system.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from dcnetsim.graphs import NetworkTopology, validate_topology
from dcnetsim.scenario import (
    Scenario,
    generate_parameters,
    load_scenario,
    save_scenario,
)

__all__ = [
    "CatalogEntry",
    "CATALOG",
    "catalog_topology",
    "catalog_scenario",
    "desk_scale_names",
    "scaling_names",
    "write_catalog_scenarios",
]


@dataclass(frozen=True)
class CatalogEntry:
    """One catalog row; ``stated_dimension`` is the published figure."""

    name: str
    n: int
    m: int
    n_gen: int
    stated_dimension: int
    seed: int

    @property
    def dimension(self) -> int:
        """State dimension 4n + m implied by the counts themselves."""
        return 4 * self.n + self.m


_ROWS = [
    # name, nodes, edges, generators, stated dimension
    ("case4gs", 4, 4, 1, 20),
    ("case5", 5, 6, 3, 26),
    ("case6ww", 6, 11, 2, 35),
    ("case9", 9, 9, 2, 45),
    ("case14", 14, 20, 4, 76),
    ("case24_ieee_rts", 24, 38, 10, 134),
    ("case30", 30, 41, 5, 161),
    ("case_ieee30", 30, 41, 5, 161),
    ("case33bw", 33, 32, 0, 164),
    ("case39", 39, 46, 9, 202),
    ("case57", 57, 80, 6, 308),
    ("case89pegase", 89, 210, 11, 596),
    ("case118", 118, 186, 53, 658),
    ("case145", 145, 453, 49, 1025),
    ("case_illinois200", 200, 245, 37, 1045),
    ("case300", 300, 411, 68, 1611),
    ("case1354pegase", 1354, 1991, 259, 7407),
    ("case1888rte", 1888, 2531, 271, 10083),
    ("gb_network", 2224, 3207, 393, 12103),
    ("case2848rte", 2848, 3776, 369, 15168),
    ("case2869pegase", 2869, 4582, 509, 16058),
    ("case3120sp", 3120, 3693, 247, 16173),
    ("case6470rte", 6470, 9005, 452, 34885),
    ("case6495rte", 6495, 9019, 487, 34999),
    ("case6515rte", 6515, 9037, 492, 35097),
    ("case9241pegase", 9241, 16049, 1444, 53013),
]

CATALOG: dict[str, CatalogEntry] = {
    name: CatalogEntry(name, n, m, n_gen, dim, seed=1000 + row)
    for row, (name, n, m, n_gen, dim) in enumerate(_ROWS)
}

DESK_SCALE_MAX_DIMENSION = 1611


def desk_scale_names() -> list[str]:
    """Networks small enough for routine runs (dimension <= 1611)."""
    return [
        e.name for e in CATALOG.values()
        if e.dimension <= DESK_SCALE_MAX_DIMENSION
    ]


def scaling_names() -> list[str]:
    """The wall-time study range: case14 through case1354pegase."""
    names = list(CATALOG)
    return names[names.index("case14") : names.index("case1354pegase") + 1]


def _topology_dir():
    return resources.files("dcnetsim") / "data" / "topologies"


@lru_cache(maxsize=None)
def catalog_topology(name: str) -> NetworkTopology:
    """Load one bundled topology by catalog name."""
    if name not in CATALOG:
        raise KeyError(
            f"unknown network {name!r}; catalog holds {sorted(CATALOG)}"
        )
    path = _topology_dir() / f"{name}.json"
    with path.open("r", encoding="utf-8") as fh:
        return validate_topology(json.load(fh))


@lru_cache(maxsize=8)
def catalog_scenario(name: str) -> Scenario:
    """Deterministic scenario for one catalog network.

    Names up to case1354pegase resolve to scenario files committed
    with the package, pinning every figure-producing run to on-disk
    data; the rest draw from the seeded generator on demand.
    """
    entry = CATALOG[name]
    bundled = resources.files("dcnetsim") / "data" / "scenarios" / f"{name}.json"
    if bundled.is_file():
        return load_scenario(bundled)
    return generate_parameters(catalog_topology(name), seed=entry.seed)


def write_catalog_scenarios(out_dir, names=None) -> list[Path]:
    """Materialize scenario JSON files, one per network, for the CLI."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name in names if names is not None else list(CATALOG):
        path = out / f"{name}.json"
        save_scenario(catalog_scenario(name), path)
        written.append(path)
    return written
