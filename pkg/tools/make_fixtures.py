"""Generate the bundled topology fixtures under src/dcnetsim/data.

Four small grids carry their real line topology; the remaining entries
are synthetic stand-ins built from a seeded random spanning tree plus
uniformly drawn extra edges, matching the cataloged node, edge, and
generator counts.  Re-running the script reproduces identical files.
"""

import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from dcnetsim.harness.catalog import CATALOG  # noqa: E402

OUT_DIR = Path(__file__).resolve().parents[1] / "src" / "dcnetsim" / "data" / "topologies"

# real line lists (1-based, oriented high-to-low) for the small grids
AUTHENTIC = {
    "case4gs": {
        "edges": [(2, 1), (3, 1), (4, 2), (4, 3)],
        "generators": [4],
    },
    "case9": {
        "edges": [
            (4, 1), (5, 4), (6, 5), (6, 3), (7, 6),
            (8, 7), (8, 2), (9, 8), (9, 4),
        ],
        "generators": [2, 3],
    },
    "case14": {
        "edges": [
            (2, 1), (5, 1), (3, 2), (4, 2), (5, 2),
            (4, 3), (5, 4), (7, 4), (9, 4), (6, 5),
            (11, 6), (12, 6), (13, 6), (8, 7), (9, 7),
            (10, 9), (14, 9), (11, 10), (13, 12), (14, 13),
        ],
        "generators": [2, 3, 6, 8],
    },
    "case33bw": {
        # radial feeder: trunk 1..18 with laterals at nodes 2, 3, and 6
        "edges": (
            [(k + 1, k) for k in range(1, 18)]
            + [(19, 2), (20, 19), (21, 20), (22, 21)]
            + [(23, 3), (24, 23), (25, 24)]
            + [(26, 6)] + [(k + 1, k) for k in range(26, 33)]
        ),
        "generators": [],
    },
}


def synthesize(entry, seed):
    """Connected graph with the requested counts: tree plus extras."""
    rng = np.random.default_rng(seed)
    n, m = entry.n, entry.m
    edges = set()
    for v in range(2, n + 1):
        parent = int(rng.integers(1, v))
        edges.add((v, parent))
    while len(edges) < m:
        i = int(rng.integers(2, n + 1))
        j = int(rng.integers(1, i))
        edges.add((i, j))
    gens = sorted(int(g) for g in rng.choice(
        np.arange(1, n + 1), size=entry.n_gen, replace=False))
    return sorted(edges), gens


def main():
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for row, entry in enumerate(CATALOG.values()):
        if entry.name in AUTHENTIC:
            spec = AUTHENTIC[entry.name]
            edges = [list(e) for e in spec["edges"]]
            gens = list(spec["generators"])
            source = "published line topology"
        else:
            edge_list, gens = synthesize(entry, seed=7700 + row)
            edges = [list(e) for e in edge_list]
            source = f"synthesized: seeded spanning tree plus extras (seed {7700 + row})"
        assert len(edges) == entry.m, entry.name
        assert len(gens) == entry.n_gen, entry.name
        obj = {
            "name": entry.name,
            "n": entry.n,
            "edges": edges,
            "generators": gens,
            "source": source,
        }
        path = OUT_DIR / f"{entry.name}.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=1)
            fh.write("\n")
        print(f"wrote {path.name}: n={entry.n} m={entry.m} gens={entry.n_gen}")


if __name__ == "__main__":
    main()
