"""Pure transform from raw catalog cases to neutral topology JSON.

The emitted schema is the one the simulator's graph layer consumes::

    {"name": str, "n": int, "edges": [[i, j], ...], "generators": [int, ...]}

with 1-based node indices and every edge oriented so that ``i > j``.
Everything in this module is a pure function of its inputs; the catalog
adapter is the only part of the package that touches external data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass


@dataclass(frozen=True)
class RawCase:
    """A benchmark case as extracted from the source catalog.

    ``buses`` holds the original (possibly non-contiguous) bus labels.
    Branch pairs reference those labels.  ``switch_pairs`` carries only
    bus-to-bus couplers; element switches (bus-to-line, bus-to-trafo)
    do not join two buses and are never extracted.
    """

    name: str
    buses: tuple[int, ...]
    line_pairs: tuple[tuple[int, int], ...] = ()
    transformer_pairs: tuple[tuple[int, int], ...] = ()
    switch_pairs: tuple[tuple[int, int], ...] = ()
    generator_buses: tuple[int, ...] = ()


@dataclass(frozen=True)
class TransformResult:
    """A transformed case plus the bookkeeping the manifest reports.

    ``m_line_only`` counts the distinct node pairs joined by lines
    alone, against ``m`` which also includes transformers and bus
    couplers; the two counts let the emitted edge totals be reconciled
    against reference tables that do not say which branch types they
    counted.  ``merged_edges`` is the number of parallel branches
    collapsed into an already-seen node pair.
    """

    topology: dict
    n: int
    m: int
    n_gen: int
    m_line_only: int
    merged_edges: int


class TransformError(ValueError):
    """Raised when a raw case cannot be represented in the edge schema."""


def _index_map(raw: RawCase) -> dict[int, int]:
    if not raw.name or not isinstance(raw.name, str):
        raise TransformError("case name must be a non-empty string")
    if not raw.buses:
        raise TransformError(f"case {raw.name!r} has no buses")
    if len(set(raw.buses)) != len(raw.buses):
        raise TransformError(f"case {raw.name!r} has duplicate bus labels")
    return {label: i + 1 for i, label in enumerate(sorted(raw.buses))}


def transform_case(raw: RawCase) -> TransformResult:
    """Relabel, orient, and deduplicate a raw case into topology JSON.

    Buses are renumbered 1..n by ascending original label.  Every
    branch becomes the node pair (i, j) with i > j; parallel branches
    between the same pair collapse to one edge.  Generator flags come
    from ``generator_buses``, deduplicated and sorted.
    """
    index = _index_map(raw)
    seen: set[tuple[int, int]] = set()
    line_pairs: set[tuple[int, int]] = set()
    merged = 0
    for kind, pairs in (
        ("line", raw.line_pairs),
        ("transformer", raw.transformer_pairs),
        ("switch", raw.switch_pairs),
    ):
        for u, v in pairs:
            for label in (u, v):
                if label not in index:
                    raise TransformError(
                        f"{kind} endpoint {label} of case {raw.name!r} "
                        "is not a bus"
                    )
            if u == v:
                raise TransformError(
                    f"{kind} joining bus {u} to itself in case "
                    f"{raw.name!r} cannot be represented as an edge"
                )
            a, b = index[u], index[v]
            key = (a, b) if a > b else (b, a)
            if key in seen:
                merged += 1
            else:
                seen.add(key)
            if kind == "line":
                line_pairs.add(key)
    generators = sorted({index.get(g, 0) for g in raw.generator_buses})
    if generators and generators[0] == 0:
        missing = sorted(g for g in raw.generator_buses if g not in index)
        raise TransformError(
            f"generator buses {missing} of case {raw.name!r} are not buses"
        )
    edges = sorted(seen)
    topology = {
        "name": raw.name,
        "n": len(raw.buses),
        "edges": [[i, j] for i, j in edges],
        "generators": generators,
    }
    return TransformResult(
        topology=topology,
        n=len(raw.buses),
        m=len(edges),
        n_gen=len(generators),
        m_line_only=len(line_pairs),
        merged_edges=merged,
    )


def topology_json_bytes(topology: dict) -> bytes:
    """Serialize a topology dict to the exact bytes written to disk.

    The serialization is deterministic (fixed field order, two-space
    indent, trailing newline) so repeated exports of the same case
    produce identical checksums.
    """
    return json.dumps(topology, indent=2).encode("utf-8") + b"\n"
