"""Materialize the scenario fixtures bundled with the package.

Every scenario the test suite integrates or assembles is committed to
disk so results cannot drift with the RNG stream of a future numpy.
The range covers the catalog up to and including case1354pegase, the
largest network the wall-time study touches.
"""

from pathlib import Path

from dcnetsim.harness.catalog import CATALOG, write_catalog_scenarios

OUT = Path(__file__).resolve().parents[1] / "src" / "dcnetsim" / "data" / "scenarios"

names = list(CATALOG)
names = names[: names.index("case1354pegase") + 1]

written = write_catalog_scenarios(OUT, names)
total = sum(p.stat().st_size for p in written)
print(f"wrote {len(written)} scenarios, {total / 1e6:.2f} MB")
for p in written:
    print(f"  {p.name:24s} {p.stat().st_size:9d} B")
