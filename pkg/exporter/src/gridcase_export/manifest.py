"""Export manifests: per-case records and the batch CSV."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

#: Fixed column order of the batch manifest CSV.
MANIFEST_COLUMNS = ("name", "n", "m", "n_gen", "merged_edges", "status")


@dataclass(frozen=True)
class ExportManifest:
    """Record of one export attempt.

    For a successful export the counts match the emitted JSON and
    ``checksum`` is the SHA-256 of the file bytes.  For a failed case
    the count fields are ``None`` and ``status`` carries the error.
    ``m_line_only`` counts edges from lines alone (against ``m`` which
    includes transformers and couplers) so edge totals can be
    reconciled against reference tables.
    """

    name: str
    status: str
    n: Optional[int] = None
    m: Optional[int] = None
    n_gen: Optional[int] = None
    out_path: Optional[str] = None
    checksum: Optional[str] = None
    merged_edges: Optional[int] = None
    m_line_only: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.status.startswith("ok")


def write_manifest_csv(rows: Iterable[ExportManifest], path) -> Path:
    """Write the batch manifest; ``None`` fields become empty cells."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row.name,
                    "" if row.n is None else row.n,
                    "" if row.m is None else row.m,
                    "" if row.n_gen is None else row.n_gen,
                    "" if row.merged_edges is None else row.merged_edges,
                    row.status,
                ]
            )
    return path
