"""Exporter turning published grid benchmark cases into topology JSON.

The package splits into a pure transform core (usable and testable with
no external data), a lazy catalog adapter (the only part that needs
pandapower), and batch orchestration that records per-case manifests.
"""

from .catalog import (
    CASE_NAMES,
    EXPECTED_COUNTS,
    CatalogUnavailableError,
    UnknownCaseError,
    load_raw_case,
)
from .export import export_all, export_raw_case, export_topology
from .manifest import MANIFEST_COLUMNS, ExportManifest, write_manifest_csv
from .transform import (
    RawCase,
    TransformError,
    TransformResult,
    topology_json_bytes,
    transform_case,
)

__all__ = [
    "CASE_NAMES",
    "EXPECTED_COUNTS",
    "CatalogUnavailableError",
    "UnknownCaseError",
    "load_raw_case",
    "export_all",
    "export_raw_case",
    "export_topology",
    "MANIFEST_COLUMNS",
    "ExportManifest",
    "write_manifest_csv",
    "RawCase",
    "TransformError",
    "TransformResult",
    "topology_json_bytes",
    "transform_case",
]

__version__ = "0.1.0"
