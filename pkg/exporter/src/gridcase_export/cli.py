"""Command-line entry point: export cases by name or the whole catalog."""

from __future__ import annotations

import argparse
import json
import sys

from .catalog import CatalogUnavailableError, UnknownCaseError
from .export import export_all, export_topology


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gridcase-export",
        description=(
            "Export published power-grid benchmark cases to neutral "
            "topology JSON files"
        ),
    )
    parser.add_argument("cases", nargs="*", help="case names to export")
    parser.add_argument(
        "--all",
        action="store_true",
        help="export the full catalog and write manifest.csv",
    )
    parser.add_argument(
        "--out", required=True, help="output directory for JSON files"
    )
    args = parser.parse_args(argv)
    if args.all == bool(args.cases):
        parser.error("pass either --all or one or more case names")

    try:
        if args.all:
            rows = export_all(args.out)
        else:
            rows = [export_topology(name, args.out) for name in args.cases]
    except (UnknownCaseError, CatalogUnavailableError) as exc:
        print(
            json.dumps({"error": type(exc).__name__, "detail": str(exc)}),
            file=sys.stderr,
        )
        return 1

    print(
        json.dumps(
            {
                "out": args.out,
                "exported": sum(row.ok for row in rows),
                "flagged": [
                    {"name": row.name, "status": row.status}
                    for row in rows
                    if not row.ok
                ],
            }
        )
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
