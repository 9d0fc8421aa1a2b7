"""Exporter command line: single-manifold export and batch census runs."""

import argparse
import json
import sys
from pathlib import Path

from .export import ExportRequest, export_datum, batch_census, ExportError


def main(argv=None):
    ap = argparse.ArgumentParser(prog="nzexport",
                                 description="Export Neumann-Zagier data as JSON")
    sub = ap.add_subparsers(dest="cmd", required=True)
    one = sub.add_parser("datum", help="export a single manifold")
    one.add_argument("name")
    one.add_argument("--variant", default="default",
                     choices=["default", "canonical"])
    one.add_argument("--precision", type=int, default=60)
    one.add_argument("--out", default=None)
    batch = sub.add_parser("census", help="batch export census knots")
    batch.add_argument("out_dir")
    batch.add_argument("--limit", type=int, default=0)
    batch.add_argument("--precision", type=int, default=60)
    args = ap.parse_args(argv)
    if args.cmd == "datum":
        try:
            obj = export_datum(ExportRequest(args.name, args.variant,
                                             args.precision))
        except ExportError as exc:
            print("error: %s" % exc, file=sys.stderr)
            return 2
        text = json.dumps(obj, indent=1)
        if args.out:
            Path(args.out).write_text(text)
        else:
            print(text)
        return 0
    manifest = batch_census(args.out_dir, limit=args.limit,
                            precision=args.precision)
    print(json.dumps({"exported": sum(1 for e in manifest if e.get("ok")),
                      "total": len(manifest)}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
