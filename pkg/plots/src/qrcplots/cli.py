"""plots: render sweep CSVs into figure files.

Usage: plots --figure fig3 --in results.csv --out figs/
       plots --figure all --in results.csv --out figs/

Exit codes: 0 success, 1 no-data, 2 usage or schema error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FIGURES, NoDataError, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plots",
                                     description="figure rendering for sweep CSVs")
    parser.add_argument("--figure", required=True,
                        help="figure id (%s) or 'all'" % ", ".join(sorted(FIGURES)))
    parser.add_argument("--in", dest="csv_path", type=Path, required=True,
                        help="input CSV (results.csv; trace.csv for fig2; "
                             "rescaled table for fig8)")
    parser.add_argument("--out", type=Path, default=Path("figs"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.figure == "all":
        # Only the figures fed by the results schema; fig2 (trace) and fig8
        # (rescaled table) take different inputs and must be requested alone.
        ids = sorted(f for f, spec in FIGURES.items() if spec.source == "results")
    elif args.figure in FIGURES:
        ids = [args.figure]
    else:
        print(f"error: unknown figure {args.figure!r}", file=sys.stderr)
        return 2
    if not args.csv_path.exists():
        print(f"error: no such file {args.csv_path}", file=sys.stderr)
        return 2
    wrote = []
    for fig_id in ids:
        try:
            wrote += render(fig_id, args.csv_path, args.out)
        except SchemaError as exc:
            print(f"schema error: {exc}", file=sys.stderr)
            return 2
        except NoDataError as exc:
            if args.figure == "all":
                continue  # a combined run skips figures the CSV cannot feed
            print(f"no data: {exc}", file=sys.stderr)
            return 1
    if not wrote:
        print("no data: no figure could be rendered from this CSV", file=sys.stderr)
        return 1
    for path in wrote:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
