#!/usr/bin/env python3
"""Generate the three standard figure datasets as csv/json/dat files.

Usage: python3 scripts/make_figures.py [--outdir OUT] [--format csv|json|dat]
"""

import argparse
from pathlib import Path

from memcost.sweeps import figure_table, write_table


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", type=Path, default=Path("figures"))
    ap.add_argument("--format", choices=("csv", "json", "dat"), default="csv")
    args = ap.parse_args()

    args.outdir.mkdir(parents=True, exist_ok=True)
    for fig in (1, 2, 3):
        table = figure_table(fig)
        path = str(args.outdir / f"fig{fig}.{args.format}")
        paths = write_table(table, args.format, path)
        for p in paths:
            print(f"wrote {p} ({len(table.rows)} rows)")


if __name__ == "__main__":
    main()
