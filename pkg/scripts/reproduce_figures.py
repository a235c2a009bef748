#!/usr/bin/env python3
"""Run the three stock experiments (reward sweep, peer-sensitivity sweep,
design-space grid) with their default parameters.

Writes fig1/fig2/fig3 CSVs plus metadata sidecars and a manifest into the
chosen output directory. Render them afterwards with the plotting package:

    python plotting/render_figures.py out/fig1.csv --kind lines --out fig1.svg
"""
import argparse
import sys

from ainorms.cli import main as ainorms_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="out", help="output directory")
    args = parser.parse_args()
    for command in ("fig1", "fig2", "fig3"):
        code = ainorms_main([command, "--out-dir", args.out_dir])
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
