"""Render sweep CSVs into figures: per-strategy lines, a beta comparison,
or an (r, kappa) heatmap.

Reads only the documented sweep schema
(``r,kappa,beta,freq_RR,freq_RS,freq_O,freq_M,residual``) plus the
optional ``*.meta.json`` sidecar for threshold annotations. Rendering
never transforms the numbers: the value table handed to matplotlib is
exactly what ``load_table`` parsed from the file, and every render
function returns it so callers can verify the round trip.

Output is SVG by default (PNG via the file suffix); embedded timestamps
are disabled and the SVG id salt is pinned, so identical inputs produce
identical bytes.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

COLUMNS = ("r", "kappa", "beta", "freq_RR", "freq_RS", "freq_O", "freq_M",
           "residual")
STRATEGIES = ("RR", "RS", "O", "M")
STRATEGY_COLORS = {"RR": "tab:green", "RS": "tab:cyan",
                   "O": "tab:orange", "M": "tab:red"}
KINDS = ("lines", "multi-beta-lines", "heatmap")

matplotlib.rcParams["svg.hashsalt"] = "render-figures"


class CsvFormatError(ValueError):
    """The input file does not follow the documented sweep schema."""


class IncompleteGridError(ValueError):
    """A heatmap input does not cover the full cartesian (r, kappa) grid."""


@dataclass(frozen=True)
class SweepData:
    """Parsed sweep rows, column-major, values exactly as in the file."""

    path: str
    columns: dict[str, list[float]]

    def __len__(self) -> int:
        return len(self.columns["r"])

    def distinct(self, name: str) -> list[float]:
        return sorted(set(self.columns[name]))


@dataclass(frozen=True)
class FigureSpec:
    """One rendering job: input table, figure kind, output image."""

    csv_path: Path
    kind: str
    out_path: Path
    strategies: tuple[str, ...] = STRATEGIES
    title: str | None = None
    meta_path: Path | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.strategies:
            raise ValueError("strategy subset must be non-empty")
        unknown = [s for s in self.strategies if s not in STRATEGIES]
        if unknown:
            raise ValueError(f"unknown strategies {unknown}; expected {STRATEGIES}")

    def default_meta_path(self) -> Path:
        return Path(str(self.csv_path)[: -len(".csv")] + ".meta.json") \
            if str(self.csv_path).endswith(".csv") else \
            Path(str(self.csv_path) + ".meta.json")


def load_table(path) -> SweepData:
    """Parse a sweep CSV, enforcing the documented header and numeric rows."""
    columns: dict[str, list[float]] = {name: [] for name in COLUMNS}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: file is empty") from None
        if tuple(header) != COLUMNS:
            raise CsvFormatError(
                f"{path}: header {header} does not match {','.join(COLUMNS)}")
        for number, row in enumerate(reader, start=2):
            if len(row) != len(COLUMNS):
                raise CsvFormatError(
                    f"{path}: row {number} has {len(row)} fields, expected "
                    f"{len(COLUMNS)}")
            try:
                values = [float(v) for v in row]
            except ValueError as exc:
                raise CsvFormatError(f"{path}: row {number}: {exc}") from None
            for name, value in zip(COLUMNS, values):
                columns[name].append(value)
    if not columns["r"]:
        raise CsvFormatError(f"{path}: no data rows")
    return SweepData(str(path), columns)


def _load_thresholds(spec: FigureSpec) -> list[dict]:
    meta_path = spec.meta_path or spec.default_meta_path()
    try:
        with open(meta_path, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return []
    thresholds = meta.get("thresholds", [])
    return [t for t in thresholds if isinstance(t, dict) and "coordinate" in t]


def _save(fig, spec: FigureSpec) -> None:
    spec.out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.out_path, metadata={"Date": None})
    plt.close(fig)


def render_lines(spec: FigureSpec) -> SweepData:
    """One frequency line per strategy against the reward axis.

    Expects a single-beta table. Draws a vertical threshold annotation for
    every threshold recorded in the metadata sidecar, when one exists.
    """
    data = load_table(spec.csv_path)
    betas = data.distinct("beta")
    if len(betas) > 1:
        raise CsvFormatError(
            f"{spec.csv_path}: {len(betas)} beta values; use kind "
            f"'multi-beta-lines' for beta comparisons")
    x = data.columns["r"]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    marker = "o" if len(data) == 1 else None
    for strategy in STRATEGIES:
        if strategy not in spec.strategies:
            continue
        ax.plot(x, data.columns[f"freq_{strategy}"], label=strategy,
                color=STRATEGY_COLORS[strategy], marker=marker)
    for found in _load_thresholds(spec):
        line = ax.axvline(found["coordinate"], color="gray", linestyle="--",
                          linewidth=1)
        line.set_gid(f"threshold-{found.get('strategy', '?')}-{found.get('level', '?')}")
    ax.set_xlabel("reflection reward r")
    ax.set_ylabel("stationary frequency")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    if spec.title:
        ax.set_title(spec.title)
    _save(fig, spec)
    return data


def render_beta_comparison(spec: FigureSpec) -> SweepData:
    """Frequency of one strategy (default RR) vs reward, one line per beta."""
    data = load_table(spec.csv_path)
    strategy = spec.strategies[0]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    column = data.columns[f"freq_{strategy}"]
    for beta in data.distinct("beta"):
        pairs = [(x, y) for x, y, b in zip(data.columns["r"], column,
                                           data.columns["beta"]) if b == beta]
        ax.plot([p[0] for p in pairs], [p[1] for p in pairs],
                label=f"beta = {beta:g}")
    ax.set_xlabel("reflection reward r")
    ax.set_ylabel(f"stationary frequency of {strategy}")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    if spec.title:
        ax.set_title(spec.title)
    _save(fig, spec)
    return data


def render_heatmap(spec: FigureSpec) -> SweepData:
    """Frequency of one strategy (default RR) over the (r, kappa) grid.

    The table must cover the full cartesian product of its distinct r and
    kappa values; missing coordinates are reported explicitly.
    """
    data = load_table(spec.csv_path)
    r_values = data.distinct("r")
    k_values = data.distinct("kappa")
    strategy = spec.strategies[0]
    column = data.columns[f"freq_{strategy}"]
    cells: dict[tuple[float, float], float] = {}
    for r, k, f in zip(data.columns["r"], data.columns["kappa"], column):
        cells[(r, k)] = f
    missing = [(r, k) for r in r_values for k in k_values if (r, k) not in cells]
    if missing:
        shown = ", ".join(f"(r={r:g}, kappa={k:g})" for r, k in missing[:8])
        suffix = "" if len(missing) <= 8 else f" and {len(missing) - 8} more"
        raise IncompleteGridError(
            f"{spec.csv_path}: grid of {len(r_values)}x{len(k_values)} "
            f"coordinates is missing {len(missing)} cells: {shown}{suffix}")
    grid = [[cells[(r, k)] for r in r_values] for k in k_values]
    fig, ax = plt.subplots(figsize=(6.5, 5))
    mesh = ax.pcolormesh(r_values, k_values, grid, vmin=0.0, vmax=1.0,
                         shading="nearest", cmap="coolwarm")
    fig.colorbar(mesh, ax=ax, label=f"stationary frequency of {strategy}")
    ax.set_xlabel("reflection reward r")
    ax.set_ylabel("reflection effort kappa")
    if spec.title:
        ax.set_title(spec.title)
    _save(fig, spec)
    return data


RENDERERS = {
    "lines": render_lines,
    "multi-beta-lines": render_beta_comparison,
    "heatmap": render_heatmap,
}


def render(spec: FigureSpec) -> SweepData:
    return RENDERERS[spec.kind](spec)


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        description="Render sweep CSVs into SVG/PNG figures.")
    parser.add_argument("csv", nargs="+", type=Path, help="input sweep CSV(s)")
    parser.add_argument("--kind", choices=KINDS, required=True)
    parser.add_argument("--out", type=Path, required=True,
                        help="output image path (or directory for several inputs)")
    parser.add_argument("--strategies", default=",".join(STRATEGIES),
                        help="comma-separated strategy subset (default: all)")
    parser.add_argument("--title", default=None)
    parser.add_argument("--meta", type=Path, default=None,
                        help="metadata sidecar (default: <input>.meta.json)")
    args = parser.parse_args(argv)

    strategies = tuple(s for s in args.strategies.split(",") if s)
    if len(args.csv) > 1 and args.out.suffix:
        parser.error("--out must be a directory when rendering several inputs")
    for csv_path in args.csv:
        if args.out.suffix:
            out_path = args.out
        else:
            out_path = args.out / (csv_path.stem + ".svg")
        try:
            spec = FigureSpec(csv_path=csv_path, kind=args.kind,
                              out_path=out_path, strategies=strategies,
                              title=args.title, meta_path=args.meta)
            render(spec)
        except (ValueError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(f"wrote {out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
