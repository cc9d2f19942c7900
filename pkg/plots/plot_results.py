"""Batch renderer for the simulator's CSV sweeps.

Reads a results CSV (self-describing rows from the experiment CLI), groups
rows by scheme/codebook, and draws one marker-line per group with error bars
wherever a confidence half-width is present.  Inputs are never modified and
the plotted points are exactly the CSV values.

Usage:
    python plot_results.py --csv fig2.csv --spec specs/fig2.json --out fig2.svg
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

STYLE_FILE = Path(__file__).resolve().parent / "style.mplstyle"
_MARKERS = ("o", "s", "^", "v", "D", "P", "*", "X")


@dataclass(frozen=True)
class FigureSpec:
    """What to plot: input CSV, the x column, grouping columns and labels."""

    csv_path: Path
    x: str
    out_path: Path
    group_by: tuple[str, ...] = ("scheme", "codebook")
    y: str = "sum_rate"
    error: str = "half_width"
    xlabel: str = ""
    ylabel: str = "sum rate (b/s/Hz)"
    title: str = ""


def load_spec(spec_path: Path, csv_path: Path, out_path: Path) -> FigureSpec:
    """Combine a JSON spec file with the CLI-provided input/output paths."""
    with open(spec_path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    known = {"x", "group_by", "y", "error", "xlabel", "ylabel", "title"}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown spec keys: {sorted(unknown)}")
    if "x" not in raw:
        raise ValueError("spec must name the x-axis column")
    if "group_by" in raw:
        raw["group_by"] = tuple(raw["group_by"])
    return FigureSpec(csv_path=csv_path, out_path=out_path, **raw)


def _read_rows(spec: FigureSpec) -> list[dict]:
    with open(spec.csv_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        needed = [spec.x, spec.y, *spec.group_by]
        missing = [c for c in needed if c not in header]
        if missing:
            raise ValueError(
                f"{spec.csv_path}: missing columns {missing}; header has {header}"
            )
        rows = list(reader)
    if not rows:
        raise ValueError(f"{spec.csv_path}: no data rows")
    return rows


def render(spec: FigureSpec):
    """Draw the figure and write it to ``spec.out_path``; returns the figure."""
    rows = _read_rows(spec)
    has_error = all(spec.error in row for row in rows)
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault(tuple(row[c] for c in spec.group_by), []).append(row)

    plt.style.use(STYLE_FILE)
    fig, ax = plt.subplots()
    for pos, (key, members) in enumerate(groups.items()):
        members = sorted(members, key=lambda r: float(r[spec.x]))
        xs = [float(r[spec.x]) for r in members]
        ys = [float(r[spec.y]) for r in members]
        label = ", ".join(str(k) for k in key if str(k) not in ("", "none"))
        marker = _MARKERS[pos % len(_MARKERS)]
        if has_error:
            errs = [float(r[spec.error]) for r in members]
            ax.errorbar(xs, ys, yerr=errs, marker=marker, capsize=3, label=label or "all")
        else:
            ax.plot(xs, ys, marker=marker, label=label or "all")
    ax.set_xlabel(spec.xlabel or spec.x)
    ax.set_ylabel(spec.ylabel)
    if spec.title:
        ax.set_title(spec.title)
    ax.legend()
    fig.savefig(spec.out_path)
    return fig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="render experiment CSVs to figures")
    parser.add_argument("--csv", type=Path, required=True, help="input results CSV")
    parser.add_argument("--spec", type=Path, required=True, help="JSON figure spec")
    parser.add_argument("--out", type=Path, required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        spec = load_spec(args.spec, args.csv, args.out)
        fig = render(spec)
        plt.close(fig)
    except (ValueError, OSError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
