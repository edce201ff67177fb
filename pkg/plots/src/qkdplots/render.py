"""Render the standard key-rate figures from hybridqkd CSV sweeps.

Pure post-processing: every number drawn comes from the input CSV rows;
the only transformations applied here are grouping, sorting and axis
scales.  Input files are the CLI's CSV format ('#' comments, one header
row, %.12g floats, 'inf' tokens).
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = [
    "FigureSpec",
    "MissingColumnError",
    "NoDataError",
    "build_figure",
    "render",
    "main",
]

FIGURE_IDS = ("fig2", "fig3a", "fig3b", "fig4", "fig5", "fig6")

REQUIRED_COLUMNS = {
    "fig2": ("tau", "n", "lambda"),
    "fig3a": ("eta", "tau", "rate"),
    "fig3b": ("eta", "tau", "rate"),
    "fig4": ("tau", "Q", "c_min", "c_max", "c_passive"),
    "fig5": ("loss_db", "Ed", "rate_ours", "rate_qi", "plob"),
    "fig6": ("loss_db", "N", "rate_hybrid", "rate_cv_upper"),
}


class MissingColumnError(ValueError):
    """An input CSV lacks a column the chosen figure needs."""


class NoDataError(ValueError):
    """No data rows were found in the input CSVs."""


@dataclass
class FigureSpec:
    figure_id: str
    inputs: list[str]
    output: str
    dpi: int = 150

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise ValueError(
                f"unknown figure {self.figure_id!r}; expected one of {FIGURE_IDS}"
            )
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


def _to_float(token: str) -> float:
    return math.inf if token == "inf" else float(token)


def read_rows(paths, required) -> list[dict]:
    """Rows from the CLI CSV format, '#' comments skipped, floats parsed."""
    rows: list[dict] = []
    for path in paths:
        with open(path, newline="", encoding="ascii") as fh:
            data_lines = [ln for ln in fh if not ln.startswith("#")]
        reader = csv.DictReader(data_lines)
        header = reader.fieldnames or []
        for col in required:
            if col not in header:
                raise MissingColumnError(
                    f"{path}: required column {col!r} not in header {header}"
                )
        for rec in reader:
            rows.append({k: _to_float(v) for k, v in rec.items()})
    if not rows:
        raise NoDataError(f"no data rows in {paths}")
    return rows


def _series(rows, group_col, x_col, y_col):
    """Sorted (x, y) arrays per distinct value of group_col."""
    keys = sorted({r[group_col] for r in rows})
    out = []
    for key in keys:
        pts = sorted(
            (r[x_col], r[y_col]) for r in rows if r[group_col] == key
        )
        out.append((key, [p[0] for p in pts], [p[1] for p in pts]))
    return out


def _finite(xs, ys):
    pairs = [(x, y) for x, y in zip(xs, ys) if math.isfinite(y)]
    return [p[0] for p in pairs], [p[1] for p in pairs]


def build_figure(spec: FigureSpec):
    """Build the matplotlib figure for spec; returns (fig, ax)."""
    rows = read_rows(spec.inputs, REQUIRED_COLUMNS[spec.figure_id])
    fig, ax = plt.subplots(figsize=(5.2, 3.6))

    if spec.figure_id == "fig2":
        for n, xs, ys in _series(rows, "n", "tau", "lambda"):
            ax.plot(xs, ys, label=f"n = {int(n)}")
        ax.set_xlabel(r"threshold $\tau$")
        ax.set_ylabel(r"$\lambda_n$")

    elif spec.figure_id == "fig3a":
        for eta, xs, ys in _series(rows, "eta", "tau", "rate"):
            ax.plot(xs, ys, label=rf"$\eta$ = {eta:g}")
        ax.set_xlabel(r"threshold $\tau$")
        ax.set_ylabel("key rate (bits/pulse)")

    elif spec.figure_id == "fig3b":
        for tau, xs, ys in _series(rows, "tau", "eta", "rate"):
            ax.plot(xs, ys, label=rf"$\tau$ = {tau:g}")
        ax.set_xlabel(r"transmissivity $\eta$")
        ax.set_ylabel("key rate (bits/pulse)")

    elif spec.figure_id == "fig4":
        shades = [0.30, 0.55, 0.75]
        taus = sorted({r["tau"] for r in rows})
        for i, tau in enumerate(taus):
            sub = sorted(
                (r["Q"], r["c_min"], r["c_max"], r["c_passive"])
                for r in rows
                if r["tau"] == tau
            )
            qs = [s[0] for s in sub]
            lo = [s[1] for s in sub]
            hi = [s[2] for s in sub]
            passive = [s[3] for s in sub]
            grey = str(shades[i % len(shades)])
            ax.fill_between(qs, lo, hi, color=grey, label=rf"$\tau$ = {tau:g}")
            ax.plot(qs, passive, color="tab:blue")
        ax.set_xlabel("gain $Q$")
        ax.set_ylabel("error parameter $c$")

    elif spec.figure_id == "fig5":
        for ed, xs, ys in _series(rows, "Ed", "loss_db", "rate_ours"):
            ax.plot(*_finite(xs, ys), linestyle="-", label=rf"$E_d$ = {ed:g}")
        for ed, xs, ys in _series(rows, "Ed", "loss_db", "rate_qi"):
            ax.plot(*_finite(xs, ys), linestyle=":", label=rf"$E_d$ = {ed:g} (virtual det.)")
        plob = _series(rows, "Ed", "loss_db", "plob")[0]
        ax.plot(*_finite(plob[1], plob[2]), color="black", label="PLOB")
        ax.set_yscale("log")
        ax.set_xlabel("loss (dB)")
        ax.set_ylabel("key rate (bits/pulse)")

    else:  # fig6
        for n, xs, ys in _series(rows, "N", "loss_db", "rate_hybrid"):
            ax.plot(*_finite(xs, ys), linestyle="-", label=f"N = {n:g}")
        for n, xs, ys in _series(rows, "N", "loss_db", "rate_cv_upper"):
            ax.plot(*_finite(xs, ys), linestyle="--", label=f"N = {n:g} (CV bound)")
        ax.set_yscale("log")
        ax.set_xlabel("loss (dB)")
        ax.set_ylabel("key rate (bits/pulse)")

    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig, ax


def render(spec: FigureSpec) -> str:
    """Draw the requested figure and write it to spec.output."""
    fig, _ = build_figure(spec)
    fig.savefig(spec.output, dpi=spec.dpi)
    plt.close(fig)
    return spec.output


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qkdplots", description="Render hybridqkd figures from sweep CSVs"
    )
    parser.add_argument("--figure", required=True, choices=FIGURE_IDS)
    parser.add_argument(
        "--in", dest="inputs", action="append", required=True,
        help="input CSV (repeatable)",
    )
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args(argv)
    try:
        render(FigureSpec(args.figure, args.inputs, args.out, dpi=args.dpi))
    except (MissingColumnError, NoDataError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
