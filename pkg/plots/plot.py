#!/usr/bin/env python3
"""Render figures from simulator CSV outputs.

Reads the sweep results (or coupling curve) written by the `arraymc`
CLI and produces a static image: SER vs element separation, SER vs
antenna count, SER vs azimuth, or the normalized mutual-resistance
curve.

    plot.py results.csv --kind azimuth -o fig.png
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd

SERIES_ORDER = ["NC-M", "C-M", "NC-MM", "C-MM", "NC-U", "C-U"]

STYLES = {
    "NC-M": dict(color="tab:blue", linestyle="-", marker="o"),
    "C-M": dict(color="tab:blue", linestyle="-", marker="s"),
    "NC-MM": dict(color="tab:orange", linestyle="--", marker="o"),
    "C-MM": dict(color="tab:orange", linestyle="--", marker="s"),
    "NC-U": dict(color="tab:green", linestyle=":", marker="o"),
    "C-U": dict(color="tab:green", linestyle=":", marker="s"),
}

SER_COLUMNS = [
    "sweep_var", "sweep_value", "detector", "mode",
    "ser", "errors", "trials", "ci95_lo", "ci95_hi",
]
COUPLING_COLUMNS = ["d_over_lambda", "re_coupling_normalized"]

X_LABELS = {
    "spacing": "element separation d (m)",
    "count": "number of antennas N",
    "azimuth": "azimuth (degrees from broadside)",
}

KINDS = ("spacing", "count", "azimuth", "coupling")


@dataclass(frozen=True)
class PlotSpec:
    csv_path: str
    kind: str
    output_path: str
    log_y: bool = True
    ci_bands: bool = False


class PlotError(ValueError):
    """Unusable input data; message names what is missing."""


def _load(spec: PlotSpec) -> pd.DataFrame:
    try:
        frame = pd.read_csv(spec.csv_path)
    except pd.errors.EmptyDataError:
        raise PlotError(f"{spec.csv_path}: empty CSV, nothing to plot") from None
    required = COUPLING_COLUMNS if spec.kind == "coupling" else SER_COLUMNS
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise PlotError(f"{spec.csv_path}: missing columns: {', '.join(missing)}")
    if len(frame) == 0:
        raise PlotError(f"{spec.csv_path}: no data rows")
    return frame


def _render_coupling(frame: pd.DataFrame, ax) -> None:
    data = frame.sort_values("d_over_lambda")
    ax.plot(data["d_over_lambda"], data["re_coupling_normalized"], color="tab:blue")
    ax.axhline(0.0, color="black", linewidth=0.6)
    ax.set_xlabel("element separation d/λ")
    ax.set_ylabel("normalized mutual resistance")
    ax.grid(True, alpha=0.3)


def _render_ser(frame: pd.DataFrame, spec: PlotSpec, ax) -> None:
    frame = frame.assign(label=frame["detector"].str.strip() + "-" + frame["mode"].str.strip())
    labels = [lbl for lbl in SERIES_ORDER if lbl in set(frame["label"])]
    extra = sorted(set(frame["label"]) - set(SERIES_ORDER))
    for label in labels + extra:
        series = frame[frame["label"] == label].sort_values("sweep_value")
        style = STYLES.get(label, {})
        ax.plot(series["sweep_value"], series["ser"], label=label, markersize=4, **style)
        if spec.ci_bands:
            ax.fill_between(
                series["sweep_value"], series["ci95_lo"], series["ci95_hi"],
                alpha=0.15, color=style.get("color"),
            )
    if spec.log_y:
        ax.set_yscale("log")
    if spec.kind == "count":
        ax.set_xscale("log", base=2)
    ax.set_xlabel(X_LABELS[spec.kind])
    ax.set_ylabel("SER")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(ncol=2)


def render(spec: PlotSpec):
    """Build the figure for a spec; pure function of the CSV contents."""
    if spec.kind not in KINDS:
        raise PlotError(f"unknown figure kind {spec.kind!r}; expected one of {KINDS}")
    frame = _load(spec)
    fig, ax = plt.subplots(figsize=(7.0, 4.0), layout="tight")
    if spec.kind == "coupling":
        _render_coupling(frame, ax)
    else:
        _render_ser(frame, spec, ax)
    return fig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv", help="results.csv or coupling.csv from the simulator CLI")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("-o", "--output", required=True, help="output image path (png/pdf)")
    parser.add_argument("--linear-y", action="store_true", help="linear SER axis instead of log")
    parser.add_argument("--ci", action="store_true", help="shade 95%% confidence bands")
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args(argv)
    spec = PlotSpec(args.csv, args.kind, args.output, log_y=not args.linear_y, ci_bands=args.ci)
    try:
        fig = render(spec)
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    fig.savefig(args.output, dpi=args.dpi)
    plt.close(fig)
    return 0


if __name__ == "__main__":
    sys.exit(main())
