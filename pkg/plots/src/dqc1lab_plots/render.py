"""Regenerate figures from dqc1lab CSV artifacts.

Two figure kinds are supported, matching the CSV schemas the dqc1lab CLI
documents:

* ``entropy_surface`` reads (alpha, t, delta_S_C) rows and draws the
  entropy-change surface over the (t, alpha) plane;
* ``work_bars`` reads (alpha, theta, work, probability) rows and draws one
  panel per polarization with probability bars on the {-2w, 0, +2w} support.

These scripts are presentation-only: every plotted number is taken verbatim
from the CSV (no recomputation beyond arranging values on axes), so a wrong
figure always indicts the CSV or the axis mapping, never hidden math.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

ENTROPY_COLUMNS = ("alpha", "t", "delta_S_C")
WORK_COLUMNS = ("alpha", "theta", "work", "probability")

FIGURE_KINDS = ("entropy_surface", "work_bars")


class SchemaError(ValueError):
    """The input CSV does not match the documented schema for the figure kind."""


@dataclass(frozen=True)
class FigureSpec:
    input_csv: str
    figure_kind: str
    output_image: str
    # work_bars only; None means one panel per alpha found in the CSV,
    # highest polarization first (the canonical sweep gives 1.0, 0.5, 0.0).
    panel_alphas: tuple[float, ...] | None = None


def read_rows(path: str, required: tuple[str, ...]) -> list[dict[str, float]]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        missing = [column for column in required if column not in fields]
        if missing:
            raise SchemaError(f"{path}: missing column {', '.join(missing)}")
        rows = [{column: float(row[column]) for column in required} for row in reader]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def entropy_surface_payload(rows: list[dict[str, float]]) -> dict:
    alphas = sorted({row["alpha"] for row in rows})
    ts = sorted({row["t"] for row in rows})
    lookup = {(row["alpha"], row["t"]): row["delta_S_C"] for row in rows}
    grid = []
    for alpha in alphas:
        line = []
        for t in ts:
            if (alpha, t) not in lookup:
                raise SchemaError(f"grid cell (alpha={alpha!r}, t={t!r}) missing from CSV")
            line.append(lookup[(alpha, t)])
        grid.append(line)
    return {"alphas": alphas, "ts": ts, "grid": grid}


def work_bars_payload(rows: list[dict[str, float]], panel_alphas) -> dict:
    by_alpha: dict[float, list[dict[str, float]]] = {}
    for row in rows:
        by_alpha.setdefault(row["alpha"], []).append(row)
    if panel_alphas is None:
        panels = sorted(by_alpha, reverse=True)
    else:
        panels = list(panel_alphas)
        absent = [alpha for alpha in panels if alpha not in by_alpha]
        if absent:
            raise SchemaError(
                f"alpha panel(s) {absent} not present in CSV (available: {sorted(by_alpha)})"
            )
    payload = {"panels": []}
    for alpha in panels:
        groups: dict[float, dict[float, float]] = {}
        for row in by_alpha[alpha]:
            groups.setdefault(row["theta"], {})[row["work"]] = row["probability"]
        thetas = sorted(groups)
        works = sorted({w for bars in groups.values() for w in bars})
        payload["panels"].append(
            {
                "alpha": alpha,
                "thetas": thetas,
                "works": works,
                "heights": {
                    w: [groups[theta].get(w, 0.0) for theta in thetas] for w in works
                },
            }
        )
    return payload


def build_figure(spec: FigureSpec):
    """Assemble the matplotlib figure; returns (figure, plotted payload)."""
    if spec.figure_kind == "entropy_surface":
        payload = entropy_surface_payload(read_rows(spec.input_csv, ENTROPY_COLUMNS))
        fig, ax = plt.subplots(figsize=(6, 4.5))
        mesh = ax.pcolormesh(
            payload["ts"], payload["alphas"], payload["grid"], shading="nearest"
        )
        fig.colorbar(mesh, ax=ax, label="entropy change (nats)")
        ax.set_xlabel("normalized real trace t")
        ax.set_ylabel("polarization alpha")
        ax.set_title("Logical-qubit entropy change")
        return fig, payload

    if spec.figure_kind == "work_bars":
        payload = work_bars_payload(
            read_rows(spec.input_csv, WORK_COLUMNS), spec.panel_alphas
        )
        panels = payload["panels"]
        fig, axes = plt.subplots(
            1, len(panels), figsize=(4 * len(panels), 3.5), squeeze=False
        )
        for ax, panel in zip(axes[0], panels):
            thetas, works = panel["thetas"], panel["works"]
            if len(thetas) == 1:
                span = max(abs(w) for w in works) or 1.0
                ax.bar(works, [panel["heights"][w][0] for w in works], width=0.35 * span)
                ax.set_xticks(works)
                ax.set_xlabel("work")
            else:
                step = min(b - a for a, b in zip(thetas, thetas[1:]))
                width = 0.8 * step / len(works)
                for k, w in enumerate(works):
                    offsets = [theta + (k - (len(works) - 1) / 2) * width for theta in thetas]
                    ax.bar(offsets, panel["heights"][w], width=width, label=f"W = {w:g}")
                ax.legend(fontsize="small")
                ax.set_xlabel("theta")
            ax.set_ylabel("probability")
            ax.set_ylim(0.0, 1.0)
            ax.set_title(f"alpha = {panel['alpha']:g}")
        fig.tight_layout()
        return fig, payload

    raise SchemaError(f"unknown figure kind {spec.figure_kind!r} (use one of {FIGURE_KINDS})")


def render(spec: FigureSpec) -> str:
    fig, _ = build_figure(spec)
    fig.savefig(spec.output_image, dpi=150)
    plt.close(fig)
    return spec.output_image


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dqc1lab-plot", description=__doc__)
    parser.add_argument("--input", required=True, help="CSV artifact from the dqc1lab CLI")
    parser.add_argument("--output", required=True, help="image file to write")
    parser.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    parser.add_argument(
        "--alphas",
        help="comma-separated alpha panels for work_bars (default: all in the CSV)",
    )
    args = parser.parse_args(argv)
    panel_alphas = None
    if args.alphas:
        panel_alphas = tuple(float(tok) for tok in args.alphas.split(",") if tok.strip())
    spec = FigureSpec(
        input_csv=args.input,
        figure_kind=args.kind,
        output_image=args.output,
        panel_alphas=panel_alphas,
    )
    try:
        render(spec)
    except (SchemaError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
