"""Hand-rolled SVG charts from the sweep/experiment CSVs.

Plots are rebuilt purely from CSV files (never from in-memory sweep state) so
they can be regenerated and tested in isolation. Output is plain-text SVG with
no external renderer.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

from .errors import EmptyCsv, MissingColumn

WIDTH, HEIGHT = 640, 420
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 30, 40, 60
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def read_csv(path: Path, required: list[str]) -> list[dict]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in required:
            if column not in header:
                raise MissingColumn(column, str(path))
        rows = list(reader)
    if not rows:
        raise EmptyCsv(f"{path} has no data rows")
    return rows


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _svg(elements: list[str], title: str) -> str:
    body = "\n".join(elements)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">\n'
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>\n'
        f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="15">{_esc(title)}</text>\n'
        f"{body}\n</svg>\n"
    )


def _frame(x_label: str, y_label: str) -> list[str]:
    x0, y0 = MARGIN_LEFT, HEIGHT - MARGIN_BOTTOM
    x1, y1 = WIDTH - MARGIN_RIGHT, MARGIN_TOP
    return [
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
        f'<text x="{(x0 + x1) / 2}" y="{HEIGHT - 14}" text-anchor="middle">{_esc(x_label)}</text>',
        f'<text x="18" y="{(y0 + y1) / 2}" text-anchor="middle" '
        f'transform="rotate(-90 18 {(y0 + y1) / 2})">{_esc(y_label)}</text>',
    ]


def _x_map(value: float, lo: float, hi: float) -> float:
    span = hi - lo if hi > lo else 1.0
    frac = (value - lo) / span
    return MARGIN_LEFT + frac * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)


def _y_map(value: float, lo: float, hi: float) -> float:
    span = hi - lo if hi > lo else 1.0
    frac = (value - lo) / span
    return (HEIGHT - MARGIN_BOTTOM) - frac * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)


def fidelity_plot(summary_rows: list[dict], family: str) -> str:
    """Mean fidelity vs N (log2 x-axis), one polyline per method."""
    rows = [r for r in summary_rows if r["family"] == family and r["fidelity_mean"]]
    if not rows:
        raise EmptyCsv(f"no summary rows with fidelity for family '{family}'")
    sizes = sorted({int(r["N"]) for r in rows})
    xs = [math.log2(n) for n in sizes]
    x_lo, x_hi = min(xs), max(xs)
    y_lo = min(0.0, min(float(r["fidelity_mean"]) for r in rows))
    elements = _frame("system size N (log2 axis)", "mean fidelity")
    for n in sizes:
        x = _x_map(math.log2(n), x_lo, x_hi)
        elements.append(
            f'<line x1="{x:.1f}" y1="{HEIGHT - MARGIN_BOTTOM}" x2="{x:.1f}" '
            f'y2="{HEIGHT - MARGIN_BOTTOM + 5}" stroke="black"/>'
        )
        elements.append(
            f'<text x="{x:.1f}" y="{HEIGHT - MARGIN_BOTTOM + 18}" text-anchor="middle">{n}</text>'
        )
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        if tick < y_lo:
            continue
        y = _y_map(tick, y_lo, 1.0)
        elements.append(
            f'<line x1="{MARGIN_LEFT - 5}" y1="{y:.1f}" x2="{MARGIN_LEFT}" y2="{y:.1f}" stroke="black"/>'
        )
        elements.append(
            f'<text x="{MARGIN_LEFT - 9}" y="{y + 4:.1f}" text-anchor="end">{tick:g}</text>'
        )
    methods = sorted({r["method"] for r in rows})
    for idx, method in enumerate(methods):
        pts = sorted(
            ((int(r["N"]), float(r["fidelity_mean"])) for r in rows if r["method"] == method)
        )
        color = PALETTE[idx % len(PALETTE)]
        coords = " ".join(
            f"{_x_map(math.log2(n), x_lo, x_hi):.1f},{_y_map(f, y_lo, 1.0):.1f}" for n, f in pts
        )
        elements.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>'
        )
        for n, f in pts:
            elements.append(
                f'<circle cx="{_x_map(math.log2(n), x_lo, x_hi):.1f}" '
                f'cy="{_y_map(f, y_lo, 1.0):.1f}" r="3" fill="{color}"/>'
            )
        elements.append(
            f'<text x="{WIDTH - MARGIN_RIGHT - 8}" y="{MARGIN_TOP + 16 + 16 * idx}" '
            f'text-anchor="end" fill="{color}">{_esc(method)}</text>'
        )
    return _svg(elements, f"Mean fidelity vs system size ({family})")


def probability_bars(count_rows: list[dict]) -> str:
    """Two-bar chart of the average outcome probabilities."""
    n = len(count_rows)
    mean_p0 = sum(float(r["p_0"]) for r in count_rows) / n
    mean_p1 = sum(float(r["p_1"]) for r in count_rows) / n
    elements = _frame("measured outcome", "average probability")
    for tick in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
        y = _y_map(tick, 0.0, 1.0)
        elements.append(
            f'<line x1="{MARGIN_LEFT - 5}" y1="{y:.1f}" x2="{MARGIN_LEFT}" y2="{y:.1f}" stroke="black"/>'
        )
        elements.append(
            f'<text x="{MARGIN_LEFT - 9}" y="{y + 4:.1f}" text-anchor="end">{tick:g}</text>'
        )
    span = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    for idx, (label, p) in enumerate((("0", mean_p0), ("1", mean_p1))):
        cx = MARGIN_LEFT + span * (0.3 + 0.4 * idx)
        top = _y_map(p, 0.0, 1.0)
        bottom = HEIGHT - MARGIN_BOTTOM
        elements.append(
            f'<rect x="{cx - 45:.1f}" y="{top:.1f}" width="90" height="{bottom - top:.1f}" '
            f'fill="{PALETTE[idx]}" fill-opacity="0.8"/>'
        )
        elements.append(
            f'<text x="{cx:.1f}" y="{bottom + 18}" text-anchor="middle">|{label}&#x27E9;</text>'
        )
        elements.append(
            f'<text x="{cx:.1f}" y="{top - 6:.1f}" text-anchor="middle">{p:.4f}</text>'
        )
    return _svg(elements, "Average outcome probabilities")


def ratio_histogram(ratio_rows: list[dict], bins: int = 12) -> str:
    """Histogram of the per-run p(0)/p(1) ratios."""
    ratios = [float(r["ratio"]) for r in ratio_rows if math.isfinite(float(r["ratio"]))]
    if not ratios:
        raise EmptyCsv("no finite ratios to plot")
    lo, hi = min(ratios), max(ratios)
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    width = (hi - lo) / bins
    counts = [0] * bins
    for r in ratios:
        counts[min(int((r - lo) / width), bins - 1)] += 1
    top = max(counts)
    elements = _frame("ratio p(0)/p(1)", "runs")
    span = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    for i, c in enumerate(counts):
        x = MARGIN_LEFT + span * i / bins
        bar_w = span / bins - 2
        y = _y_map(c, 0.0, top)
        elements.append(
            f'<rect x="{x:.1f}" y="{y:.1f}" width="{bar_w:.1f}" '
            f'height="{HEIGHT - MARGIN_BOTTOM - y:.1f}" fill="{PALETTE[0]}" fill-opacity="0.8"/>'
        )
    for frac in (0.0, 0.5, 1.0):
        value = lo + frac * (hi - lo)
        x = MARGIN_LEFT + span * frac
        elements.append(
            f'<text x="{x:.1f}" y="{HEIGHT - MARGIN_BOTTOM + 18}" text-anchor="middle">{value:.2f}</text>'
        )
    elements.append(
        f'<text x="{MARGIN_LEFT - 9}" y="{_y_map(top, 0, top) + 4:.1f}" text-anchor="end">{top}</text>'
    )
    return _svg(elements, "Distribution of outcome-probability ratios")


def emit_plots(input_dir: str, output_dir: str | None = None) -> list[Path]:
    """Render every known CSV in input_dir to an SVG; returns written paths."""
    src = Path(input_dir)
    dst = Path(output_dir) if output_dir else src
    dst.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    summary = src / "summary.csv"
    if summary.exists():
        rows = read_csv(summary, ["family", "N", "method", "fidelity_mean"])
        for family in sorted({r["family"] for r in rows}):
            svg = fidelity_plot(rows, family)
            path = dst / f"fidelity_vs_size_{family}.svg"
            path.write_text(svg)
            written.append(path)

    counts = src / "eq3_counts.csv"
    if counts.exists():
        rows = read_csv(counts, ["run", "p_0", "p_1"])
        path = dst / "eq3_probabilities.svg"
        path.write_text(probability_bars(rows))
        written.append(path)

    ratios = src / "eq3_ratios.csv"
    if ratios.exists():
        rows = read_csv(ratios, ["run", "ratio"])
        path = dst / "eq3_ratio_histogram.svg"
        path.write_text(ratio_histogram(rows))
        written.append(path)

    if not written:
        raise FileNotFoundError(f"no plottable CSVs (summary/eq3) found in {src}")
    return written
