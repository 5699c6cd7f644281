"""Deterministic CSV and SVG emission.

All floating-point output goes through one formatter, fixed at 17
significant digits, so identical (config, seed) reproduces identical bytes.
SVG plots are hand-written path elements: no plotting dependency, stable
output.
"""

from __future__ import annotations

import csv
import io
import os

import numpy as np

REPORT_HEADER = (
    "case_id", "command", "n", "p", "q", "B", "R",
    "extra", "bound", "observed", "min_margin", "pass",
)

LEDGER_HEADER = (
    "n", "p", "q", "B", "S", "R", "a", "C", "D", "k", "c",
    "lambda", "mu", "A", "theta", "Theta", "c_grad", "c_harnack",
)

FIELD_HEADER = ("r", "u", "s")


def fmt(value) -> str:
    """Fixed-width-free deterministic cell formatting: floats at 17 sig digits."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path: str, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(cell) for cell in row])
    _write_text(path, buf.getvalue())


def write_field_csv(path: str, field) -> None:
    """RadialField export: `#`-prefixed metadata lines, then r,u,s rows."""
    buf = io.StringIO()
    m = field.manifold
    buf.write(f"# manifold={m.kind} n={m.n} B={fmt(m.B)}\n")
    q = "" if field.q is None else fmt(field.q)
    buf.write(f"# exponents p={fmt(field.p)} q={q}\n")
    buf.write(f"# provenance={field.provenance}\n")
    status = field.status
    if field.blow_up_r is not None:
        status += f" at={fmt(field.blow_up_r)}"
    buf.write(f"# status={status}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FIELD_HEADER)
    for r, u, s in zip(field.r, field.u, field.s):
        writer.writerow([fmt(r), fmt(u), fmt(s)])
    _write_text(path, buf.getvalue())


def svg_line_plot(
    path: str,
    x,
    y,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    width: int = 640,
    height: int = 420,
    max_points: int = 1024,
) -> None:
    """Polyline plot with axes, written as raw SVG path elements."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size > max_points:
        idx = np.linspace(0, x.size - 1, max_points).astype(int)
        x, y = x[idx], y[idx]
    ml, mr, mt, mb = 70, 20, 34, 48  # margins
    iw, ih = width - ml - mr, height - mt - mb
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(y.min()), float(y.max())
    xs = iw / (x1 - x0) if x1 > x0 else 1.0
    ys = ih / (y1 - y0) if y1 > y0 else 1.0

    def px(v: float) -> str:
        return f"{ml + (v - x0) * xs:.2f}"

    def py(v: float) -> str:
        return f"{mt + ih - (v - y0) * ys:.2f}"

    pts = " ".join(f"{px(a)},{py(b)}" for a, b in zip(x, y))
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width // 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{ml}" y1="{mt + ih}" x2="{ml + iw}" y2="{mt + ih}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ih}" stroke="black"/>',
        f'<text x="{ml}" y="{height - 10}" font-size="11">{_label(x0)}</text>',
        f'<text x="{ml + iw}" y="{height - 10}" text-anchor="end" font-size="11">{_label(x1)}</text>',
        f'<text x="{ml - 6}" y="{mt + ih}" text-anchor="end" font-size="11">{_label(y0)}</text>',
        f'<text x="{ml - 6}" y="{mt + 10}" text-anchor="end" font-size="11">{_label(y1)}</text>',
        f'<text x="{width // 2}" y="{height - 10}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="16" y="{mt + ih // 2}" font-size="12" '
        f'transform="rotate(-90 16 {mt + ih // 2})" text-anchor="middle">{ylabel}</text>',
        f'<polyline points="{pts}" fill="none" stroke="#1f5fa8" stroke-width="1.2"/>',
        "</svg>",
    ]
    _write_text(path, "\n".join(lines) + "\n")


def _label(v: float) -> str:
    return f"{v:.6g}"


def _write_text(path: str, text: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
