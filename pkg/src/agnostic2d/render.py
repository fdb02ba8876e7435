"""Static SVG rendering of a labelled sample and a hypothesis polygon."""
from __future__ import annotations

from xml.sax.saxutils import quoteattr

import numpy as np

from .disc import LabeledPointSet


def render_svg(S: LabeledPointSet, polygon: np.ndarray | None, size: int = 600, margin: int = 20,
               title: str | None = None) -> str:
    """SVG text: one ``circle`` per example (positive blue, negative orange) and
    one ``polygon`` for the hypothesis (omitted when it is constant 0).

    Data coordinates are taken in the unit square with the y axis pointing up.
    """
    span = size - 2 * margin

    def tx(x):
        return margin + span * float(x)

    def ty(y):
        return margin + span * (1.0 - float(y))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">']
    if title:
        out.append(f"<title>{_text(title)}</title>")
    out.append(f'<rect x="{margin}" y="{margin}" width="{span}" height="{span}" fill="none" stroke="#999"/>')
    for (x, y), lab in zip(S.points, S.labels):
        color = "#1f77b4" if lab else "#ff7f0e"
        out.append(f'<circle cx="{tx(x):.2f}" cy="{ty(y):.2f}" r="1.6" fill="{color}"/>')
    if polygon is not None and len(polygon):
        pts = " ".join(f"{tx(x):.2f},{ty(y):.2f}" for x, y in np.asarray(polygon))
        out.append(f'<polygon points={quoteattr(pts)} fill="#2ca02c" fill-opacity="0.15" '
                   f'stroke="#2ca02c" stroke-width="1.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _text(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
