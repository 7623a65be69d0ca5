"""SVG ellipse plots of 2D embeddings: one mean +/- std ellipse per set."""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .gaussian import DiagGaussian

__all__ = ["render_svg", "PALETTE"]

# display colors of the bundled families, in set order
PALETTE = ("orange", "lightcoral", "seagreen", "cornflowerblue", "silver", "darkviolet", "tomato")


def _num(x: float) -> str:
    s = format(float(x), ".12g")
    return "0" if s == "-0" else s


def render_svg(
    embeddings: Sequence[DiagGaussian],
    labels: Sequence[str],
    colors: Sequence[str | None] | None = None,
    width: int = 480,
) -> str:
    """Axis-aligned ellipses centered at the means with semi-axes sigma.

    Coordinates are in data units with the y axis pointing up; the viewBox
    covers every ellipse plus a 10% margin on each side.
    """
    if len(embeddings) != len(labels):
        raise ValueError("need one label per embedding")
    if any(g.dim != 2 for g in embeddings):
        raise ValueError("render_svg draws 2D embeddings only; project to two axes first")
    colors = list(colors) if colors is not None else [None] * len(embeddings)
    colors = [c or PALETTE[k % len(PALETTE)] for k, c in enumerate(colors)]

    if embeddings:
        mean = np.array([g.mean for g in embeddings])
        sig = np.array([g.sigma for g in embeddings])
        lo, hi = (mean - sig).min(axis=0), (mean + sig).max(axis=0)
    else:
        lo, hi = np.array([-1.0, -1.0]), np.array([1.0, 1.0])
    span = hi - lo
    lo = lo - 0.1 * span
    hi = hi + 0.1 * span
    span = hi - lo
    x0, y0 = lo[0], -hi[1]
    height = max(1, int(round(width * span[1] / span[0])))
    font = 0.04 * max(span)

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="{_num(x0)} {_num(y0)} {_num(span[0])} {_num(span[1])}">',
    ]
    for g, label, color in zip(embeddings, labels, colors):
        cx, cy = g.mean[0], 0.0 - g.mean[1]
        c = quoteattr(color)
        out.append(
            f'<ellipse cx="{_num(cx)}" cy="{_num(cy)}" rx="{_num(g.sigma[0])}" ry="{_num(g.sigma[1])}" '
            f"fill={c} fill-opacity=\"0.5\" stroke={c} stroke-width=\"{_num(font / 8)}\"/>"
        )
    for g, label in zip(embeddings, labels):
        out.append(
            f'<text x="{_num(g.mean[0])}" y="{_num(0.0 - g.mean[1])}" font-size="{_num(font)}" '
            f'text-anchor="middle" dominant-baseline="middle">{escape(label)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
