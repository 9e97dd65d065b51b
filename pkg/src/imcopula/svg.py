"""Minimal SVG 1.1 scatter-plot matrices for samples on the unit cube."""
from __future__ import annotations

import numpy as np

from .errors import DimensionError

PANEL = 1000
MARGIN = 40
MAX_DIM = 6


def _panel(x: np.ndarray, y: np.ndarray, ox: int, oy: int) -> list[str]:
    lines = [
        f'<g transform="translate({ox},{oy})">',
        f'<rect x="0" y="0" width="{PANEL}" height="{PANEL}" fill="none" stroke="black" stroke-width="2"/>',
    ]
    # y grows downward in SVG
    px = x * PANEL
    py = (1.0 - y) * PANEL
    lines.extend(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="1"/>' for a, b in zip(px, py))
    lines.append("</g>")
    return lines


def scatter_svg(u: np.ndarray, labels: list[str] | None = None) -> str:
    """Pairwise scatter matrix; one 1000x1000 panel per ordered pair, labels on the diagonal."""
    u = np.asarray(u, dtype=float)
    if u.ndim != 2:
        raise DimensionError("expected an (n, d) sample")
    d = u.shape[1]
    if not 2 <= d <= MAX_DIM:
        raise DimensionError(f"scatter plots support 2 <= d <= {MAX_DIM}, got {d}")
    labels = labels or [f"U{j}" for j in range(1, d + 1)]
    cells = 1 if d == 2 else d
    step = PANEL + MARGIN
    size = cells * step + MARGIN
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
        '<g fill="black" fill-opacity="0.5">',
    ]
    if d == 2:
        out += _panel(u[:, 0], u[:, 1], MARGIN, MARGIN)
    else:
        for r in range(d):
            for c in range(d):
                ox, oy = MARGIN + c * step, MARGIN + r * step
                if r == c:
                    out.append(
                        f'<text x="{ox + PANEL // 2}" y="{oy + PANEL // 2}" font-size="96" '
                        f'text-anchor="middle">{labels[r]}</text>'
                    )
                else:
                    # row r is the vertical axis, column c the horizontal one
                    out += _panel(u[:, c], u[:, r], ox, oy)
    out.append("</g>")
    if d == 2:
        out.append(f'<text x="{MARGIN + PANEL // 2}" y="{size - 8}" font-size="28" text-anchor="middle">{labels[0]}</text>')
        out.append(
            f'<text x="24" y="{MARGIN + PANEL // 2}" font-size="28" text-anchor="middle" '
            f'transform="rotate(-90 24 {MARGIN + PANEL // 2})">{labels[1]}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
