"""Self-contained SVG scatter for per-counter entropy metrics.

No plotting dependency: the emitter writes fixed-precision coordinates
in a fixed element order, so identical inputs give identical bytes.
"""

from __future__ import annotations

from typing import Iterable

_SIZE = 560
_MARGIN = 64
_PLOT = _SIZE - 2 * _MARGIN


def _x(v: float) -> float:
    return _MARGIN + v * _PLOT


def _y(v: float) -> float:
    return _SIZE - _MARGIN - v * _PLOT


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def entropy_scatter_svg(
    points: Iterable[tuple[str, float, float]],
    title: str = "Per-counter entropy",
) -> str:
    """Scatter of (Shannon, min-entropy) per-bit pairs on the unit square.

    One marker per counter; the y=x diagonal is drawn since min-entropy
    never exceeds Shannon entropy, so all markers sit on or below it.
    """
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIZE}" '
        f'height="{_SIZE}" viewBox="0 0 {_SIZE} {_SIZE}">',
        f'<rect width="{_SIZE}" height="{_SIZE}" fill="white"/>',
        f'<text x="{_SIZE / 2:.0f}" y="28" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{title}</text>',
    ]
    # Grid and tick labels at quarter intervals.
    for i in range(5):
        v = i / 4
        gx, gy = _x(v), _y(v)
        parts.append(
            f'<line x1="{_fmt(gx)}" y1="{_fmt(_y(0))}" x2="{_fmt(gx)}" '
            f'y2="{_fmt(_y(1))}" stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<line x1="{_fmt(_x(0))}" y1="{_fmt(gy)}" x2="{_fmt(_x(1))}" '
            f'y2="{_fmt(gy)}" stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(gx)}" y="{_fmt(_y(0) + 20)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{v:.2f}</text>'
        )
        parts.append(
            f'<text x="{_fmt(_x(0) - 8)}" y="{_fmt(gy + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{v:.2f}</text>'
        )
    # Axes, diagonal, axis captions.
    parts.append(
        f'<line x1="{_fmt(_x(0))}" y1="{_fmt(_y(0))}" x2="{_fmt(_x(1))}" '
        f'y2="{_fmt(_y(0))}" stroke="black" stroke-width="1.5"/>'
    )
    parts.append(
        f'<line x1="{_fmt(_x(0))}" y1="{_fmt(_y(0))}" x2="{_fmt(_x(0))}" '
        f'y2="{_fmt(_y(1))}" stroke="black" stroke-width="1.5"/>'
    )
    parts.append(
        f'<line x1="{_fmt(_x(0))}" y1="{_fmt(_y(0))}" x2="{_fmt(_x(1))}" '
        f'y2="{_fmt(_y(1))}" stroke="#888888" stroke-width="1" '
        'stroke-dasharray="6,4"/>'
    )
    parts.append(
        f'<text x="{_SIZE / 2:.0f}" y="{_SIZE - 16}" text-anchor="middle" '
        'font-family="sans-serif" font-size="13">Shannon entropy per bit</text>'
    )
    parts.append(
        f'<text x="20" y="{_SIZE / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 20 {_SIZE / 2:.0f})">min-entropy per bit</text>'
    )
    for counter_id, h1, hinf in points:
        parts.append(
            f'<circle cx="{_fmt(_x(h1))}" cy="{_fmt(_y(hinf))}" r="4" '
            f'fill="#3b6ea5" fill-opacity="0.75">'
            f"<title>{_escape(counter_id)}</title></circle>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )
