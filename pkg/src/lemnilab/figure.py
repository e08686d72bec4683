"""Static SVG snapshots of a choreography: curve, bodies, CM, and chords."""
from __future__ import annotations

import numpy as np

from .choreography import Choreography
from .invariants import PairSet

PANEL_W = 600
PANEL_H = 300
CURVE_SAMPLES = 512
_SCALE = 260.0


def _xy(p, top):
    return PANEL_W / 2 + _SCALE * p[0], top + PANEL_H / 2 - _SCALE * p[1]


def _panel(ch: Choreography, t: float, chords: PairSet | None, top: float, title: str) -> list[str]:
    out = [f'<g id="panel-{top:.0f}">']
    out.append(f'<rect x="0" y="{top:.0f}" width="{PANEL_W}" height="{PANEL_H}" fill="white" stroke="#ccc"/>')
    out.append(f'<text x="10" y="{top + 20:.0f}" font-family="sans-serif" font-size="13">{title}</text>')

    s = np.linspace(0.0, ch.period, CURVE_SAMPLES, endpoint=False)
    curve = ch.curve.kinematics(s)[:, :2]
    pts = " ".join("{:.2f},{:.2f}".format(*_xy(p, top)) for p in curve)
    out.append(f'<polygon points="{pts}" fill="none" stroke="#888" stroke-width="1"/>')

    pos = ch.positions(t)
    if chords is not None:
        for i, j in chords:
            (x1, y1), (x2, y2) = _xy(pos[i - 1], top), _xy(pos[j - 1], top)
            out.append(
                f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
                f'stroke="#3070b0" stroke-width="1.2"/>'
            )
    for k, p in enumerate(pos, 1):
        x, y = _xy(p, top)
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="6" fill="#d04020"/>')
        out.append(
            f'<text x="{x + 7:.2f}" y="{y - 7:.2f}" font-family="sans-serif" font-size="12">{k}</text>'
        )
    cx, cy = _xy(pos.sum(axis=0) / ch.n, top)
    out.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="3.5" fill="black"/>')
    out.append("</g>")
    return out


def render_svg(ch: Choreography, times, chords: PairSet | None = None, labels=None) -> str:
    """One 600x300 panel per requested time, stacked vertically."""
    times = [float(t) for t in times]
    labels = labels or [f"t = {t:.6g}" for t in times]
    h = PANEL_H * len(times)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{PANEL_W}" height="{h}" '
        f'viewBox="0 0 {PANEL_W} {h}">',
    ]
    for k, (t, lab) in enumerate(zip(times, labels)):
        title = f"n = {ch.n}, k^2 = {ch.m:.15g}, {lab}"
        parts.extend(_panel(ch, t, chords, k * PANEL_H, title))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
