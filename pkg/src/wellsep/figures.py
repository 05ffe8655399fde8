"""Standalone SVG scatter plots of a clustering, with erroneous found clusters
circled at their gravity centers."""
from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .evaluation import erroneous_found_clusters

COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]
MARKERS = ["circle", "square", "triangle", "diamond", "cross"]
SIZE = 800
PAD = 30


def _marker(shape: str, x: float, y: float, color: str, r: float = 2.5) -> str:
    if shape == "circle":
        return f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r}" fill="{color}"/>'
    if shape == "square":
        return f'<rect x="{x - r:.2f}" y="{y - r:.2f}" width="{2 * r}" height="{2 * r}" fill="{color}"/>'
    if shape == "triangle":
        pts = f"{x:.2f},{y - r:.2f} {x - r:.2f},{y + r:.2f} {x + r:.2f},{y + r:.2f}"
        return f'<polygon points="{pts}" fill="{color}"/>'
    if shape == "diamond":
        pts = f"{x:.2f},{y - r:.2f} {x + r:.2f},{y:.2f} {x:.2f},{y + r:.2f} {x - r:.2f},{y:.2f}"
        return f'<polygon points="{pts}" fill="{color}"/>'
    return (f'<path d="M{x - r:.2f},{y - r:.2f}L{x + r:.2f},{y + r:.2f}'
            f'M{x - r:.2f},{y + r:.2f}L{x + r:.2f},{y - r:.2f}" stroke="{color}" stroke-width="1.2"/>')


def style_for(cluster: int) -> tuple[str, str]:
    return COLORS[cluster % len(COLORS)], MARKERS[(cluster // len(COLORS)) % len(MARKERS)]


def error_circles(ld, assignment, min_radius: float | None = None):
    """(cluster id, gravity center, radius) for every erroneous found cluster.

    The radius reaches the farthest regular member, so a merged cluster's
    circle touches both intended balls.
    """
    pts = np.asarray(ld.points)
    assignment = np.asarray(assignment)
    if min_radius is None:
        min_radius = float(ld.config.radius) if ld.config is not None else 0.0
    reg = np.asarray(ld.labels) >= 0
    out = []
    for c in erroneous_found_clusters(ld.labels, assignment).tolist():
        members = assignment == c
        g = pts[members].mean(axis=0)
        core = pts[members & reg]
        r = float(np.sqrt(((core - g) ** 2).sum(axis=1).max())) if len(core) else 0.0
        out.append((c, g, max(r, min_radius)))
    return out


def render_worst_case(ld, clustering, out_path, title: str | None = None) -> Path:
    assignment = np.asarray(getattr(clustering, "assignment", clustering))
    pts = np.asarray(ld.points, dtype=np.float64)
    circles = error_circles(ld, assignment)
    radius = float(ld.config.radius) if ld.config is not None else 0.0

    lo = pts.min(axis=0) - radius
    hi = pts.max(axis=0) + radius
    for _, g, r in circles:
        lo = np.minimum(lo, g - r)
        hi = np.maximum(hi, g + r)
    scale = (SIZE - 2 * PAD) / max(float((hi - lo).max()), 1e-12)

    def tx(p):
        return PAD + (p[0] - lo[0]) * scale, SIZE - PAD - (p[1] - lo[1]) * scale

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]
    if title:
        parts.append(f'<title>{escape(title)}</title>')
        parts.append(f'<text x="{PAD}" y="{PAD * 0.6:.1f}" font-family="sans-serif" '
                     f'font-size="14">{escape(title)}</text>')
    if radius > 0:
        parts.append('<g class="intended-balls" fill="none" stroke="#cccccc" stroke-dasharray="3,3">')
        for c in np.asarray(ld.centers):
            x, y = tx(c)
            parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{radius * scale:.2f}"/>')
        parts.append("</g>")
    noise = np.asarray(ld.labels) < 0
    parts.append('<g class="points">')
    for i, p in enumerate(pts):
        color, shape = style_for(int(assignment[i]))
        x, y = tx(p)
        m = _marker(shape, x, y, color)
        if noise[i]:
            m = m.replace("/>", ' opacity="0.35"/>', 1)
        parts.append(m)
    parts.append("</g>")
    parts.append('<g class="errors" fill="none" stroke="black" stroke-width="2">')
    for c, g, r in circles:
        x, y = tx(g)
        parts.append(f'<circle class="error-circle" data-cluster="{c}" cx="{x:.2f}" '
                     f'cy="{y:.2f}" r="{r * scale:.2f}"/>')
    parts.append("</g>")
    parts.append("</svg>")

    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text("\n".join(parts) + "\n", encoding="utf-8")
    return out_path
