"""Minimal SVG emitters: registration overlay, line chart, histogram."""
from __future__ import annotations

from typing import Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .core import PointCloud, rotate_points
from .registration import RegistrationResult

WIDTH, HEIGHT, MARGIN = 640, 480, 50
COLORS = {"x": "#1f77b4", "y": "#ff7f0e", "matched": "#2ca02c"}


class _Frame:
    """Maps data coordinates into the plot area (y axis up)."""

    def __init__(self, xs: np.ndarray, ys: np.ndarray, equal: bool):
        x0, x1 = float(np.min(xs)), float(np.max(xs))
        y0, y1 = float(np.min(ys)), float(np.max(ys))
        if x1 - x0 < 1e-12:
            x0, x1 = x0 - 1, x1 + 1
        if y1 - y0 < 1e-12:
            y0, y1 = y0 - 1, y1 + 1
        w, h = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN
        sx, sy = w / (x1 - x0), h / (y1 - y0)
        if equal:
            sx = sy = min(sx, sy)
        self.x0, self.y0, self.sx, self.sy = x0, y0, sx, sy

    def __call__(self, x: float, y: float) -> tuple[float, float]:
        return MARGIN + (x - self.x0) * self.sx, HEIGHT - MARGIN - (y - self.y0) * self.sy


def _doc(body: list[str], title: str) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">')
    return "\n".join([head, f"<title>{escape(title)}</title>",
                      f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>', *body, "</svg>"]) + "\n"


def _legend(entries: Sequence[tuple[str, str]]) -> list[str]:
    out = ['<g class="legend">']
    for k, (label, color) in enumerate(entries):
        y = 16 + 18 * k
        out.append(f'<rect x="{WIDTH - 150}" y="{y - 9}" width="10" height="10" fill="{color}"/>')
        out.append(f'<text x="{WIDTH - 134}" y="{y}" font-size="12">{escape(label)}</text>')
    out.append("</g>")
    return out


def overlay_svg(X: PointCloud, Y: PointCloud, res: RegistrationResult, title: str = "registration") -> str:
    """``X`` and ``Y`` moved into ``X``'s frame; matched points drawn in their own colour."""
    theta = res.best.midpoint
    ty = rotate_points(Y.points - Y.points[res.best.q], theta) + X.points[res.best.p]
    mi = {p.i for p in res.pairs}
    mj = {p.j for p in res.pairs}
    allp = np.vstack((X.points, ty))
    f = _Frame(allp[:, 0], allp[:, 1], equal=True)
    body = ['<g class="points">']
    for cloud_tag, pts, matched in (("x", X.points, mi), ("y", ty, mj)):
        for k, (a, b) in enumerate(pts.tolist()):
            cls = "matched" if k in matched else cloud_tag
            px, py = f(a, b)
            r = 3.5 if cloud_tag == "x" else 2.2
            body.append(f'<circle class="pt {cloud_tag} {cls}" data-index="{k}" cx="{px:.2f}" '
                        f'cy="{py:.2f}" r="{r}" fill="{COLORS[cls]}" fill-opacity="0.8"/>')
    body.append("</g>")
    body += _legend([("X", COLORS["x"]), ("Y (transformed)", COLORS["y"]),
                     (f"matched ({res.k_total})", COLORS["matched"])])
    return _doc(body, title)


def _axes(f: _Frame, xticks: Sequence[float], yticks: Sequence[float], xlabel: str, ylabel: str,
          fmt_x=str, fmt_y=str) -> list[str]:
    out = ['<g class="axes" stroke="black" font-size="11">']
    bx, by = MARGIN, HEIGHT - MARGIN
    out.append(f'<line x1="{bx}" y1="{by}" x2="{WIDTH - MARGIN}" y2="{by}"/>')
    out.append(f'<line x1="{bx}" y1="{by}" x2="{bx}" y2="{MARGIN}"/>')
    for t in xticks:
        px, _ = f(t, 0)
        out.append(f'<text x="{px:.1f}" y="{by + 16}" text-anchor="middle" stroke="none">{escape(fmt_x(t))}</text>')
    for t in yticks:
        _, py = f(0, t)
        out.append(f'<text x="{bx - 6}" y="{py + 4:.1f}" text-anchor="end" stroke="none">{escape(fmt_y(t))}</text>')
    out.append(f'<text x="{WIDTH / 2}" y="{HEIGHT - 10}" text-anchor="middle" stroke="none">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{HEIGHT / 2}" transform="rotate(-90 14 {HEIGHT / 2})" '
               f'text-anchor="middle" stroke="none">{escape(ylabel)}</text>')
    out.append("</g>")
    return out


def success_rate_svg(k_values: Sequence[int], rates: Sequence[Optional[float]],
                     title: str = "Successful registrations vs common points") -> str:
    pts = [(k, 100.0 * r) for k, r in zip(k_values, rates) if r is not None]
    ks = [p[0] for p in pts] or [0, 1]
    f = _Frame(np.array([0.0, max(ks)]), np.array([0.0, 100.0]), equal=False)
    body = _axes(f, ks, [0, 25, 50, 75, 100], "common points k", "successful registrations (%)",
                 fmt_y=lambda v: f"{v:g}")
    if pts:
        path = " ".join(f"{x:.2f},{y:.2f}" for x, y in (f(a, b) for a, b in pts))
        body.append(f'<polyline points="{path}" fill="none" stroke="{COLORS["x"]}" stroke-width="2"/>')
    for a, b in pts:
        px, py = f(a, b)
        body.append(f'<circle class="pt rate" data-k="{a}" cx="{px:.2f}" cy="{py:.2f}" r="4" fill="{COLORS["x"]}"/>')
    return _doc(body, title)


def histogram_svg(values: Sequence[float], bins: int = 20, title: str = "Angle error (degrees)") -> str:
    vals = np.asarray(values, dtype=float)
    hi = float(vals.max()) if vals.size and vals.max() > 0 else 1.0
    counts, edges = np.histogram(vals, bins=bins, range=(0.0, hi))
    top = max(int(counts.max()) if counts.size else 0, 1)
    f = _Frame(np.array([0.0, hi]), np.array([0.0, float(top)]), equal=False)
    ticks = [edges[0], edges[len(edges) // 2], edges[-1]]
    body = _axes(f, ticks, sorted({0, top}), "angle error (deg)", "trials",
                 fmt_x=lambda v: f"{v:.3g}", fmt_y=lambda v: f"{int(v)}")
    for c, a, b in zip(counts.tolist(), edges[:-1], edges[1:]):
        x0, y0 = f(a, c)
        x1, y1 = f(b, 0)
        body.append(f'<rect class="bar" x="{x0:.2f}" y="{y0:.2f}" width="{max(x1 - x0 - 1, 0.5):.2f}" '
                    f'height="{y1 - y0:.2f}" fill="{COLORS["x"]}"/>')
    return _doc(body, title)
