"""SVG plots of plane-curve scenes."""

from __future__ import annotations

from gmpy2 import mpq

from .analysis import PlanarAnalysis, analyze_planar
from .config import RenderConfig
from .geometry import RegionLabel
from .planar import _split_vertical, decompose_curve, trace_arc
from .poly import MultiPoly, product
from .polygcd import squarefree_part
from .scene import Scene

_AUTO_CLIP = (-50, 50, -50, 50)


def _fmt(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


def _body(curve_factors: list, ring) -> MultiPoly | None:
    curved, _ = _split_vertical(curve_factors)
    return product(curved, ring) if curved else None


def arc_polylines(analysis: PlanarAnalysis, factors: list, clip, samples: int, y_tol) -> list:
    body = _body(factors, analysis.sigma.ring)
    out = []
    for arc in analysis.arcs:
        if arc.vertical_at is None and body is None:
            out.append([])
            continue
        out.append(trace_arc(body, arc, samples, y_tol, clip))
    return out


def polar_polylines(polar: MultiPoly, clip, samples: int, y_tol) -> list:
    if polar.is_constant():
        return []
    curve = squarefree_part(polar)
    one = MultiPoly.constant(curve.ring, 1)
    arcs = decompose_curve(curve, one, one, aux_factors=[])
    body = _body([curve], curve.ring)
    return [trace_arc(body, a, samples, y_tol, clip) for a in arcs]


def auto_view(analysis: PlanarAnalysis, factors, light) -> tuple:
    pts = [p for pl in arc_polylines(analysis, factors, _AUTO_CLIP, 8, mpq(1, 64)) for p in pl]
    pts += [tuple(float(c) for c in light)]
    pts += [t.point.to_floats() for t in analysis.tangents]
    xs = [p[0] for p in pts if abs(p[0]) < 49]
    ys = [p[1] for p in pts if abs(p[1]) < 49]
    if not xs or not ys:
        return (-5, 5, -5, 5)
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, 1.0)
    cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
    half = span * 0.6
    q = lambda v: mpq(round(v * 8), 8)
    return (q(cx - half), q(cx + half), q(cy - half), q(cy + half))


def _clip_ray(L, P, view):
    """Segment from L through P to the border of the view box."""
    xmin, xmax, ymin, ymax = view
    dx, dy = P[0] - L[0], P[1] - L[1]
    ts = []
    for t in ((xmin - L[0]) / dx if dx else None, (xmax - L[0]) / dx if dx else None,
              (ymin - L[1]) / dy if dy else None, (ymax - L[1]) / dy if dy else None):
        if t is not None and t > 0:
            x, y = L[0] + t * dx, L[1] + t * dy
            if xmin - 1e-9 <= x <= xmax + 1e-9 and ymin - 1e-9 <= y <= ymax + 1e-9:
                ts.append(t)
    t_end = max(ts + [1.0])
    return (L[0], L[1]), (L[0] + t_end * dx, L[1] + t_end * dy)


def render_2d(scene: Scene, config: RenderConfig | None = None,
              analysis: PlanarAnalysis | None = None) -> str:
    """SVG document for a plane scene; bytes depend only on scene and config."""
    config = config or RenderConfig()
    if scene.dimension != 2:
        raise ValueError("render_2d needs a 2-D scene")
    analysis = analysis or analyze_planar(scene, eps=config.eps, budget=config.budget)
    factors = scene.factors()
    view = scene.view or auto_view(analysis, factors, scene.light)
    xmin, xmax, ymin, ymax = (float(v) for v in view)
    W, H = config.width, config.height
    sx = W / (xmax - xmin)
    sy = H / (ymax - ymin)
    # half a pixel, as an exact rational
    y_tol = mpq(max(round((ymax - ymin) / H / 2 * 10 ** 9), 1), 10 ** 9)

    def px(p):
        return _fmt((p[0] - xmin) * sx), _fmt((ymax - p[1]) * sy)

    def path(points):
        pts = [px(p) for p in points]
        return "M " + " L ".join(f"{a} {b}" for a, b in pts)

    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" '
             f'viewBox="0 0 {W} {H}">']
    clip = view
    for pl in polar_polylines(analysis.polar, clip, config.samples_per_arc, y_tol):
        if len(pl) >= 2:
            lines.append(f'<path class="polar" d="{path(pl)}" fill="none" '
                         f'stroke="{config.color("polar")}" stroke-width="1"/>')
    L = tuple(float(c) for c in scene.light)
    for tp in analysis.tangents:
        P = tp.point.to_floats()
        if P == L:
            continue
        a, b = _clip_ray(L, P, (xmin, xmax, ymin, ymax))
        kind = "singular" if tp.singular else "tangent"
        (x1, y1), (x2, y2) = px(a), px(b)
        lines.append(f'<line class="{kind}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
                     f'stroke="{config.color("tangent")}" stroke-width="1"/>')
    polylines = arc_polylines(analysis, factors, clip, config.samples_per_arc, y_tol)
    for arc, pl in zip(analysis.arcs, polylines):
        if len(pl) < 2:
            continue
        label = arc.label or RegionLabel.BOUNDARY
        lines.append(f'<path class="arc {label.value}" d="{path(pl)}" fill="none" '
                     f'stroke="{config.color(label)}" stroke-width="2"/>')
    lx, ly = px(L)
    lines.append(f'<circle class="light" cx="{lx}" cy="{ly}" r="4" fill="{config.color("light")}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
