"""Plain-text ``key = value`` reports.

Output is deterministic unless timings are requested, so two runs on the
same scene are byte-identical.
"""

from __future__ import annotations

from collections import Counter

from .analysis import analyze_planar, analyze_spatial
from .elimination import ResourceLimitError
from .geometry import GeometryError, RegionLabel, first_polar
from .planar import merge_arcs
from .poly import MultiPoly
from .render2d import arc_polylines
from .scene import PLANE_VARS, Scene, plane_frame

LABELS = [RegionLabel.ILLUMINATED, RegionLabel.SELF_SHADED, RegionLabel.POLAR_SEPARATED,
          RegionLabel.BOUNDARY]


class PartialReport(RuntimeError):
    """Raised when a resource guard stops the cone; ``text`` holds what was computed."""

    def __init__(self, message: str, text: str):
        super().__init__(message)
        self.text = text


def _q(v) -> str:
    return str(v)


def _point(P) -> str:
    return ", ".join(_q(c) for c in P)


def _ra(r) -> str:
    if r is None:
        return "inf"
    if r.is_rational:
        return _q(r.exact)
    return f"{r.to_float():.9g}"


def _header(scene: Scene, name: str) -> list:
    out = [f"scene = {name}", f"dimension = {scene.dimension}", f"light = {_point(scene.light)}"]
    for n, p in scene.surfaces:
        out.append(f"surface.{n} = {p}")
        try:
            out.append(f"surface.{n}.polar = {first_polar(p, scene.light)}")
        except GeometryError as exc:
            out.append(f"surface.{n}.polar = none ({exc})")
    for n, p in scene.planes:
        out.append(f"plane.{n} = {p}")
    return out


def _cone_lines(cone, key: str) -> list:
    if cone is None:
        return [f"{key} = none"]
    return [f"{key} = {cone.theta}", f"{key}.degree = {cone.theta.degree}",
            f"{key}.terms = {len(cone.theta.terms)}", f"{key}.backend = {cone.backend}"]


def planar_report(scene: Scene, name: str, *, backend: str = "auto", timings: bool = False,
                  eps=None, budget=None) -> str:
    lines = _header(scene, name)
    try:
        a = analyze_planar(scene, backend=backend, eps=eps, budget=budget)
    except ResourceLimitError as exc:
        raise PartialReport(str(exc), "\n".join(lines + [f"error = {exc}"]) + "\n") from exc
    lines += [f"product = {a.sigma}", f"product.degree = {a.sigma.degree}",
              f"polar = {a.polar}", f"polar.degree = {a.polar.degree}"]
    lines += _cone_lines(a.cone, "pencil")
    regular = [t for t in a.tangents if not t.singular]
    singular = [t for t in a.tangents if t.singular]
    lines += [f"tangent_points = {len(regular)}", f"singular_points = {len(singular)}"]
    for k, t in enumerate(a.tangents):
        kind = "singular" if t.singular else "tangent"
        lines.append(f"point.{k} = {kind} ({', '.join(f'{c:.9g}' for c in t.point.to_floats())})")
    lines.append(f"arcs = {len(a.arcs)}")
    for k, arc in enumerate(a.arcs):
        sx = ", ".join(f"{c:.9g}" for c in arc.sample.to_floats())
        signs = ", ".join(f"{s:+d}" for s in arc.signs)
        where = f"x = {_q(arc.vertical_at)}, " if arc.vertical_at is not None else ""
        lines.append(f"arc.{k} = {where}({_ra(arc.lo)}, {_ra(arc.hi)}) branch {arc.branch} "
                     f"sample ({sx}) signs ({signs}) {arc.label}")
    counts = Counter(arc.label for arc in a.arcs)
    for lab in LABELS:
        lines.append(f"arcs.{lab.value} = {counts.get(lab, 0)}")
    view = scene.view or (-50, 50, -50, 50)
    groups = merge_arcs(a.arcs, arc_polylines(a, scene.factors(), view, 16, 2 ** -20))
    comp = Counter(a.arcs[g[0]].label for g in groups)
    for lab in LABELS:
        lines.append(f"components.{lab.value} = {comp.get(lab, 0)}")
    if timings:
        for key, secs in a.timings.items():
            lines.append(f"time.{key}_ms = {secs * 1000:.3f}")
    return "\n".join(lines) + "\n"


def spatial_report(scene: Scene, name: str, *, backend: str = "auto", timings: bool = False) -> str:
    lines = _header(scene, name)
    try:
        a = analyze_spatial(scene, backend=backend)
    except ResourceLimitError as exc:
        raise PartialReport(str(exc), "\n".join(lines + [f"error = {exc}"]) + "\n") from exc
    lines += [f"product = {a.sigma}", f"product.degree = {a.sigma.degree}",
              f"polar = {a.polar}", f"polar.degree = {a.polar.degree}"]
    lines += _cone_lines(a.cone, "cone")
    if a.cone_error:
        lines.append(f"cone.note = {a.cone_error}")
    if scene.order is not None:
        lines.append("order = " + " ".join(scene.surfaces[i][0] for i in scene.order))
    if a.cone is not None:
        for n, p in scene.planes:
            origin, u, v = plane_frame(p)
            s, t = MultiPoly.gens(PLANE_VARS)
            images = {var: s.scale(du) + t.scale(dv) + o
                      for var, o, du, dv in zip(scene.ring, origin, u, v)}
            lines.append(f"plane.{n}.frame = ({_point(origin)}) + x ({_point(u)}) + y ({_point(v)})")
            lines.append(f"plane.{n}.shadow_boundary = {a.cone.theta.compose(images, PLANE_VARS)}")
    if timings:
        for key, secs in a.timings.items():
            lines.append(f"time.{key}_ms = {secs * 1000:.3f}")
    return "\n".join(lines) + "\n"


def scene_report(scene: Scene, name: str, **kw) -> str:
    if scene.dimension == 2:
        return planar_report(scene, name, **kw)
    kw.pop("eps", None)
    kw.pop("budget", None)
    return spatial_report(scene, name, **kw)
