"""Scene-level pipelines shared by the renderers, the report and the CLI."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .geometry import (ConeResult, NoConeError, TangentPoint, compute_tangent_cone,
                       curve_intersections, first_polar, product_cone)
from .planar import decompose_curve, label_arcs
from .poly import MultiPoly
from .scene import Scene, product_polynomial


@dataclass
class PlanarAnalysis:
    sigma: MultiPoly
    polar: MultiPoly
    cone: ConeResult | None
    tangents: list
    arcs: list
    timings: dict = field(default_factory=dict)

    @property
    def pencil(self) -> MultiPoly:
        return self.cone.theta if self.cone else MultiPoly.constant(self.sigma.ring, 1)


@dataclass
class SpatialAnalysis:
    sigma: MultiPoly
    polar: MultiPoly
    cone: ConeResult | None
    cone_error: str | None = None
    timings: dict = field(default_factory=dict)


def scene_cone(scene: Scene, backend: str = "auto") -> ConeResult:
    factors = scene.factors()
    if len(factors) > 1:
        return product_cone(factors, scene.light, backend=backend)
    return compute_tangent_cone(factors[0], scene.light, backend=backend)


def tangent_points(scene: Scene) -> list:
    """Real points where the curve meets its polar, from the factors.

    Each factor contributes its own tangent points; crossings between factors
    are singular points of the product and are flagged as such.
    """
    L = scene.light
    factors = scene.factors()
    out = []
    for f in factors:
        if f.degree < 2 and f.evaluate(L) != 0:
            continue
        try:
            polar = first_polar(f, L)
        except ValueError:
            continue
        if polar.is_constant():
            continue
        grad = f.gradient()
        for p in curve_intersections(f, polar):
            out.append(TangentPoint(p, all(p.sign_of(g) == 0 for g in grad)))
    for i, f in enumerate(factors):
        for g in factors[i + 1:]:
            for p in curve_intersections(f, g):
                out.append(TangentPoint(p, True))
    return out


def analyze_planar(scene: Scene, *, backend: str = "auto", eps=None, budget=None) -> PlanarAnalysis:
    if scene.dimension != 2:
        raise ValueError("planar analysis needs a 2-D scene")
    kw = {}
    if eps is not None:
        kw["eps"] = eps
    if budget is not None:
        kw["budget"] = budget
    timings = {}
    t0 = time.perf_counter()
    sigma = product_polynomial(scene)
    polar = first_polar(sigma, scene.light)
    timings["polar"] = time.perf_counter() - t0
    try:
        cone = scene_cone(scene, backend)
        theta = cone.theta
        aux = cone.basis if cone.backend.startswith("factored") else [theta]
    except NoConeError:
        cone = None
        theta = MultiPoly.constant(sigma.ring, 1)
        aux = []
    timings["cone"] = cone.seconds if cone else 0.0
    t1 = time.perf_counter()
    tangents = tangent_points(scene)
    arcs = decompose_curve(sigma, polar, theta, factors=scene.factors(), aux_factors=aux)
    timings["decomposition"] = time.perf_counter() - t1
    t2 = time.perf_counter()
    arcs = label_arcs(arcs, sigma, polar, scene.light, **kw)
    timings["labels"] = time.perf_counter() - t2
    return PlanarAnalysis(sigma, polar, cone, tangents, arcs, timings)


def analyze_spatial(scene: Scene, *, backend: str = "auto", with_cone: bool = True) -> SpatialAnalysis:
    if scene.dimension != 3:
        raise ValueError("spatial analysis needs a 3-D scene")
    t0 = time.perf_counter()
    sigma = product_polynomial(scene)
    polar = first_polar(sigma, scene.light)
    timings = {"polar": time.perf_counter() - t0}
    cone = err = None
    if with_cone:
        try:
            cone = scene_cone(scene, backend)
            timings["cone"] = cone.seconds
        except NoConeError as exc:
            err = str(exc)
    return SpatialAnalysis(sigma, polar, cone, err, timings)
