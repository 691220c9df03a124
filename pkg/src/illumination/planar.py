"""Cylindrical decomposition of a plane curve into sign-invariant arcs."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from gmpy2 import mpq

from .elimination import sylvester_resultant
from .geometry import (DEFAULT_BUDGET, DEFAULT_EPS, GeometryError, RegionLabel, SharedComponentError,
                       SurfacePoint, classify_point)
from .poly import ContextError, MultiPoly, QQ, product
from .polygcd import content_in, exquo
from .realroots import RealAlgebraic, real_roots


@dataclass
class CurveArc:
    """One branch of the curve over an open cell.

    For ordinary arcs ``lo``/``hi`` bound the abscissa and ``branch`` counts
    branches from below.  Arcs of a vertical line component carry its
    abscissa in ``vertical_at`` and ``lo``/``hi`` bound the ordinate.
    ``None`` bounds are infinite.
    """

    lo: RealAlgebraic | None
    hi: RealAlgebraic | None
    branch: int
    sample: SurfacePoint
    signs: tuple
    label: RegionLabel | None = None
    vertical_at: mpq | None = None

    @property
    def x_interval(self) -> tuple:
        return (self.lo, self.hi)

    @property
    def sample_x(self) -> mpq:
        if self.vertical_at is not None:
            return self.vertical_at
        return self.sample.nums[0][0]


def _xpoly(p: MultiPoly) -> list:
    if p.is_constant():
        return []
    return p.to_dense("x")


def _roots_x(p: MultiPoly) -> list:
    d = _xpoly(p)
    return real_roots(d) if len(d) > 1 else []


def _cmp(a: RealAlgebraic, b: RealAlgebraic) -> int:
    return a.compare(b)


def _merge_roots(roots: list) -> list:
    roots = sorted(roots, key=functools.cmp_to_key(_cmp))
    out = []
    for r in roots:
        if not out or out[-1].compare(r) != 0:
            out.append(r)
    return out


def _split_vertical(factors: list) -> tuple:
    """Separate x-only content (vertical lines) from each factor."""
    curved, vertical = [], []
    for f in factors:
        if f.degree_in("y") < 1:
            if not f.is_constant():
                vertical.append(f)
            continue
        c = content_in(f, "y")
        if not c.is_constant():
            vertical.append(c)
            f = exquo(f, c)
        curved.append(f)
    return curved, vertical


def _check_plane(p: MultiPoly):
    if p.ring != ("x", "y"):
        raise ContextError("planar decomposition works in the ring (x, y)")


def _factor_list(gamma: MultiPoly, factors) -> list:
    _check_plane(gamma)
    if not factors:
        return [gamma]
    factors = [f for f in factors if not f.is_constant()]
    if product(factors, gamma.ring).canonical() != gamma.canonical():
        raise ValueError("curve factors do not multiply to the curve polynomial")
    return factors


def critical_abscissas(gamma: MultiPoly, aux: Sequence = (), *, factors=None) -> list:
    """Sorted distinct real abscissas where the curve's cylindrical structure can change.

    Includes discriminant roots, zeros of the leading coefficient in ``y``,
    crossings between the given factors, vertical components and the
    intersections of the curve with every polynomial in ``aux``.
    """
    parts = _factor_list(gamma, factors)
    curved, vertical = _split_vertical(parts)
    polys = list(vertical)
    for i, f in enumerate(curved):
        polys.append(f.leading_coefficient_in("y"))
        if f.degree_in("y") >= 2:
            polys.append(sylvester_resultant(f, f.diff("y"), "y"))
        for g in curved[i + 1:]:
            r = sylvester_resultant(f, g, "y")
            if r.is_zero():
                raise SharedComponentError("two curve factors share a component")
            polys.append(r)
    for a in aux:
        _check_plane(a)
        if a.is_constant():
            continue
        if a.degree_in("y") < 1:
            polys.append(a)
            continue
        for f in curved:
            r = sylvester_resultant(f, a, "y")
            if r.is_zero():
                raise SharedComponentError("the curve shares a component with an auxiliary polynomial")
            polys.append(r)
    roots = []
    for p in polys:
        roots.extend(_roots_x(p))
    return _merge_roots(roots)


def _between(a: RealAlgebraic | None, b: RealAlgebraic | None) -> mpq:
    """A deterministic rational strictly between two distinct bounds."""
    if a is None and b is None:
        return mpq(0)
    if a is None:
        b.refine(1)
        return mpq(math.floor(b.lo)) - 1
    if b is None:
        a.refine(1)
        return mpq(math.ceil(a.hi)) + 1
    while not a.hi < b.lo:
        if a.exact is None and (b.exact is not None or a.hi - a.lo >= b.hi - b.lo):
            a.bisect_once()
        else:
            b.bisect_once()
    return (a.hi + b.lo) / 2


def _fiber_roots(f: MultiPoly, x0) -> list:
    d = f.restrict_dense((x0, 0), (x0, 1))
    return real_roots(d) if len(d) > 1 else []


def decompose_curve(gamma: MultiPoly, polar: MultiPoly, theta: MultiPoly, *,
                    factors=None, aux_factors=None) -> list:
    """Arcs of ``gamma`` over the cells of its critical abscissas.

    ``factors`` (multiplying to ``gamma``) and ``aux_factors`` (whose zero
    set equals that of ``theta``) only speed up the projection; they do not
    change the result.  Each arc carries the exact signs of the polar and of
    ``theta`` at its sample point.
    """
    aux = [polar] + list(aux_factors if aux_factors is not None else [theta])
    crit = critical_abscissas(gamma, aux, factors=factors)
    parts = _factor_list(gamma, factors)
    curved, vertical = _split_vertical(parts)
    body = product(curved, gamma.ring) if curved else None
    arcs = []
    bounds = [None] + crit + [None]
    if body is not None:
        for lo, hi in zip(bounds, bounds[1:]):
            x0 = _between(lo, hi)
            for k, r in enumerate(_fiber_roots(body, x0)):
                pt = SurfacePoint.on_ray((x0, 0), (x0, 1), r)
                arcs.append(CurveArc(lo, hi, k, pt, (pt.sign_of(polar), pt.sign_of(theta))))
    arcs.extend(_vertical_arcs(vertical, curved, aux, polar, theta))
    return arcs


def _vertical_arcs(vertical, curved, aux, polar, theta) -> list:
    out = []
    for v in vertical:
        for r in _roots_x(v):
            if not r.is_rational:
                raise GeometryError("vertical components at irrational abscissas are not supported")
            x0 = r.exact
            cuts = []
            for f in curved + [a for a in aux if not a.is_constant()]:
                d = f.restrict_dense((x0, 0), (x0, 1))
                if not d:
                    raise SharedComponentError("vertical component shared with another polynomial")
                if len(d) > 1:
                    cuts.extend(real_roots(d))
            cuts = _merge_roots(cuts)
            b = [None] + cuts + [None]
            for k, (lo, hi) in enumerate(zip(b, b[1:])):
                y0 = _between(lo, hi)
                pt = SurfacePoint.at((x0, y0))
                out.append(CurveArc(lo, hi, k, pt, (pt.sign_of(polar), pt.sign_of(theta)),
                                    vertical_at=x0))
    return out


def label_arcs(arcs: list, sigma: MultiPoly, polar: MultiPoly, L, *, eps=DEFAULT_EPS,
               budget: int = DEFAULT_BUDGET) -> list:
    """Attach the exact classification of each arc's sample point."""
    return [replace(a, label=classify_point(sigma, polar, L, a.sample, eps=eps, budget=budget))
            for a in arcs]


# -- tracing for rendering and component counting -----------------------------------------------------


def _float_roots(f: MultiPoly, x: float) -> list:
    # coefficients of f(x, y) in y, numerically
    cs = f.coefficients_in("y")
    deg = max(cs)
    coeffs = []
    for k in range(deg, -1, -1):
        c = cs.get(k)
        coeffs.append(0.0 if c is None else sum(float(v) * x ** e[0] for e, v in c.terms.items()))
    while coeffs and coeffs[0] == 0.0:
        coeffs.pop(0)
    if len(coeffs) < 2:
        return []
    return [complex(r) for r in np.roots(coeffs)]


def trace_arc(body: MultiPoly, arc: CurveArc, samples: int, y_tol, clip: tuple) -> list:
    """Float polyline following ``arc``; ``clip`` = (xmin, xmax, ymin, ymax).

    Interior vertices come from exact root isolation at rational abscissas;
    the two end vertices are numerical limits on the bounding fibres.
    """
    xmin, xmax, ymin, ymax = (QQ(c) for c in clip)
    if arc.vertical_at is not None:
        x0 = float(arc.vertical_at)
        y0 = float(ymin) if arc.lo is None else arc.lo.to_float()
        y1 = float(ymax) if arc.hi is None else arc.hi.to_float()
        return [(x0, max(y0, float(ymin) - 1)), (x0, min(y1, float(ymax) + 1))]
    a = xmin - (xmax - xmin) / 8 if arc.lo is None else None
    b = xmax + (xmax - xmin) / 8 if arc.hi is None else None
    lo_f = float(a) if a is not None else arc.lo.to_float()
    hi_f = float(b) if b is not None else arc.hi.to_float()
    lo_f = max(lo_f, float(xmin) - float(xmax - xmin) / 8)
    hi_f = min(hi_f, float(xmax) + float(xmax - xmin) / 8)
    if hi_f <= lo_f:
        return []
    pts = []
    n = max(2, samples)
    for k in range(n):
        s = 0.5 - 0.5 * math.cos(math.pi * (k + 0.5) / n)
        x = QQ(lo_f + (hi_f - lo_f) * s)
        if (arc.lo is not None and arc.lo.compare(x) >= 0) or (arc.hi is not None and arc.hi.compare(x) <= 0):
            continue
        roots = _fiber_roots(body, x)
        if arc.branch >= len(roots):
            continue
        r = roots[arc.branch]
        r.refine(QQ(y_tol))
        pts.append((float(x), r.to_float() if r.is_rational else float((r.lo + r.hi) / 2)))
    if not pts:
        return []
    out = list(pts)
    for end, ref, where in ((arc.lo, pts[0], 0), (arc.hi, pts[-1], 1)):
        if end is None:
            continue
        xe = end.to_float()
        cand = [r.real for r in _float_roots(body, xe) if abs(r.imag) < 1e-4 * (1 + abs(r.real))]
        if not cand:
            cand = [r.real for r in _float_roots(body, xe)]
        if cand:
            ye = min(cand, key=lambda v: abs(v - ref[1]))
            if where == 0:
                out.insert(0, (xe, ye))
            else:
                out.append((xe, ye))
    return out


def merge_arcs(arcs: list, polylines: list, tol: float = 1e-6) -> list:
    """Group arcs with equal labels that meet at a common end point.

    Returns lists of arc indices, one list per connected component.
    """
    parent = list(range(len(arcs)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    ends = []
    for i, pl in enumerate(polylines):
        if pl:
            ends.append((pl[0], i))
            ends.append((pl[-1], i))
    ends.sort()
    for k, (p, i) in enumerate(ends):
        for q, j in ends[k + 1:]:
            if q[0] - p[0] > tol * (1 + abs(p[0])):
                break
            if abs(q[1] - p[1]) <= tol * (1 + abs(p[1])) and arcs[i].label == arcs[j].label:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(len(arcs)):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())
