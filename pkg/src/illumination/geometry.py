"""Polars, tangent cones and exact illumination labels for implicit surfaces."""

from __future__ import annotations

import enum
import logging
import time
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from . import dense
from .elimination import (PreconditionError, ResourceLimitError, eliminate,
                          subresultant, sylvester_resultant)
from .poly import ContextError, MultiPoly, QQ, product
from .polygcd import gcd, remove_factor, squarefree_part
from .realroots import RealAlgebraic, real_roots, sign_at, _sqfree_ints, _chain

log = logging.getLogger(__name__)

DEFAULT_EPS = mpq(1, 2 ** 40)
DEFAULT_BUDGET = 64


class GeometryError(ValueError):
    pass


class SingularPoleError(GeometryError):
    """The pole lies on the surface with vanishing gradient."""


class DegeneratePolarError(GeometryError):
    pass


class NoConeError(GeometryError):
    pass


class SharedComponentError(GeometryError):
    pass


class RegionLabel(enum.Enum):
    ILLUMINATED = "Illuminated"
    SELF_SHADED = "SelfShaded"
    POLAR_SEPARATED = "PolarSeparated"
    BOUNDARY = "Boundary"

    def __str__(self):
        return self.value


class ShadowResult(enum.Enum):
    UNBLOCKED = "unblocked"
    BLOCKED = "blocked"
    GRAZING = "grazing"


# -- polar ------------------------------------------------------------------------------------


def _check_point(sigma: MultiPoly, L) -> tuple:
    if len(L) != len(sigma.ring):
        raise ContextError(f"point of dimension {len(L)} for ring {sigma.ring}")
    return tuple(QQ(c) for c in L)


def is_singular_at(sigma: MultiPoly, P) -> bool:
    P = _check_point(sigma, P)
    if sigma.evaluate(P):
        return False
    return all(not g.evaluate(P) for g in sigma.gradient())


def first_polar(sigma: MultiPoly, L) -> MultiPoly:
    """Polar of ``sigma`` with respect to the pole ``L``, made primitive.

    Only a positive constant is divided out, so the sign of the polar at any
    point is that of the raw form (and ``sign polar(L) = sign sigma(L)``).
    Apply :func:`canonicalize` for up-to-scalar comparisons.
    """
    L = _check_point(sigma, L)
    if sigma.is_constant():
        raise PreconditionError("the polar of a constant is undefined")
    if is_singular_at(sigma, L):
        raise SingularPoleError(f"pole {tuple(map(str, L))} is a singular point of the surface")
    hom = sigma.homogenize("w")
    polar = hom.diff("w")
    for name, c in zip(sigma.ring, L):
        if c:
            polar = polar + hom.diff(name).scale(c)
    polar = polar.dehomogenize("w")
    if polar.is_zero():
        raise DegeneratePolarError("the polar vanishes identically (the surface is a cone with vertex at the pole)")
    return polar.primitive()


def polar_side(sigma: MultiPoly, L) -> int:
    v = sigma.evaluate(_check_point(sigma, L))
    return (v > 0) - (v < 0)


@dataclass(frozen=True)
class TerminatorSystem:
    surface: MultiPoly
    polar: MultiPoly
    dimension: int

    @classmethod
    def build(cls, sigma: MultiPoly, L) -> "TerminatorSystem":
        return cls(sigma, first_polar(sigma, L), len(sigma.ring))


# -- tangent cone / pencil ---------------------------------------------------------------------


@dataclass
class ConeResult:
    theta: MultiPoly
    backend: str
    basis: list = field(default_factory=list)
    seconds: float = 0.0


def _aux_ring(ring):
    qs = tuple(f"q{i + 1}" for i in range(len(ring)))
    return ring + qs + ("a",), qs


def _incidence_system(sigma, polar, L):
    ring = sigma.ring
    big, qs = _aux_ring(ring)
    images = {v: MultiPoly.variable(big, q) for v, q in zip(ring, qs)}
    s_q = sigma.compose(images, big)
    p_q = polar.compose(images, big)
    a = MultiPoly.variable(big, "a")
    lines = [a.scale(Li) + (1 - a) * MultiPoly.variable(big, q) - MultiPoly.variable(big, v)
             for v, q, Li in zip(ring, qs, L)]
    return [s_q, p_q] + lines, qs + ("a",)


def _theta_from_basis(gens: list, ring) -> MultiPoly:
    if any(g.is_constant() for g in gens):
        raise NoConeError("the incidence system is inconsistent: no tangent lines from the pole")
    if not gens:
        raise NoConeError("the elimination ideal is zero")
    dmin = min(g.degree for g in gens)
    prod = MultiPoly.constant(ring, 1)
    for g in gens:
        if g.degree == dmin:
            prod = prod * g
    return squarefree_part(prod).canonical()


def cone_by_groebner(sigma, polar, L, **guards) -> ConeResult:
    """Eliminate the tangency point and line parameter from the incidence system.

    ``polar`` may be any second polynomial: with another surface in its place
    the result is the cone over the intersection of the two.
    """
    gens, drop = _incidence_system(sigma, polar, L)
    gb = eliminate(gens, drop, **guards)
    basis = [g.embed(sigma.ring) for g in gb.generators]
    return ConeResult(_theta_from_basis(basis, sigma.ring), "groebner", basis)


def _pull_back(p: MultiPoly, L, ring_a):
    """``(1-a)^deg p * p((X - aL)/(1-a))`` in the ring of X and a."""
    hom = p.homogenize("w")
    a = MultiPoly.variable(ring_a, "a")
    images = {v: MultiPoly.variable(ring_a, v) - a.scale(Li) for v, Li in zip(p.ring, L)}
    images["w"] = 1 - a
    return hom.compose(images, ring_a)


def cone_by_resultant(sigma, polar, L, deadline=None) -> ConeResult:
    """Cone via one resultant in the line parameter.

    Eliminating each tangency coordinate against its linear incidence
    equation amounts to the substitution ``q = (X - aL)/(1-a)``; what is left
    is ``Res_a`` of the two pulled-back polynomials.  Factors supported at
    ``a = 1`` (points at infinity) are spurious and get divided out.
    """
    ring = sigma.ring
    ring_a = ring + ("a",)
    one_minus_a = MultiPoly.constant(ring_a, 1) - MultiPoly.variable(ring_a, "a")
    F = remove_factor(_pull_back(sigma, L, ring_a), one_minus_a)
    G = remove_factor(_pull_back(polar, L, ring_a), one_minus_a)
    if G.is_constant():
        raise NoConeError("the polar is constant: no tangent lines from the pole")
    if F.degree_in("a") < 1 or G.degree_in("a") < 1:
        raise NoConeError("pulled-back system does not involve the line parameter")
    R = sylvester_resultant(F, G, "a", deadline=deadline).embed(ring)
    if R.is_zero():
        raise SharedComponentError("surface and polar share a component")
    spurious = gcd(F.subs({"a": 1}).embed(ring), G.subs({"a": 1}).embed(ring))
    if not spurious.is_constant():
        R = remove_factor(R, squarefree_part(spurious))
    if R.is_constant():
        raise NoConeError("no tangent lines from the pole")
    return ConeResult(squarefree_part(R).canonical(), "resultant", [R.canonical()])


def compute_tangent_cone(sigma: MultiPoly, L, *, backend: str = "auto",
                         max_basis: int = 5000, max_pairs: int = 20000,
                         max_steps: int | None = 2_000_000,
                         time_budget: float | None = None) -> ConeResult:
    """Tangent cone (3-D) or tangent pencil (2-D) of ``sigma`` from ``L``.

    ``backend`` is ``"groebner"``, ``"resultant"`` or ``"auto"`` (Gröbner
    first, resultant when a resource guard trips).
    """
    L = _check_point(sigma, L)
    polar = first_polar(sigma, L)
    if polar.is_constant():
        raise NoConeError("the polar is a nonzero constant: no tangent lines from the pole")
    t0 = time.perf_counter()
    if backend in ("auto", "groebner"):
        try:
            res = cone_by_groebner(sigma, polar, L, max_basis=max_basis, max_pairs=max_pairs,
                                   max_steps=max_steps, time_budget=time_budget)
            res.seconds = time.perf_counter() - t0
            return res
        except ResourceLimitError as exc:
            if backend == "groebner":
                raise
            log.info("Gröbner elimination aborted (%s); using resultants", exc)
    elif backend != "resultant":
        raise ValueError(f"unknown elimination backend {backend!r}")
    res = cone_by_resultant(sigma, polar, L)
    res.seconds = time.perf_counter() - t0
    return res


def tangent_cone(sigma: MultiPoly, L, **kw) -> MultiPoly:
    return compute_tangent_cone(sigma, L, **kw).theta


def _pair_cone(f, g, L, backend, guards):
    if backend in ("auto", "groebner"):
        try:
            return cone_by_groebner(f, g, L, **guards).theta
        except ResourceLimitError:
            if backend == "groebner":
                raise
    return cone_by_resultant(f, g, L).theta


def product_cone(factors: Sequence, L, *, backend: str = "auto", max_basis: int = 5000,
                 max_pairs: int = 20000, max_steps: int | None = 2_000_000,
                 time_budget: float | None = None) -> ConeResult:
    """Cone of a product surface assembled from its factors.

    On the product, the polar meets the surface along each factor's own
    terminator and along the pairwise intersections (singular points of the
    product).  The cone is therefore the squarefree product of the factor
    cones and of the cones over pairwise intersections, which keeps every
    elimination at the size of the factors.
    """
    factors = [f for f in factors if not f.is_constant()]
    if not factors:
        raise NoConeError("no surfaces")
    ring = factors[0].ring
    L = _check_point(factors[0], L)
    guards = dict(max_basis=max_basis, max_pairs=max_pairs, max_steps=max_steps,
                  time_budget=time_budget)
    t0 = time.perf_counter()
    parts = []
    used = set()
    for f in factors:
        try:
            r = compute_tangent_cone(f, L, backend=backend, **guards)
        except NoConeError:
            continue
        parts.append(r.theta)
        used.add(r.backend)
    for i, f in enumerate(factors):
        for g in factors[i + 1:]:
            try:
                parts.append(_pair_cone(f, g, L, backend, guards))
            except (NoConeError, SharedComponentError):
                continue
    if not parts:
        raise NoConeError("no tangent lines from the pole")
    theta = squarefree_part(product(parts, ring)).canonical()
    name = "+".join(sorted(used)) or backend
    return ConeResult(theta, f"factored/{name}", parts, time.perf_counter() - t0)


# -- exact points on curves and surfaces ------------------------------------------------------------


class SurfacePoint:
    """A point whose coordinates are ``num_i(t) / den(t)`` at a real algebraic ``t``.

    Rational points use constant numerators.  A point on the ray from ``O``
    towards ``T`` at a root of the restricted surface polynomial has
    ``num_i = O_i + t (T_i - O_i)`` and ``den = 1``.
    """

    __slots__ = ("param", "nums", "den", "rational", "_pows")

    def __init__(self, param: RealAlgebraic, nums, den=None):
        self.param = param
        self.nums = [dense.strip(n) for n in nums]
        self.den = dense.strip(den) if den is not None else [mpq(1)]
        self.rational = None
        if param.is_rational:
            t = param.exact
            d = dense.evaluate(self.den, t)
            self.rational = tuple(dense.evaluate(n, t) / d for n in self.nums)
        self._pows = None

    @classmethod
    def at(cls, P) -> "SurfacePoint":
        P = [QQ(c) for c in P]
        return cls(RealAlgebraic.rational(0), [[c] if c else [] for c in P])

    @classmethod
    def on_ray(cls, origin, target, root) -> "SurfacePoint":
        """``origin + t (target - origin)``; ``root`` is a RealAlgebraic or interval."""
        O = [QQ(c) for c in origin]
        T = [QQ(c) for c in target]
        return cls(root, [[o, t - o] for o, t in zip(O, T)])

    @property
    def dimension(self) -> int:
        return len(self.nums)

    @property
    def is_rational(self) -> bool:
        return self.rational is not None

    def coords_at(self, t) -> tuple:
        d = dense.evaluate(self.den, t)
        return tuple(dense.evaluate(n, t) / d for n in self.nums)

    def to_floats(self) -> tuple:
        if self.rational is not None:
            return tuple(float(c) for c in self.rational)
        t = self.param
        t.to_float()
        mid = (t.lo + t.hi) / 2
        return tuple(float(c) for c in self.coords_at(mid))

    def _power(self, i, k):
        if self._pows is None:
            self._pows = {}
        key = (i, k)
        v = self._pows.get(key)
        if v is None:
            base = self.den if i < 0 else self.nums[i]
            v = dense.power(base, k)
            self._pows[key] = v
        return v

    def compose(self, p: MultiPoly) -> list:
        """Dense polynomial ``den(t)^deg p * p(X(t))``."""
        if len(p.ring) != len(self.nums):
            raise ContextError("point dimension does not match the polynomial ring")
        D = p.degree
        if D < 0:
            return []
        if self.den == [1] and all(len(n) <= 2 for n in self.nums):
            O = [n[0] if n else mpq(0) for n in self.nums]
            T = [o + (n[1] if len(n) > 1 else 0) for o, n in zip(O, self.nums)]
            if O != T:
                return p.restrict_dense(O, T)
        out = []
        for e, c in p.terms.items():
            acc = [c]
            for i, k in enumerate(e):
                if k:
                    acc = dense.mul(acc, self._power(i, k))
            pad = D - sum(e)
            if pad and self.den != [1]:
                acc = dense.mul(acc, self._power(-1, pad))
            out = dense.add(out, acc)
        return out

    def sign_of(self, p: MultiPoly) -> int:
        """Exact sign of ``p`` at this point."""
        if self.rational is not None:
            v = p.evaluate(self.rational)
            return (v > 0) - (v < 0)
        s = self.param.sign_of(self.compose(p))
        if s and p.degree % 2 and self.den != [1]:
            s *= self.param.sign_of(self.den)
        return s

    def toward(self, L, fraction) -> "SurfacePoint":
        """The point ``L + fraction * (X - L)`` sharing this point's parameter."""
        L = [QQ(c) for c in L]
        f = QQ(fraction)
        g = 1 - f
        nums = [dense.add(dense.scale(self.den, g * Li), dense.scale(n, f))
                for Li, n in zip(L, self.nums)]
        return SurfacePoint(self.param, nums, self.den)

    def __repr__(self):
        return f"SurfacePoint({', '.join(f'{c:.9g}' for c in self.to_floats())})"


# -- shadow test and classification -----------------------------------------------------------------


def _count_segment(sigma: MultiPoly, L, X, upper, closed: bool):
    """Roots of sigma on the segment parameter range (0, upper] or (0, upper)."""
    q = sigma.restrict_dense(L, X)
    if not q:
        return None
    if len(q) == 1:
        return 0
    a = _sqfree_ints(q)
    n = _chain(a).count(mpq(0), upper)
    if not closed and sign_at(a, upper) == 0:
        n -= 1
    return n


def shadow_test(sigma: MultiPoly, L, X, *, eps=DEFAULT_EPS,
                budget: int = DEFAULT_BUDGET) -> ShadowResult:
    """Does the open segment from ``L`` to ``X`` meet the surface?

    A rational ``X`` is tested exactly on the open parameter interval (0, 1).
    For an algebraic ``X`` the parameter enclosure is refined until the count
    on (0, 1-eps] is the same at both enclosure ends and the surface does not
    pass through the cut-off point ``L + (1-eps)(X-L)`` anywhere in between;
    otherwise the answer is ``GRAZING`` after ``budget`` bisections.
    Roots are counted without multiplicity, so a tangential touch blocks.
    """
    L = _check_point(sigma, L)
    if not isinstance(X, SurfacePoint):
        X = SurfacePoint.at(X)
    if X.rational is not None:
        if X.rational == L:
            return ShadowResult.UNBLOCKED
        n = _count_segment(sigma, L, X.rational, mpq(1), closed=False)
        if n is None:
            return ShadowResult.GRAZING
        return ShadowResult.BLOCKED if n else ShadowResult.UNBLOCKED
    eps = QQ(eps)
    t = X.param
    scale = max(abs(t.lo), abs(t.hi), mpq(1))
    t.refine(eps * scale / 1024)
    cut = X.toward(L, 1 - eps)
    c = cut.compose(sigma)
    if not c:
        return ShadowResult.GRAZING
    ci = _sqfree_ints(c) if len(c) > 1 else None
    cchain = _chain(ci) if ci else None
    upper = 1 - eps
    for _ in range(budget + 1):
        if t.is_rational:
            return shadow_test(sigma, L, SurfacePoint.at(X.coords_at(t.exact)), eps=eps, budget=0)
        lo, hi = t.lo, t.hi
        if ci is None or (sign_at(ci, lo) != 0 and cchain.count(lo, hi) == 0):
            n_lo = _count_segment(sigma, L, X.coords_at(lo), upper, closed=True)
            n_hi = _count_segment(sigma, L, X.coords_at(hi), upper, closed=True)
            if n_lo is not None and n_lo == n_hi:
                return ShadowResult.BLOCKED if n_lo else ShadowResult.UNBLOCKED
        t.bisect_once()
    return ShadowResult.GRAZING


def classify_point(sigma: MultiPoly, polar: MultiPoly, L, X, *, eps=DEFAULT_EPS,
                   budget: int = DEFAULT_BUDGET) -> RegionLabel:
    """Label of the surface point ``X`` under a point light at ``L``."""
    if not isinstance(X, SurfacePoint):
        X = SurfacePoint.at(X)
    side = polar_side(sigma, L)
    s = X.sign_of(polar)
    if s == 0:
        return RegionLabel.BOUNDARY
    if side and s != side:
        return RegionLabel.POLAR_SEPARATED
    res = shadow_test(sigma, L, X, eps=eps, budget=budget)
    if res is ShadowResult.UNBLOCKED:
        return RegionLabel.ILLUMINATED
    if res is ShadowResult.BLOCKED:
        return RegionLabel.SELF_SHADED
    return RegionLabel.BOUNDARY


# -- 2-D tangent points -----------------------------------------------------------------------------


@dataclass
class TangentPoint:
    point: SurfacePoint
    singular: bool

    def line_direction(self, L) -> tuple:
        x, y = self.point.to_floats()
        return (x - float(L[0]), y - float(L[1]))


def _sheared(p: MultiPoly, c) -> MultiPoly:
    # p(u - c*y, y) written in the ring (x, y) with x standing for u
    x, y = MultiPoly.gens(p.ring)
    return p.compose({"x": x - y.scale(c), "y": y}, p.ring)


def _univariate(p: MultiPoly, var="x") -> list:
    return p.to_dense(var) if not p.is_constant() else ([p.constant_term()] if p else [])


def curve_intersections(f: MultiPoly, g: MultiPoly) -> list:
    """Real common zeros of two plane curves without a common component.

    Returns :class:`SurfacePoint` values ``(x(u), y(u))`` at real roots ``u``
    of a resultant; a shear ``x -> x - c y`` is applied until both curves are
    monic-like in ``y`` and every fibre carries a single intersection.
    """
    if f.ring != g.ring or len(f.ring) != 2:
        raise ContextError("curve intersections need two polynomials in the plane")
    if f.is_zero() or g.is_zero():
        raise SharedComponentError("zero polynomial has every point in common")
    if f.is_constant() or g.is_constant():
        return []
    if not gcd(f, g).is_constant():
        raise SharedComponentError("the curves share a component")
    for c in _shears():
        P, Q = _sheared(f, c), _sheared(g, c)
        if not (P.leading_coefficient_in("y").is_constant()
                and Q.leading_coefficient_in("y").is_constant()):
            continue
        if P.degree_in("y") < 1 or Q.degree_in("y") < 1:
            continue
        R = _univariate(sylvester_resultant(P, Q, "y"))
        if not R:
            raise SharedComponentError("the curves share a component")
        if len(R) == 1:
            return []
        if Q.degree_in("y") > P.degree_in("y"):
            P, Q = Q, P
        if Q.degree_in("y") == 1:
            cs = Q.coefficients_in("y")
            s1 = _univariate(cs[1])
            s0 = _univariate(cs.get(0, MultiPoly.zero(Q.ring)))
        else:
            s0, s1 = (_univariate(v) for v in subresultant(P, Q, "y", 1))
        roots = real_roots(R)
        if any(r.sign_of(s1) == 0 for r in roots):
            continue
        out = []
        c = QQ(c)
        for r in roots:
            # y = -s0/s1, x = u - c*y = (u*s1 + c*s0)/s1
            xn = dense.add(dense.mul([mpq(0), mpq(1)], s1), dense.scale(s0, c))
            yn = dense.neg(s0)
            out.append(SurfacePoint(r, [xn, yn], s1))
        return out
    raise GeometryError("no admissible shear found")


def _shears():
    yield 0
    k = 1
    while k < 64:
        yield k
        yield -k
        k += 1


def tangent_pencil_2d(gamma: MultiPoly, L, **cone_kw):
    """Tangent/singular points of ``gamma`` seen from ``L`` and the pencil polynomial.

    The pencil is the product of all tangent lines through ``L`` (over the
    complex numbers, so it is rational) computed by the cone elimination.
    """
    if len(gamma.ring) != 2:
        raise ContextError("tangent_pencil_2d needs a plane curve")
    L = _check_point(gamma, L)
    polar = first_polar(gamma, L)
    pts = curve_intersections(gamma, polar)
    grad = gamma.gradient()
    tangents = [TangentPoint(p, all(p.sign_of(g) == 0 for g in grad)) for p in pts]
    try:
        pencil = tangent_cone(gamma, L, **cone_kw)
    except NoConeError:
        pencil = MultiPoly.constant(gamma.ring, 1)
    return tangents, pencil
