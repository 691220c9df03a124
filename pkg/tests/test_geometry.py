import random

import pytest
import sympy
from gmpy2 import mpq

from conftest import to_sympy
from illumination.geometry import (NoConeError, RegionLabel, ShadowResult, SingularPoleError,
                                   SurfacePoint, TerminatorSystem, classify_point,
                                   compute_tangent_cone, curve_intersections, first_polar,
                                   polar_side, product_cone, shadow_test, tangent_pencil_2d)
from illumination.parser import parse_polynomial
from illumination.poly import MultiPoly, QQ, canonicalize
from illumination.realroots import real_roots

XY = ("x", "y")
XYZ = ("x", "y", "z")


def P(text, ring=XY):
    return parse_polynomial(text, ring)


SPHERE = P("x^2 + y^2 + z^2 - 1", XYZ)
CIRCLE = P("x^2 + y^2 - 1")
FOLIUM = P("x^3 + y^3 - 6*x*y")
CIRCLE_FOLIUM = P("((x - 1)^2 + (y - 3)^2 - 1)*(x^3 + y^3 - 6*x*y)")
TWO_SPHERES = P("(x^2 + y^2 + z^2 - 1)*((x - 4)^2 + y^2 + z^2 - 1)", XYZ)


def circle_point(t):
    t = QQ(t)
    return ((1 - t * t) / (1 + t * t), 2 * t / (1 + t * t))


# -- polars ------------------------------------------------------------------


def test_polar_examples():
    quintic = P("x^2 + y^2 + z^4*(z - 1)", XYZ)
    assert canonicalize(first_polar(quintic, (1, 0, 2))) == canonicalize(P("2*x + 3*x^2 + 3*y^2 + z^3*(-8 + 9*z)", XYZ))
    assert canonicalize(first_polar(CIRCLE, (0, 2))) == P("2*y - 1")
    assert canonicalize(first_polar(FOLIUM, (4, 6))) == canonicalize(P("2*x^2 - x*(6 + y) + y*(-4 + 3*y)"))


def test_polar_by_hand_homogenization():
    # independent route: sympy gradient of the homogenized form
    x, y, z, w = sympy.symbols("x y z w")
    expr = to_sympy(SPHERE)
    hom = sympy.expand(w ** 2 * expr.subs({x: x / w, y: y / w, z: z / w}))
    L = (3, -1, 2)
    polar = sum(c * sympy.diff(hom, v) for c, v in zip(L + (1,), (x, y, z, w))).subs(w, 1)
    ours = first_polar(SPHERE, L)
    assert canonicalize(ours) == canonicalize(parse_polynomial(str(sympy.expand(polar)).replace("**", "^"), XYZ))


def test_singular_pole_rejected():
    with pytest.raises(SingularPoleError):
        first_polar(P("y^2 - x^3"), (0, 0))


def test_polar_degree_and_side_properties():
    rng = random.Random(11)
    done = 0
    while done < 100:
        terms = {}
        for _ in range(rng.randint(2, 6)):
            a = rng.randint(0, 4)
            terms[(a, rng.randint(0, 4 - a))] = rng.randint(-5, 5)
        sigma = MultiPoly(XY, terms)
        L = (QQ(rng.randint(-9, 9)) / rng.randint(1, 4), QQ(rng.randint(-9, 9)) / rng.randint(1, 4))
        if sigma.degree < 1 or sigma.evaluate(L) == 0:
            continue
        polar = first_polar(sigma, L)
        if sigma.degree > 1:
            assert polar.degree == sigma.degree - 1
        assert (polar.evaluate(L) > 0) == (sigma.evaluate(L) > 0)
        done += 1


def test_polar_side_of_product_curve():
    assert [polar_side(CIRCLE_FOLIUM, L) for L in ((4, 6), (1, QQ("1/2")), (0, 3))] == [1, -1, 0]


def test_terminator_system():
    ts = TerminatorSystem.build(SPHERE, (0, 0, 2))
    assert ts.dimension == 3 and ts.polar.degree == ts.surface.degree - 1


# -- cones and pencils -------------------------------------------------------


@pytest.mark.parametrize("backend", ["groebner", "resultant"])
def test_sphere_cone(backend):
    cone = compute_tangent_cone(SPHERE, (0, 0, 2), backend=backend)
    assert cone.theta == canonicalize(P("(z - 2)^2 - 3*(x^2 + y^2)", XYZ))


def test_sphere_cone_vanishes_on_tangent_lines():
    # L = (0, 0, 5/3) touches the unit sphere along z = 3/5, x^2 + y^2 = 16/25
    L = (0, 0, QQ("5/3"))
    theta = compute_tangent_cone(SPHERE, L).theta
    for k in range(20):
        cx, cy = circle_point(mpq(k - 10, 7))
        Q = (QQ("4/5") * cx, QQ("4/5") * cy, QQ("3/5"))
        assert SPHERE.evaluate(Q) == 0 and first_polar(SPHERE, L).evaluate(Q) == 0
        for a in (QQ(-2), QQ("-1/3"), QQ("1/5"), QQ("1/2"), QQ("7/4")):
            X = tuple(a * l + (1 - a) * q for l, q in zip(L, Q))
            assert theta.evaluate(X) == 0


def test_quintic_cone_vanishes_on_algebraic_tangent_lines():
    sigma = P("x^2 + y^2 + z^4*(z - 1)", XYZ)
    L = (1, 0, 2)
    theta = compute_tangent_cone(sigma, L).theta
    polar = first_polar(sigma, L)
    # terminator points in the plane y = 0, as algebraic points in (x, z)
    flat = {"x": P("x"), "y": MultiPoly.zero(XY), "z": P("y")}
    pts = curve_intersections(sigma.compose(flat, XY), polar.compose(flat, XY))
    assert pts
    for q in pts:
        Q = SurfacePoint(q.param, [q.nums[0], [], q.nums[1]], q.den)
        assert Q.sign_of(sigma) == 0 and Q.sign_of(polar) == 0
        for a in (QQ(-1), QQ("1/3"), QQ("1/2"), QQ("3/2"), QQ(4)):
            assert Q.toward(L, 1 - a).sign_of(theta) == 0
    assert theta.evaluate((0, 0, QQ("1/2"))) != 0


def test_cone_from_sphere_center_is_rejected():
    assert first_polar(SPHERE, (0, 0, 0)) == MultiPoly.constant(XYZ, -1)
    with pytest.raises(NoConeError):
        compute_tangent_cone(SPHERE, (0, 0, 0))


def test_backends_agree_on_an_ellipsoid():
    E = P("x^2/4 + y^2/2 + 3*z^2 - 3", XYZ)
    L = (-7, 0, 3)
    assert compute_tangent_cone(E, L, backend="groebner").theta == \
        compute_tangent_cone(E, L, backend="resultant").theta


def test_product_cone_matches_direct_elimination():
    L = (4, 6)
    parts = [P("(x - 1)^2 + (y - 3)^2 - 1"), FOLIUM]
    assert product_cone(parts, L).theta == compute_tangent_cone(CIRCLE_FOLIUM, L, backend="groebner").theta


def test_circle_pencil():
    pts, pencil = tangent_pencil_2d(CIRCLE, (0, 2))
    assert pencil == canonicalize(P("(y - 2)^2 - 3*x^2"))
    coords = sorted(p.point.to_floats() for p in pts)
    assert len(coords) == 2
    assert abs(coords[0][0] + 3 ** 0.5 / 2) < 1e-12 and abs(coords[1][0] - 3 ** 0.5 / 2) < 1e-12
    assert all(abs(c[1] - 0.5) < 1e-12 for c in coords)


def test_parabola_pencil():
    pts, pencil = tangent_pencil_2d(P("y - x^2"), (0, -1))
    assert pencil == canonicalize(P("(y - 2*x + 1)*(y + 2*x + 1)"))
    assert sorted(p.point.rational for p in pts) == [(-1, 1), (1, 1)]


def test_folium_tangent_points_match_exact_solver():
    L = (4, 6)
    pts, _ = tangent_pencil_2d(FOLIUM, L)
    x, y = sympy.symbols("x y")
    polar = first_polar(FOLIUM, L)
    # lex basis is in shape position here, so real x-roots count real points
    basis = sympy.groebner([to_sympy(FOLIUM), to_sympy(polar)], y, x, order="lex")
    assert sympy.degree(basis.exprs[0], y) == 1
    real = set(sympy.real_roots(sympy.Poly(basis.exprs[-1], x)))
    assert len(pts) == len(real) == 3
    assert sum(1 for p in pts if p.singular) == 1
    for p in pts:
        assert p.point.sign_of(FOLIUM) == 0 and p.point.sign_of(polar) == 0


def test_intersections_are_exact_on_both_curves():
    f, g = P("x^2 + 2*y^2 - 3"), P("x*y - 1/2 + x^3")
    for p in curve_intersections(f, g):
        assert p.sign_of(f) == 0 and p.sign_of(g) == 0


# -- shadow test and classification ------------------------------------------


def test_shadow_examples():
    assert shadow_test(SPHERE, (0, 0, 2), (0, 0, 1)) is ShadowResult.UNBLOCKED
    assert shadow_test(TWO_SPHERES, (-4, 0, 0), (3, 0, 0)) is ShadowResult.BLOCKED
    # light on the curve itself: the root at the light is excluded
    assert shadow_test(CIRCLE, (1, 0), (0, 1)) is ShadowResult.UNBLOCKED


def test_shadow_roots_of_two_sphere_segment():
    first = SPHERE.restrict_dense((-4, 0, 0), (3, 0, 0))
    # (-4 + 7a)^2 - 1 has roots 3/7 and 5/7
    assert first == [15, -56, 49]


def test_classification_examples():
    L = (0, 0, 2)
    polar = first_polar(SPHERE, L)
    assert classify_point(SPHERE, polar, L, (0, 0, 1)) is RegionLabel.ILLUMINATED
    assert classify_point(SPHERE, polar, L, (0, 0, -1)) is RegionLabel.POLAR_SEPARATED
    L2 = (-4, 0, 0)
    polar2 = first_polar(TWO_SPHERES, L2)
    # polar by the product rule: s1*(s2)_L + s2*(s1)_L at X = (3, 0, 0) is 8*7 + 0
    assert polar2.evaluate((3, 0, 0)) > 0
    assert classify_point(TWO_SPHERES, polar2, L2, (3, 0, 0)) is RegionLabel.SELF_SHADED


def test_polar_zero_gives_boundary():
    L = (0, 2)
    polar = first_polar(CIRCLE, L)
    # x^2 = 3/4 on the line y = 1/2, taken at its positive root
    X = SurfacePoint.on_ray((0, QQ("1/2")), (1, QQ("1/2")), real_roots([QQ("-3/4"), 0, 1])[1])
    assert classify_point(CIRCLE, polar, L, X) is RegionLabel.BOUNDARY


def test_classification_is_scale_invariant():
    L = (QQ("1/3"), QQ("5/2"))
    for c in (QQ(3), QQ("2/7")):
        scaled = CIRCLE.scale(c)
        for k in range(-12, 13):
            X = circle_point(mpq(k, 4))
            a = classify_point(CIRCLE, first_polar(CIRCLE, L), L, X)
            b = classify_point(scaled, first_polar(scaled, L), L, X)
            assert a is b


def test_algebraic_points_on_rays():
    # ray hits on the unit sphere from outside, compared with rational hits
    L = (0, 0, 2)
    polar = first_polar(SPHERE, L)
    eye = (QQ(5), QQ(0), QQ("1/2"))
    for k in range(-4, 5):
        target = (QQ(0), mpq(k, 10), mpq(k, 7))
        roots = [r for r in real_roots(SPHERE.restrict_dense(eye, target)) if r > 0]
        X = SurfacePoint.on_ray(eye, target, roots[0])
        z = X.to_floats()[2]
        want = RegionLabel.ILLUMINATED if z > 0.5 else RegionLabel.POLAR_SEPARATED
        assert classify_point(SPHERE, polar, L, X) is want
