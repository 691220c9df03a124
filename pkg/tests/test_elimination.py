import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from conftest import from_sympy, to_sympy
from illumination.elimination import (GREVLEX, LEX, MonomialOrder, PolySystem, PreconditionError,
                                      ResourceLimitError, buchberger, eliminate, is_groebner,
                                      normal_form, subresultant, sylvester_resultant)
from illumination.parser import parse_polynomial
from illumination.poly import MultiPoly, QQ, canonicalize
from illumination.polygcd import squarefree_part

TXY = ("t", "x", "y")


def P(text, ring=("x", "y")):
    return parse_polynomial(text, ring)


def canon_set(polys):
    return sorted(str(canonicalize(p)) for p in polys)


def random_monic_pair(rng: random.Random):
    """Two polynomials in (t, x), monic in t, with small integer coefficients."""
    ring = ("t", "x")

    def one():
        dt = rng.randint(1, 3)
        terms = {(dt, 0): 1}
        for _ in range(rng.randint(1, 4)):
            a = rng.randint(0, dt - 1)
            b = rng.randint(0, 4 - a)
            terms[(a, b)] = terms.get((a, b), 0) + rng.randint(-3, 3)
        return MultiPoly(ring, terms)

    return one(), one()


# -- normal form -------------------------------------------------------------


def test_normal_form_examples():
    x = P("x")
    assert normal_form(P("x^2"), [x], LEX).is_zero()
    assert normal_form(P("x^2 + y"), [x], LEX) == P("y")
    gens = [P("x - t^2", TXY), P("y - t^3", TXY)]
    gb = buchberger(gens, MonomialOrder.block(TXY, ["t"]))
    assert normal_form(P("y^2 - x^3", TXY), gb).is_zero()


# -- Buchberger --------------------------------------------------------------


def test_single_generator_basis():
    assert canon_set(buchberger([P("x")])) == ["x"]


def test_cuspidal_cubic_basis():
    gens = [P("x - t^2", TXY), P("y - t^3", TXY)]
    gb = buchberger(gens, MonomialOrder.block(TXY, ["t"]))
    assert str(canonicalize(P("y^2 - x^3", TXY))) in canon_set(gb)
    for g in gens:
        assert normal_form(g, gb).is_zero()


def test_circle_and_line_basis():
    gb = buchberger([P("x^2 + y^2 - 1"), P("y - 1/2")], GREVLEX)
    leads = sorted(g.leading_term(GREVLEX.key)[0] for g in gb)
    assert leads == [(0, 1), (2, 0)]
    assert canon_set(gb) == canon_set([P("y - 1/2"), P("x^2 - 3/4")])
    assert is_groebner(gb)


def test_basis_matches_sympy_on_fixed_systems():
    cases = [
        ["x^2*y - 1", "x*y^2 - x"],
        ["x^3 - 2*x*y", "x^2*y - 2*y^2 + x"],
        ["x^2 + y^2 - 4", "x*y - 1"],
    ]
    X, Y = sympy.symbols("x y")
    for texts in cases:
        ours = buchberger([P(t) for t in texts], GREVLEX)
        theirs = sympy.groebner([to_sympy(P(t)) for t in texts], X, Y, order="grevlex")
        assert canon_set(ours) == canon_set(from_sympy(g, ("x", "y")) for g in theirs.exprs)


@settings(max_examples=25)
@given(st.integers(0, 10 ** 6))
def test_random_bases_match_sympy(seed):
    rng = random.Random(seed)
    ring = ("x", "y")
    gens = []
    for _ in range(rng.randint(2, 3)):
        terms = {}
        for _ in range(rng.randint(1, 3)):
            a = rng.randint(0, 3)
            terms[(a, rng.randint(0, 3 - a))] = rng.randint(-3, 3)
        p = MultiPoly(ring, terms)
        if not p.is_zero():
            gens.append(p)
    if not gens:
        return
    X, Y = sympy.symbols("x y")
    ours = buchberger(gens, GREVLEX)
    theirs = sympy.groebner([to_sympy(g) for g in gens], X, Y, order="grevlex")
    assert canon_set(ours) == canon_set(from_sympy(g, ring) for g in theirs.exprs)


def test_criteria_toggle_gives_identical_basis():
    systems = [
        ([P("x - t^2", TXY), P("y - t^3", TXY)], MonomialOrder.block(TXY, ["t"])),
        ([P("x^2 + y^2 - 1"), P("x*y - 1/3"), P("x^3 - y")], GREVLEX),
        ([P("x^3 + y^3 - 6*x*y"), P("2*x^2 + 3*y^2 - x*y - 6*x - 4*y")], LEX),
    ]
    for gens, order in systems:
        with_c = buchberger(gens, order, criteria=True)
        without = buchberger(gens, order, criteria=False)
        assert canon_set(with_c) == canon_set(without)


def test_basis_is_order_stable():
    gens = [P("x^3 + y^3 - 6*x*y"), P("2*x^2 + 3*y^2 - x*y - 6*x - 4*y")]
    a = buchberger(gens, GREVLEX)
    b = buchberger(list(reversed(gens)), GREVLEX)
    assert [str(g) for g in a] == [str(g) for g in b]


def test_resource_guard():
    gens = [P("x^5 + y^4 - 3*x*y + 1"), P("x^4*y + y^5 - 2*x^2 + y")]
    with pytest.raises(ResourceLimitError):
        buchberger(gens, LEX, max_basis=2)


def test_zero_generator_rejected():
    with pytest.raises(ValueError):
        PolySystem([P("x"), MultiPoly.zero(("x", "y"))])


# -- elimination -------------------------------------------------------------


def test_eliminate_examples():
    out = eliminate([P("x - t^2", TXY), P("y - t^3", TXY)], ["t"])
    assert canon_set(out) == canon_set([P("y^2 - x^3")])
    ring = ("q", "x")
    out = eliminate([P("q - 1", ring), P("x - q", ring)], ["q"])
    assert canon_set(out) == ["x - 1"]
    assert all(p.ring == ("x",) for p in out)


def test_elimination_ideal_can_be_zero():
    out = eliminate([P("x - t", TXY)], ["t"])
    assert out.is_empty()


# -- resultants --------------------------------------------------------------


def test_resultant_examples():
    r = sylvester_resultant(P("x - t^2", TXY), P("y - t^3", TXY), "t")
    assert canonicalize(r) == canonicalize(P("y^2 - x^3"))
    r = sylvester_resultant(P("x^2 + y^2 - 1"), P("y - 1/2"), "y")
    assert canonicalize(r) == canonicalize(parse_polynomial("x^2 - 3/4", ("x",)))
    ring = ("x", "a", "b")
    r = sylvester_resultant(P("x - a", ring), P("x - b", ring), "x")
    assert canonicalize(r) == canonicalize(parse_polynomial("a - b", ("a", "b")))


def test_resultant_precondition():
    with pytest.raises(PreconditionError):
        sylvester_resultant(P("x + 1"), P("y^2 - x"), "y")


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6))
def test_resultant_matches_sympy(seed):
    f, g = random_monic_pair(random.Random(seed))
    T, X = sympy.symbols("t x")
    want = sympy.resultant(to_sympy(f), to_sympy(g), T)
    want = from_sympy(want, ("x",))
    # sympy's sign convention differs from the Sylvester determinant for some degree pairs
    for method in ("bareiss", "interpolate"):
        got = sylvester_resultant(f, g, "t", method=method)
        assert got == want or got == -want, method


def test_resultant_sign_follows_product_formula():
    # Res_t(t + c, g) = g(-c) when the first argument is monic and linear in t
    ring = ("t", "x")
    c = P("2*x^4 - x^3 + x^2", ring)
    f = P("t", ring) + c
    g = P("3*t*x^3 - 2*x^4 + t^3 + 3*t*x^2", ring)
    expected = g.compose({"t": -c, "x": P("x", ring)}, ring).embed(("x",))
    for method in ("bareiss", "interpolate"):
        assert sylvester_resultant(f, g, "t", method=method) == expected


def test_subresultant_recovers_common_root():
    # f and g share the root y = 2x; the first subresultant is linear in y
    ring = ("x", "y")
    f = P("(y - 2*x)*(y + 1)", ring)
    g = P("(y - 2*x)*(y - 3)", ring)
    s0, s1 = subresultant(f, g, "y", 1)
    x0 = QQ(5)
    y0 = -s0.evaluate((x0,)) / s1.evaluate((x0,))
    assert y0 == 2 * x0


def test_cross_backend_agreement_on_random_instances():
    rng = random.Random(20240601)
    checked = 0
    while checked < 10:
        f, g = random_monic_pair(rng)
        res = sylvester_resultant(f, g, "t")
        if res.is_zero() or res.is_constant():
            continue
        gens = eliminate([f, g], ["t"])
        assert len(gens) == 1
        assert canonicalize(squarefree_part(res)) == canonicalize(squarefree_part(gens.generators[0]))
        checked += 1
