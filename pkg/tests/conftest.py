from pathlib import Path

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import HealthCheck, settings

from illumination.poly import MultiPoly

settings.register_profile("repo", deadline=None, suppress_health_check=[HealthCheck.too_slow],
                          max_examples=60, derandomize=True)
settings.load_profile("repo")

SCENES = Path(__file__).resolve().parent.parent / "examples" / "scenes"


@pytest.fixture
def scenes() -> Path:
    return SCENES


def to_sympy(p: MultiPoly):
    syms = sympy.symbols(p.ring)
    expr = sympy.Integer(0)
    for e, c in p.terms.items():
        term = sympy.Rational(int(c.numerator), int(c.denominator))
        for s, k in zip(syms, e):
            term *= s ** k
        expr += term
    return expr


def from_sympy(expr, ring) -> MultiPoly:
    poly = sympy.Poly(sympy.expand(expr), *sympy.symbols(ring))
    terms = {}
    for mono, c in poly.terms():
        c = sympy.Rational(c)
        terms[tuple(mono)] = mpq(int(c.p), int(c.q))
    return MultiPoly(ring, terms)


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
