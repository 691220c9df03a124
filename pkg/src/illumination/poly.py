"""Exact rationals and sparse multivariate polynomials.

Coefficients are ``gmpy2.mpq`` values.  A polynomial lives in a *ring*: an
ordered tuple of variable names.  Two polynomials can only be combined when
their rings are equal; use :meth:`MultiPoly.embed` to move between rings.
"""

from __future__ import annotations

import operator
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import gmpy2
from gmpy2 import mpq, mpz

Rational = mpq

#: Global variable order used by every ring built inside the package.
VARIABLE_ORDER = ("x", "y", "z", "q1", "q2", "q3", "a", "w")

_ZERO = mpq(0)
_ONE = mpq(1)


class ContextError(ValueError):
    """Raised when polynomials or points do not share a ring context."""


class DegenerateLineError(ValueError):
    """Raised when a line is requested through two identical points."""


def QQ(value) -> mpq:
    """Convert ``value`` to an exact rational.

    Accepts ints, ``Fraction``, ``mpq``/``mpz``, floats (converted exactly)
    and strings such as ``"3/4"``, ``"-2"`` or ``"0.125"``.
    """
    if isinstance(value, type(_ZERO)):
        return value
    if isinstance(value, (int, type(mpz(0)))):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, float):
        return mpq(Fraction(value))
    if isinstance(value, str):
        s = value.strip()
        if not s:
            raise ValueError("empty rational literal")
        try:
            return mpq(Fraction(s))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational literal: {value!r}") from exc
    return mpq(value)


def make_point(*coords) -> tuple:
    """Build a point (tuple of rationals) from numbers or a single sequence."""
    if len(coords) == 1 and isinstance(coords[0], (tuple, list)):
        coords = tuple(coords[0])
    return tuple(QQ(c) for c in coords)


def homogeneous(point: Sequence) -> tuple:
    """Cartesian point -> homogeneous coordinates with last entry 1."""
    return make_point(*point) + (_ONE,)


def cartesian(hpoint: Sequence) -> tuple:
    """Homogeneous point -> Cartesian point; the last coordinate must be nonzero."""
    hp = make_point(*hpoint)
    if all(c == 0 for c in hp):
        raise ValueError("the zero vector is not a projective point")
    w = hp[-1]
    if w == 0:
        raise ValueError("point at infinity has no Cartesian form")
    return tuple(c / w for c in hp[:-1])


def standard_ring(*names: str) -> tuple:
    """Return ``names`` sorted by the global variable order (unknown names last)."""
    def rank(n):
        return (VARIABLE_ORDER.index(n), "") if n in VARIABLE_ORDER else (len(VARIABLE_ORDER), n)
    return tuple(sorted(set(names), key=rank))


@lru_cache(maxsize=None)
def _index(ring: tuple) -> dict:
    return {name: i for i, name in enumerate(ring)}


def grevlex_key(e: tuple):
    """Sort key for graded reverse lexicographic order (larger key = larger monomial)."""
    return (sum(e), tuple(-k for k in reversed(e)))


def lex_key(e: tuple):
    return e


class MultiPoly:
    """Sparse polynomial with rational coefficients.

    ``terms`` maps exponent tuples (one entry per ring variable) to nonzero
    ``mpq`` coefficients.  Instances are treated as immutable.
    """

    __slots__ = ("ring", "terms", "_degree", "_hash")

    def __init__(self, ring: Iterable[str], terms: Mapping | None = None):
        ring = tuple(ring)
        n = len(ring)
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != n:
                raise ContextError(f"exponent {e} does not fit ring {ring}")
            if any(k < 0 for k in e):
                raise ValueError("negative exponent")
            c = QQ(c)
            if c:
                clean[e] = clean.get(e, _ZERO) + c
                if not clean[e]:
                    del clean[e]
        self.ring = ring
        self.terms = clean
        self._degree = None
        self._hash = None

    @classmethod
    def _raw(cls, ring: tuple, terms: dict) -> "MultiPoly":
        # trusted constructor: terms already clean
        p = cls.__new__(cls)
        p.ring = ring
        p.terms = terms
        p._degree = None
        p._hash = None
        return p

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, ring) -> "MultiPoly":
        return cls._raw(tuple(ring), {})

    @classmethod
    def constant(cls, ring, c) -> "MultiPoly":
        ring = tuple(ring)
        c = QQ(c)
        return cls._raw(ring, {(0,) * len(ring): c} if c else {})

    @classmethod
    def variable(cls, ring, name: str) -> "MultiPoly":
        ring = tuple(ring)
        try:
            i = _index(ring)[name]
        except KeyError:
            raise ContextError(f"unknown variable {name!r} for ring {ring}") from None
        e = [0] * len(ring)
        e[i] = 1
        return cls._raw(ring, {tuple(e): _ONE})

    @classmethod
    def gens(cls, ring) -> list:
        ring = tuple(ring)
        return [cls.variable(ring, v) for v in ring]

    @classmethod
    def from_dense(cls, coeffs: Sequence, var: str = "a", ring=None) -> "MultiPoly":
        """Univariate polynomial from low-to-high coefficients."""
        ring = tuple(ring) if ring is not None else (var,)
        i = _index(ring)[var]
        terms = {}
        for k, c in enumerate(coeffs):
            c = QQ(c)
            if c:
                e = [0] * len(ring)
                e[i] = k
                terms[tuple(e)] = c
        return cls._raw(ring, terms)

    # -- basic properties ---------------------------------------------------

    @property
    def nvars(self) -> int:
        return len(self.ring)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_term(self) -> mpq:
        return self.terms.get((0,) * len(self.ring), _ZERO)

    @property
    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        if self._degree is None:
            self._degree = max((sum(e) for e in self.terms), default=-1)
        return self._degree

    def degree_in(self, var) -> int:
        i = self._var_index(var)
        return max((e[i] for e in self.terms), default=-1)

    def __len__(self):
        return len(self.terms)

    def used_variables(self) -> tuple:
        used = [False] * len(self.ring)
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used[i] = True
        return tuple(v for v, u in zip(self.ring, used) if u)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def _var_index(self, var) -> int:
        if isinstance(var, int):
            if not 0 <= var < len(self.ring):
                raise ContextError(f"variable index {var} out of range for {self.ring}")
            return var
        try:
            return _index(self.ring)[var]
        except KeyError:
            raise ContextError(f"unknown variable {var!r} for ring {self.ring}") from None

    # -- ordering -------------------------------------------------------------

    def sorted_terms(self, key=grevlex_key) -> list:
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def leading_term(self, key=grevlex_key):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=key)
        return e, self.terms[e]

    def leading_coefficient(self, key=grevlex_key) -> mpq:
        return self.leading_term(key)[1] if self.terms else _ZERO

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.ring is not self.ring and other.ring != self.ring:
                raise ContextError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        try:
            return MultiPoly.constant(self.ring, other)
        except (TypeError, ValueError):
            return NotImplemented

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.ring == other.ring and self.terms == other.terms
        try:
            c = QQ(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.is_constant() and self.constant_term() == c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __neg__(self):
        return MultiPoly._raw(self.ring, {e: -c for e, c in self.terms.items()})

    def __pos__(self):
        return self

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        res = dict(a)
        for e, c in b.items():
            v = res.get(e)
            if v is None:
                res[e] = c
            else:
                v = v + c
                if v:
                    res[e] = v
                else:
                    del res[e]
        return MultiPoly._raw(self.ring, res)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        res = dict(self.terms)
        for e, c in other.terms.items():
            v = res.get(e)
            if v is None:
                res[e] = -c
            else:
                v = v - c
                if v:
                    res[e] = v
                else:
                    del res[e]
        return MultiPoly._raw(self.ring, res)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            try:
                c = QQ(other)
            except (TypeError, ValueError):
                return NotImplemented
            return self.scale(c)
        other = self._coerce(other)
        if not self.terms or not other.terms:
            return MultiPoly._raw(self.ring, {})
        if len(other.terms) == 1:
            (eb, cb), = other.terms.items()
            return self.mul_term(eb, cb)
        if len(self.terms) == 1:
            (ea, ca), = self.terms.items()
            return other.mul_term(ea, ca)
        res = {}
        get = res.get
        add = operator.add
        bitems = list(other.terms.items())
        for ea, ca in self.terms.items():
            for eb, cb in bitems:
                e = tuple(map(add, ea, eb))
                res[e] = get(e, _ZERO) + ca * cb
        return MultiPoly._raw(self.ring, {e: c for e, c in res.items() if c})

    __rmul__ = __mul__

    def scale(self, c) -> "MultiPoly":
        c = QQ(c)
        if not c:
            return MultiPoly._raw(self.ring, {})
        if c == 1:
            return self
        return MultiPoly._raw(self.ring, {e: v * c for e, v in self.terms.items()})

    def mul_term(self, mono: tuple, c) -> "MultiPoly":
        """Multiply by the single term ``c * X^mono``."""
        if not c:
            return MultiPoly._raw(self.ring, {})
        add = operator.add
        return MultiPoly._raw(
            self.ring, {tuple(map(add, e, mono)): v * c for e, v in self.terms.items()})

    def __truediv__(self, other):
        if isinstance(other, MultiPoly):
            if other.is_constant() and other:
                return self.scale(1 / other.constant_term())
            from .polygcd import exquo
            return exquo(self, other)
        c = QQ(other)
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        return self.scale(1 / c)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = MultiPoly.constant(self.ring, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- evaluation and substitution --------------------------------------------

    def evaluate(self, point: Sequence) -> mpq:
        """Exact value at ``point`` (one coordinate per ring variable)."""
        if len(point) != len(self.ring):
            raise ContextError(
                f"point of dimension {len(point)} for ring of arity {len(self.ring)}")
        pt = [QQ(c) for c in point]
        cache = [dict() for _ in pt]
        total = _ZERO
        for e, c in self.terms.items():
            v = c
            for i, k in enumerate(e):
                if k:
                    pw = cache[i].get(k)
                    if pw is None:
                        pw = cache[i][k] = pt[i] ** k
                    v = v * pw
            total += v
        return total

    __call__ = evaluate

    def subs(self, values: Mapping) -> "MultiPoly":
        """Partially evaluate; substituted variables stay in the ring with exponent 0."""
        idx = {self._var_index(v): QQ(c) for v, c in values.items()}
        res = {}
        for e, c in self.terms.items():
            v = c
            ne = list(e)
            for i, val in idx.items():
                if e[i]:
                    v = v * val ** e[i]
                    ne[i] = 0
            if v:
                ne = tuple(ne)
                res[ne] = res.get(ne, _ZERO) + v
        return MultiPoly._raw(self.ring, {e: c for e, c in res.items() if c})

    def compose(self, images: Mapping, ring) -> "MultiPoly":
        """Substitute each variable by a polynomial of ``ring``.

        ``images`` maps variable names of ``self.ring`` to polynomials (or
        constants) in ``ring``; unmapped variables must be absent from
        ``self`` or present in ``ring`` under the same name.
        """
        ring = tuple(ring)
        imgs = []
        for i, v in enumerate(self.ring):
            if v in images:
                im = images[v]
                if not isinstance(im, MultiPoly):
                    im = MultiPoly.constant(ring, im)
                elif im.ring != ring:
                    raise ContextError("image polynomial lives in a different ring")
                imgs.append(im)
            elif v in ring:
                imgs.append(MultiPoly.variable(ring, v))
            else:
                imgs.append(None)
        powers = [dict() for _ in imgs]
        result = MultiPoly.zero(ring)
        one = MultiPoly.constant(ring, 1)
        for e, c in self.terms.items():
            t = one
            for i, k in enumerate(e):
                if not k:
                    continue
                if imgs[i] is None:
                    raise ContextError(f"no image for variable {self.ring[i]!r}")
                pw = powers[i].get(k)
                if pw is None:
                    pw = powers[i][k] = imgs[i] ** k
                t = t * pw
            result = result + t.scale(c)
        return result

    def embed(self, ring) -> "MultiPoly":
        """Move into ``ring``; every variable actually used must exist there."""
        ring = tuple(ring)
        if ring == self.ring:
            return self
        target = _index(ring)
        used = self.used_variables()
        for v in used:
            if v not in target:
                raise ContextError(f"variable {v!r} not present in ring {ring}")
        pos = [(i, target[v]) for i, v in enumerate(self.ring) if v in target]
        n = len(ring)
        res = {}
        for e, c in self.terms.items():
            ne = [0] * n
            for i, j in pos:
                ne[j] = e[i]
            res[tuple(ne)] = c
        return MultiPoly._raw(ring, res)

    def drop(self, *names) -> "MultiPoly":
        return self.embed(tuple(v for v in self.ring if v not in names))

    # -- calculus -------------------------------------------------------------

    def diff(self, var) -> "MultiPoly":
        i = self._var_index(var)
        res = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                res[ne] = c * k
        return MultiPoly._raw(self.ring, res)

    def gradient(self) -> list:
        return [self.diff(i) for i in range(len(self.ring))]

    # -- projective helpers ------------------------------------------------------

    def homogenize(self, var: str = "w") -> "MultiPoly":
        """Append ``var`` and pad every term to the total degree."""
        if var in self.ring:
            raise ContextError(f"ring already contains {var!r}")
        ring = self.ring + (var,)
        d = self.degree
        return MultiPoly._raw(ring, {e + (d - sum(e),): c for e, c in self.terms.items()})

    def dehomogenize(self, var: str = "w") -> "MultiPoly":
        """Set ``var`` = 1 and drop it from the ring."""
        i = self._var_index(var)
        ring = self.ring[:i] + self.ring[i + 1:]
        res = {}
        for e, c in self.terms.items():
            ne = e[:i] + e[i + 1:]
            v = res.get(ne, _ZERO) + c
            if v:
                res[ne] = v
            else:
                res.pop(ne, None)
        return MultiPoly._raw(ring, res)

    def restrict_dense(self, A: Sequence, B: Sequence) -> list:
        """Coefficients (low to high) of ``self(A + a*(B - A))`` as a list of mpq."""
        n = len(self.ring)
        if len(A) != n or len(B) != n:
            raise ContextError("line endpoints do not match the ring arity")
        A = [QQ(c) for c in A]
        D = [QQ(b) - a for a, b in zip(A, B)]
        if not any(D):
            raise DegenerateLineError("line through two identical points")
        maxe = [0] * n
        for e in self.terms:
            for i, k in enumerate(e):
                if k > maxe[i]:
                    maxe[i] = k
        pows = []
        for i in range(n):
            lin = [A[i], D[i]]
            table = [[_ONE]]
            for _ in range(maxe[i]):
                prev = table[-1]
                nxt = [_ZERO] * (len(prev) + 1)
                for j, c in enumerate(prev):
                    nxt[j] += c * lin[0]
                    nxt[j + 1] += c * lin[1]
                table.append(nxt)
            pows.append(table)
        out = [_ZERO] * (self.degree + 1 if self.terms else 1)
        for e, c in self.terms.items():
            acc = [c]
            for i, k in enumerate(e):
                if k:
                    f = pows[i][k]
                    nxt = [_ZERO] * (len(acc) + len(f) - 1)
                    for j1, c1 in enumerate(acc):
                        if c1:
                            for j2, c2 in enumerate(f):
                                nxt[j1 + j2] += c1 * c2
                    acc = nxt
            for j, c1 in enumerate(acc):
                out[j] += c1
        while len(out) > 1 and not out[-1]:
            out.pop()
        if len(out) == 1 and not out[0]:
            return []
        return out

    def restrict_to_line(self, A: Sequence, B: Sequence, param: str = "a") -> "MultiPoly":
        """``self(A + param*(B - A))`` as a univariate polynomial in ``param``."""
        return MultiPoly.from_dense(self.restrict_dense(A, B), var=param)

    def to_dense(self, var=None) -> list:
        """Low-to-high coefficient list of a polynomial in at most one variable."""
        used = self.used_variables()
        if len(used) > 1 or (used and var is not None and used[0] != var):
            raise ContextError(f"polynomial is not univariate in {var!r}: uses {used}")
        i = self._var_index(used[0]) if used else 0
        out = [_ZERO] * (self.degree + 1) if self.terms else []
        for e, c in self.terms.items():
            out[e[i] if e else 0] = c
        return out

    def coefficients_in(self, var) -> dict:
        """Map ``k -> coefficient of var^k`` (coefficients keep the same ring)."""
        i = self._var_index(var)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            d = out.setdefault(k, {})
            d[e[:i] + (0,) + e[i + 1:]] = c
        return {k: MultiPoly._raw(self.ring, d) for k, d in out.items()}

    def leading_coefficient_in(self, var) -> "MultiPoly":
        d = self.degree_in(var)
        if d < 0:
            return MultiPoly.zero(self.ring)
        return self.coefficients_in(var)[d]

    # -- normalisation --------------------------------------------------------------

    def content(self) -> mpq:
        """Positive rational content: gcd of numerators over lcm of denominators."""
        if not self.terms:
            return _ZERO
        g = mpz(0)
        l = mpz(1)
        for c in self.terms.values():
            g = gmpy2.gcd(g, c.numerator)
            l = gmpy2.lcm(l, c.denominator)
        return mpq(g, l)

    def primitive(self) -> "MultiPoly":
        """Divide by the positive content (integer coefficients, gcd 1)."""
        if not self.terms:
            return self
        c = self.content()
        if c == 1:
            return self
        return self.scale(1 / c)

    def canonical(self, key=grevlex_key) -> "MultiPoly":
        """Primitive and with positive leading coefficient under ``key``."""
        if not self.terms:
            return self
        p = self.primitive()
        if p.leading_coefficient(key) < 0:
            p = -p
        return p

    def monic(self, key=grevlex_key) -> "MultiPoly":
        if not self.terms:
            return self
        return self.scale(1 / self.leading_coefficient(key))

    # -- text -------------------------------------------------------------------------

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"MultiPoly({to_text(self)!r}, ring={self.ring!r})"


def canonicalize(p: MultiPoly, key=grevlex_key) -> MultiPoly:
    """Strip rational content and make the leading coefficient positive."""
    return p.canonical(key)


def _format_rational(c: mpq) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def to_text(p: MultiPoly) -> str:
    """Canonical text form: grevlex-descending terms, ``c*x^a*y^b`` syntax."""
    if not p.terms:
        return "0"
    parts = []
    for e, c in p.sorted_terms():
        factors = []
        for name, k in zip(p.ring, e):
            if k == 1:
                factors.append(name)
            elif k > 1:
                factors.append(f"{name}^{k}")
        mag = abs(c)
        if not factors:
            body = _format_rational(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = _format_rational(mag) + "*" + "*".join(factors)
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


def product(polys: Iterable[MultiPoly], ring=None) -> MultiPoly:
    polys = list(polys)
    if not polys:
        if ring is None:
            raise ValueError("empty product needs an explicit ring")
        return MultiPoly.constant(ring, 1)
    out = polys[0]
    for p in polys[1:]:
        out = out * p
    return out


def restrict_to_line(p: MultiPoly, A: Sequence, B: Sequence, param: str = "a") -> MultiPoly:
    return p.restrict_to_line(A, B, param)


def homogenize(p: MultiPoly, var: str = "w") -> MultiPoly:
    return p.homogenize(var)


def dehomogenize(p: MultiPoly, var: str = "w") -> MultiPoly:
    return p.dehomogenize(var)


def differentiate(p: MultiPoly, var) -> MultiPoly:
    return p.diff(var)


def gradient(p: MultiPoly) -> list:
    return p.gradient()


def evaluate(p: MultiPoly, point: Sequence) -> mpq:
    return p.evaluate(point)
