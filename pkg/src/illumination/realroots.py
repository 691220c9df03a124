"""Sturm sequences, real-root isolation and exact real algebraic numbers.

Polynomials are accepted as univariate :class:`MultiPoly` values or as dense
low-to-high coefficient lists.  Internally everything runs on primitive
integer coefficient lists so sign evaluation stays in ``mpz`` arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpq, mpz

from . import dense
from .poly import MultiPoly, QQ


def as_dense(p) -> list:
    """Low-to-high rational coefficients of a univariate polynomial."""
    if isinstance(p, MultiPoly):
        used = p.used_variables()
        if len(used) > 1:
            raise ValueError(f"expected a univariate polynomial, got variables {used}")
        return p.to_dense(used[0] if used else None)
    return dense.strip(mpq(c) for c in p)


def _ints(a) -> list:
    """Primitive integer form (positive scaling, sign preserved)."""
    a = dense.primitive(a)
    return [mpz(c.numerator) for c in a]


def _sqfree_ints(p) -> list:
    a = as_dense(p)
    if not a:
        raise ValueError("the zero polynomial has no isolated roots")
    return _ints(dense.sqfree(a))


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _hom_eval(a, num, den):
    """``den^d * a(num/den)`` evaluated in integers."""
    d = len(a) - 1
    v = mpz(a[d])
    pw = mpz(den)
    for i in range(d - 1, -1, -1):
        v = v * num + a[i] * pw
        pw *= den
    return v


def sign_at(a, x) -> int:
    if not a:
        return 0
    x = mpq(x)
    return _sign(_hom_eval(a, x.numerator, x.denominator))


# -- Sturm sequences -----------------------------------------------------------------------


@dataclass(frozen=True)
class SturmSequence:
    """Sturm chain of the squarefree part: p, p', then negated remainders.

    Elements are primitive integer coefficient lists (low to high); each has
    been scaled by a positive constant only, so sign counts are unaffected.
    """

    dense: tuple

    @property
    def chain(self) -> list:
        return [MultiPoly.from_dense([mpq(c) for c in a], var="t") for a in self.dense]

    def __len__(self):
        return len(self.dense)

    def variations(self, x) -> int:
        """Sign changes at ``x``; ``None``/``±inf`` via strings ``'-inf'``/``'+inf'``."""
        signs = []
        if x == "+inf":
            signs = [_sign(a[-1]) for a in self.dense]
        elif x == "-inf":
            signs = [_sign(a[-1]) * (-1) ** (len(a) - 1) for a in self.dense]
        else:
            x = mpq(x)
            num, den = x.numerator, x.denominator
            signs = [_sign(_hom_eval(a, num, den)) for a in self.dense]
        n = 0
        prev = 0
        for s in signs:
            if s:
                if prev and s != prev:
                    n += 1
                prev = s
        return n

    def count(self, lo=None, hi=None) -> int:
        """Distinct real roots in ``(lo, hi]``; ``None`` means unbounded."""
        return self.variations("-inf" if lo is None else lo) - \
            self.variations("+inf" if hi is None else hi)


def _chain(a) -> SturmSequence:
    chain = [a]
    if len(a) > 1:
        b = _ints(dense.deriv([mpq(c) for c in a]))
        chain.append(b)
        while len(chain[-1]) > 1:
            u, v = chain[-2], chain[-1]
            r = dense.prem(u, v)
            if not r:
                break
            if v[-1] < 0 and (len(u) - len(v) + 1) % 2:
                r = [-c for c in r]
            chain.append(_ints([-mpq(c) for c in r]))
    return SturmSequence(tuple(tuple(x) for x in chain))


def sturm_sequence(p) -> SturmSequence:
    """Canonical Sturm chain of the squarefree part of ``p``."""
    return _chain(_sqfree_ints(p))


def count_real_roots(p, lo=None, hi=None) -> int:
    """Number of distinct real roots in the half-open interval ``(lo, hi]``."""
    if lo is not None and hi is not None and QQ(lo) >= QQ(hi):
        raise ValueError("count_real_roots needs lo < hi")
    return sturm_sequence(p).count(None if lo is None else QQ(lo), None if hi is None else QQ(hi))


def count_roots_open(p, lo, hi) -> int:
    """Distinct real roots in the open interval ``(lo, hi)``."""
    a = _sqfree_ints(p)
    hi = QQ(hi)
    n = _chain(a).count(QQ(lo), hi)
    return n - (1 if sign_at(a, hi) == 0 else 0)


# -- isolation ------------------------------------------------------------------------------


@dataclass(frozen=True)
class IsolatingInterval:
    lo: mpq
    hi: mpq
    exact: mpq | None = None

    def __post_init__(self):
        if self.exact is not None:
            if not (self.lo == self.hi == self.exact):
                raise ValueError("an exact root interval must be degenerate")
        elif not self.lo < self.hi:
            raise ValueError("isolating interval needs lo < hi")

    @property
    def width(self) -> mpq:
        return self.hi - self.lo

    def midpoint(self) -> mpq:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def to_float(self) -> float:
        return float(self.midpoint())


def root_bound(a) -> mpq:
    """Cauchy bound rounded up to a power of two."""
    b = dense.cauchy_bound([mpq(c) for c in a])
    k = 1
    while k < b:
        k *= 2
    return mpq(k)


def _finish(a, sc: SturmSequence, lo, hi):
    """Shrink an interval holding one root in (lo, hi] to a closed isolator."""
    if sign_at(a, hi) == 0:
        return IsolatingInterval(hi, hi, hi)
    while sign_at(a, lo) == 0:
        mid = (lo + hi) / 2
        if sc.count(mid, hi) == 1:
            lo = mid
        else:
            hi = mid
            if sign_at(a, hi) == 0:
                return IsolatingInterval(hi, hi, hi)
    return _rational_probe(a, lo, hi)


def _rational_probe(a, lo, hi):
    """Detect a rational root: it must be k/|lc| for an integer k."""
    c = abs(a[-1])
    slo = sign_at(a, lo)
    while True:
        if (hi - lo) * c < 1 and hi - lo <= 1:
            k = gmpy2.floor(lo * c) + 1
            r = mpq(mpz(k), c)
            if lo < r < hi and sign_at(a, r) == 0:
                return IsolatingInterval(r, r, r)
            return IsolatingInterval(lo, hi)
        mid = (lo + hi) / 2
        s = sign_at(a, mid)
        if s == 0:
            return IsolatingInterval(mid, mid, mid)
        if s == slo:
            lo, slo = mid, s
        else:
            hi = mid


def isolate_real_roots(p) -> list:
    """Disjoint ascending isolating intervals, one per distinct real root."""
    a = _sqfree_ints(p)
    if len(a) == 1:
        return []
    sc = _chain(a)
    B = root_bound(a)
    out = []
    stack = [(-B, B)]
    while stack:
        lo, hi = stack.pop()
        n = sc.count(lo, hi)
        if n == 0:
            continue
        if n == 1:
            out.append(_finish(a, sc, lo, hi))
            continue
        mid = (lo + hi) / 2
        stack.append((mid, hi))
        stack.append((lo, mid))
    out.sort(key=lambda iv: iv.lo)
    return out


def refine_root(p, iv: IsolatingInterval, width) -> IsolatingInterval:
    """Bisect ``iv`` until its width is at most ``width``."""
    if iv.exact is not None:
        return iv
    width = QQ(width)
    if iv.width <= width:
        return iv
    a = _sqfree_ints(p)
    return _bisect(a, iv.lo, iv.hi, width)


def _bisect(a, lo, hi, width) -> IsolatingInterval:
    slo = sign_at(a, lo)
    if slo == 0:
        return IsolatingInterval(lo, lo, lo)
    if sign_at(a, hi) == 0:
        return IsolatingInterval(hi, hi, hi)
    while hi - lo > width:
        mid = (lo + hi) / 2
        s = sign_at(a, mid)
        if s == 0:
            return IsolatingInterval(mid, mid, mid)
        if s == slo:
            lo = mid
        else:
            hi = mid
    return IsolatingInterval(lo, hi)


# -- real algebraic numbers ------------------------------------------------------------------


class RealAlgebraic:
    """A real root of a squarefree integer polynomial, pinned by an interval.

    Rational values carry ``exact`` and an empty defining polynomial is never
    needed for them.  Instances refine themselves in place (the value never
    changes, only the enclosure tightens).
    """

    __slots__ = ("poly", "lo", "hi", "exact")

    def __init__(self, poly, lo, hi, exact=None):
        self.poly = poly
        self.lo = mpq(lo)
        self.hi = mpq(hi)
        self.exact = None if exact is None else mpq(exact)

    @classmethod
    def rational(cls, r) -> "RealAlgebraic":
        r = QQ(r)
        return cls([-r.numerator, r.denominator], r, r, r)

    @classmethod
    def from_interval(cls, p, iv: IsolatingInterval) -> "RealAlgebraic":
        if iv.exact is not None:
            return cls.rational(iv.exact)
        return cls(_sqfree_ints(p), iv.lo, iv.hi)

    @property
    def is_rational(self) -> bool:
        return self.exact is not None

    def interval(self) -> IsolatingInterval:
        if self.exact is not None:
            return IsolatingInterval(self.exact, self.exact, self.exact)
        return IsolatingInterval(self.lo, self.hi)

    def refine(self, width) -> "RealAlgebraic":
        if self.exact is None and self.hi - self.lo > width:
            iv = _bisect(self.poly, self.lo, self.hi, mpq(width))
            self.lo, self.hi, self.exact = iv.lo, iv.hi, iv.exact
        return self

    def bisect_once(self) -> None:
        if self.exact is None:
            self.refine((self.hi - self.lo) / 2)

    def to_float(self) -> float:
        if self.exact is not None:
            return float(self.exact)
        scale = max(abs(self.lo), abs(self.hi), mpq(1))
        self.refine(scale / mpq(2) ** 60)
        return float((self.lo + self.hi) / 2)

    def __float__(self):
        return self.to_float()

    def sign_of(self, f) -> int:
        """Exact sign of the univariate polynomial ``f`` at this number."""
        fd = as_dense(f)
        if not fd:
            return 0
        if self.exact is not None:
            return dense.sign(dense.evaluate(fd, self.exact))
        g = _ints(dense.gcd([mpq(c) for c in self.poly], fd))
        if len(g) > 1 and sign_at(g, self.lo) * sign_at(g, self.hi) <= 0:
            # the shared factor has its (unique) root in the enclosure
            return 0
        if len(fd) == 1:
            return dense.sign(fd[0])
        fi = _sqfree_ints(fd)
        sc = None
        while True:
            if sign_at(fi, self.lo) != 0:
                if sc is None:
                    sc = _chain(fi)
                if sc.count(self.lo, self.hi) == 0:
                    return dense.sign(dense.evaluate(fd, self.lo))
            self.bisect_once()
            if self.exact is not None:
                return dense.sign(dense.evaluate(fd, self.exact))

    def compare(self, other) -> int:
        """-1, 0 or +1."""
        if not isinstance(other, RealAlgebraic):
            other = RealAlgebraic.rational(other)
        if self.exact is not None and other.exact is not None:
            return _sign(self.exact - other.exact)
        if self.exact is not None:
            return -other.compare(self)
        if other.exact is not None:
            r = other.exact
            if r < self.lo:
                return 1
            if r > self.hi:
                return -1
            if sign_at(self.poly, r) == 0:
                return 0
            while self.lo <= r <= self.hi:
                self.bisect_once()
                if self.exact is not None:
                    return _sign(self.exact - r)
            return 1 if r < self.lo else -1
        if self.hi < other.lo:
            return -1
        if other.hi < self.lo:
            return 1
        g = _ints(dense.gcd([mpq(c) for c in self.poly], [mpq(c) for c in other.poly]))
        if len(g) > 1:
            lo = max(self.lo, other.lo)
            hi = min(self.hi, other.hi)
            if sign_at(g, lo) == 0 or sign_at(g, hi) == 0 or _chain(g).count(lo, hi) > 0:
                return 0
        while not (self.hi < other.lo or other.hi < self.lo):
            if self.hi - self.lo >= other.hi - other.lo:
                self.bisect_once()
            else:
                other.bisect_once()
            if self.exact is not None or other.exact is not None:
                return self.compare(other)
        return -1 if self.hi < other.lo else 1

    def __eq__(self, other):
        if not isinstance(other, (RealAlgebraic, int, mpq, Fraction)):
            return NotImplemented
        return self.compare(other) == 0

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    __hash__ = None

    def __repr__(self):
        if self.exact is not None:
            return f"RealAlgebraic({self.exact})"
        return f"RealAlgebraic(~{self.to_float():.12g})"


def real_roots(p) -> list:
    """Distinct real roots of ``p`` as :class:`RealAlgebraic`, ascending."""
    a = _sqfree_ints(p)
    return [RealAlgebraic(a, iv.lo, iv.hi, iv.exact) if iv.exact is None
            else RealAlgebraic.rational(iv.exact) for iv in isolate_real_roots(as_dense_from_ints(a))]


def as_dense_from_ints(a) -> list:
    return [mpq(c) for c in a]
