"""Dense univariate polynomials over Q as low-to-high coefficient lists.

The empty list is the zero polynomial.  Functions never mutate their inputs.
"""

from __future__ import annotations

import gmpy2
from gmpy2 import mpq, mpz

_ZERO = mpq(0)
_ONE = mpq(1)


def strip(a):
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def degree(a) -> int:
    return len(a) - 1


def lc(a):
    return a[-1] if a else _ZERO


def add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return strip(out)


def sub(a, b):
    out = list(a) + [_ZERO] * max(0, len(b) - len(a))
    for i, c in enumerate(b):
        out[i] -= c
    return strip(out)


def neg(a):
    return [-c for c in a]


def scale(a, c):
    if not c:
        return []
    return [x * c for x in a]


def mul(a, b):
    if not a or not b:
        return []
    out = [_ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return strip(out)


def power(a, k: int):
    out = [_ONE]
    base = a
    while k:
        if k & 1:
            out = mul(out, base)
        k >>= 1
        if k:
            base = mul(base, base)
    return out


def divmod_(a, b):
    """Quotient and remainder over Q."""
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    r = list(a)
    db = len(b) - 1
    inv = 1 / mpq(b[-1])
    q = [_ZERO] * max(0, len(a) - db)
    while len(r) - 1 >= db and r:
        k = len(r) - 1 - db
        c = r[-1] * inv
        q[k] = c
        for i, y in enumerate(b):
            r[i + k] -= c * y
        r.pop()
        r = strip(r)
    return strip(q), r


def rem(a, b):
    return divmod_(a, b)[1]


def exquo(a, b):
    q, r = divmod_(a, b)
    if r:
        raise ArithmeticError("inexact univariate division")
    return q


def deriv(a):
    return strip([a[i] * i for i in range(1, len(a))])


def evaluate(a, x):
    v = _ZERO
    for c in reversed(a):
        v = v * x + c
    return v


def sign(v) -> int:
    return (v > 0) - (v < 0)


def sign_at(a, x) -> int:
    return sign(evaluate(a, x))


def content(a):
    g = mpz(0)
    l = mpz(1)
    for c in a:
        if c:
            g = gmpy2.gcd(g, c.numerator)
            l = gmpy2.lcm(l, c.denominator)
    return mpq(g, l)


def primitive(a):
    """Scale by a positive rational so coefficients are coprime integers."""
    if not a:
        return []
    c = content(a)
    if c == 1:
        return list(a)
    return [x / c for x in a]


def canonical(a):
    """Primitive with positive leading coefficient."""
    a = primitive(strip(a))
    if a and a[-1] < 0:
        a = neg(a)
    return a


def monic(a):
    return scale(a, 1 / a[-1]) if a else []


def prem(a, b):
    """Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b, exact over the integers."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    e = len(a) - len(b) + 1
    if e <= 0:
        return r
    while r and len(r) - 1 >= db:
        k = len(r) - 1 - db
        c = r[-1]
        r = [x * lb for x in r]
        for i, y in enumerate(b):
            r[i + k] -= c * y
        r.pop()
        e -= 1
        r = strip(r)
    if e > 0:
        f = lb ** e
        r = [x * f for x in r]
    return r


def gcd(a, b):
    """Canonical gcd via a primitive remainder sequence."""
    a = canonical(a)
    b = canonical(b)
    if not a:
        return b
    if not b:
        return a
    if len(a) < len(b):
        a, b = b, a
    while b:
        if len(b) == 1:
            return [_ONE]
        r = primitive(prem(a, b))
        a, b = b, r
    return canonical(a)


def sqfree(a):
    """Squarefree part (canonical)."""
    a = canonical(a)
    if len(a) <= 2:
        return a
    g = gcd(a, deriv(a))
    if len(g) == 1:
        return a
    return canonical(exquo(a, g))


def compose(a, b):
    """a(b(t))."""
    out = []
    for c in reversed(a):
        out = add(mul(out, b), [c])
    return out


def shift_scale(a, lo, width):
    """Coefficients of a(lo + width*t)."""
    return compose(a, strip([mpq(lo), mpq(width)]))


def cauchy_bound(a):
    """1 + max |c_i / c_lead|."""
    l = abs(a[-1])
    return 1 + max((abs(c) / l for c in a[:-1]), default=_ZERO)


def from_ints(coeffs):
    return strip([mpq(c) for c in coeffs])
