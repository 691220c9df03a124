"""Exact division, gcd and squarefree parts of multivariate polynomials.

The gcd uses the heuristic evaluation/interpolation scheme of Char, Geddes
and Gonnet over the integers (every candidate is verified by trial
division) and falls back to a recursive primitive remainder sequence.
"""

from __future__ import annotations

import heapq
import operator

import gmpy2
from gmpy2 import mpz

from . import dense
from .poly import MultiPoly

_HEU_TRIES = 6


class ExactDivisionError(ArithmeticError):
    pass


class _HeuristicFailed(Exception):
    pass


def _neg_grevlex(e):
    return (-sum(e), tuple(reversed(e)))


def exquo(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """Exact quotient ``p / q``; raises :class:`ExactDivisionError` otherwise."""
    if p.ring != q.ring:
        from .poly import ContextError
        raise ContextError("ring mismatch in division")
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if q.is_constant():
        return p.scale(1 / q.constant_term())
    out = _exquo_terms(p.terms, q.terms, integral=False)
    if out is None:
        raise ExactDivisionError("polynomial division is not exact")
    return MultiPoly._raw(p.ring, out)


def divides(q: MultiPoly, p: MultiPoly) -> bool:
    if q.is_zero():
        return p.is_zero()
    if q.is_constant():
        return True
    return _exquo_terms(p.terms, q.terms, integral=False) is not None


def _exquo_terms(pt: dict, qt: dict, integral: bool):
    # returns quotient terms or None when the division leaves a remainder
    if not pt:
        return {}
    lt = max(qt, key=lambda e: (sum(e), tuple(-k for k in reversed(e))))
    lc = qt[lt]
    inv = None if integral else 1 / lc
    qitems = [(e, c) for e, c in qt.items() if e != lt]
    rem = dict(pt)
    heap = [(_neg_grevlex(e), e) for e in rem]
    heapq.heapify(heap)
    quo = {}
    sub = operator.sub
    add = operator.add
    ltdeg = sum(lt)
    while heap:
        _, e = heapq.heappop(heap)
        c = rem.pop(e, None)
        if c is None:
            continue
        if sum(e) < ltdeg:
            return None
        m = tuple(map(sub, e, lt))
        if min(m) < 0:
            return None
        if integral:
            if c % lc:
                return None
            qc = c // lc
        else:
            qc = c * inv
        quo[m] = qc
        for ge, gc in qitems:
            t = tuple(map(add, ge, m))
            v = rem.get(t)
            if v is None:
                rem[t] = -qc * gc
                heapq.heappush(heap, (_neg_grevlex(t), t))
            else:
                v = v - qc * gc
                if v:
                    rem[t] = v
                else:
                    del rem[t]
    return quo


# -- integer helpers for the heuristic gcd -----------------------------------------


def _icontent(f: dict):
    g = mpz(0)
    for c in f.values():
        g = gmpy2.gcd(g, c)
        if g == 1:
            break
    return g


def _iscale_div(f: dict, c):
    return {e: v // c for e, v in f.items()}


def _maxnorm(f: dict):
    return max(abs(c) for c in f.values())


def _lex_lc(f: dict):
    return f[max(f)]


def _eval_var(f: dict, i: int, xi):
    out = {}
    for e, c in f.items():
        k = e[i]
        ne = e[:i] + (0,) + e[i + 1:] if k else e
        out[ne] = out.get(ne, 0) + c * xi ** k
    return {e: c for e, c in out.items() if c}


def _interpolate(h: dict, xi, i: int):
    out = {}
    half = xi // 2
    k = 0
    while h:
        g = {}
        for e, c in h.items():
            r = c % xi
            if r > half:
                r -= xi
            if r:
                g[e] = r
        for e, c in g.items():
            out[e[:i] + (k,) + e[i + 1:]] = c
        nxt = {}
        for e, c in h.items():
            v = (c - g.get(e, 0)) // xi
            if v:
                nxt[e] = v
        h = nxt
        k += 1
    return out


def _uses(f: dict, i: int) -> bool:
    return any(e[i] for e in f)


def _heu_gcd(f: dict, g: dict, variables: list):
    """Return (h, f/h, g/h) over Z; ``variables`` are the live indices."""
    cf = _icontent(f)
    cg = _icontent(g)
    gc = gmpy2.gcd(cf, cg)
    f = _iscale_div(f, cf)
    g = _iscale_div(g, cg)
    live = [i for i in variables if _uses(f, i) or _uses(g, i)]
    zero = (0,) * len(next(iter(f)))
    if not live:
        return {zero: gc}, {zero: cf // gc}, {zero: cg // gc}
    i = live[-1]
    fn = _maxnorm(f)
    gn = _maxnorm(g)
    b = 2 * min(fn, gn) + 29
    xi = max(min(b, 99 * gmpy2.isqrt(b)),
             2 * min(fn // abs(_lex_lc(f)), gn // abs(_lex_lc(g))) + 2)
    for _ in range(_HEU_TRIES):
        ff = _eval_var(f, i, xi)
        gg = _eval_var(g, i, xi)
        if ff and gg:
            h, cff, cfg = _heu_gcd(ff, gg, live[:-1])
            h = _interpolate(h, xi, i)
            hc = _icontent(h)
            h = _iscale_div(h, hc)
            qf = _exquo_terms(f, h, integral=True)
            if qf is not None:
                qg = _exquo_terms(g, h, integral=True)
                if qg is not None:
                    return _finish(h, qf, qg, gc, cf, cg)
            cff = _interpolate(cff, xi, i)
            hh = _exquo_terms(f, cff, integral=True)
            if hh is not None:
                qg = _exquo_terms(g, hh, integral=True)
                if qg is not None:
                    return _finish(hh, cff, qg, gc, cf, cg)
            cfg = _interpolate(cfg, xi, i)
            hh = _exquo_terms(g, cfg, integral=True)
            if hh is not None:
                qf = _exquo_terms(f, hh, integral=True)
                if qf is not None:
                    return _finish(hh, qf, cfg, gc, cf, cg)
        xi = 73794 * xi * gmpy2.isqrt(gmpy2.isqrt(xi)) // 27011
    raise _HeuristicFailed


def _finish(h, qf, qg, gc, cf, cg):
    return ({e: c * gc for e, c in h.items()},
            {e: c * (cf // gc) for e, c in qf.items()},
            {e: c * (cg // gc) for e, c in qg.items()})


# -- recursive primitive PRS fallback ---------------------------------------------------


def content_in(p: MultiPoly, var) -> MultiPoly:
    """gcd of the coefficients of ``p`` viewed as a polynomial in ``var``."""
    g = MultiPoly.zero(p.ring)
    for c in p.coefficients_in(var).values():
        g = gcd(g, c)
        if g.is_constant():
            return MultiPoly.constant(p.ring, 1)
    return g


def _prem_in(a: MultiPoly, b: MultiPoly, var) -> MultiPoly:
    db = b.degree_in(var)
    lb = b.leading_coefficient_in(var)
    i = a._var_index(var)
    r = a
    while not r.is_zero() and r.degree_in(var) >= db:
        d = r.degree_in(var)
        lr = r.leading_coefficient_in(var)
        mono = [0] * len(a.ring)
        mono[i] = d - db
        r = r * lb - (lr * b).mul_term(tuple(mono), 1)
    return r


def _prs_gcd(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    one = MultiPoly.constant(p.ring, 1)
    used = [v for v in p.ring if v in set(p.used_variables()) | set(q.used_variables())]
    if not used:
        return one
    v = used[-1]
    if p.degree_in(v) <= 0:
        return gcd(p, content_in(q, v))
    if q.degree_in(v) <= 0:
        return gcd(content_in(p, v), q)
    cp = content_in(p, v)
    cq = content_in(q, v)
    c = gcd(cp, cq)
    a = exquo(p, cp)
    b = exquo(q, cq)
    if a.degree_in(v) < b.degree_in(v):
        a, b = b, a
    while True:
        r = _prem_in(a, b, v)
        if r.is_zero():
            g = b
            break
        if r.degree_in(v) <= 0:
            g = one
            break
        a, b = b, exquo(r, content_in(r, v))
    if not g.is_constant():
        g = exquo(g, content_in(g, v))
    return (c * g).canonical()


# -- public API ---------------------------------------------------------------------------


def gcd(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    """Canonical greatest common divisor (content-free, positive leading coefficient)."""
    if p.ring != q.ring:
        from .poly import ContextError
        raise ContextError("ring mismatch in gcd")
    if p.is_zero():
        return q.canonical()
    if q.is_zero():
        return p.canonical()
    one = MultiPoly.constant(p.ring, 1)
    if p.is_constant() or q.is_constant():
        return one
    used = sorted(set(p.used_variables()) | set(q.used_variables()), key=p.ring.index)
    if len(used) == 1:
        v = used[0]
        g = dense.gcd(p.drop(*[u for u in p.ring if u != v]).to_dense(),
                      q.drop(*[u for u in q.ring if u != v]).to_dense())
        return MultiPoly.from_dense(g, var=v, ring=p.ring)
    f = {e: c.numerator for e, c in p.primitive().terms.items()}
    g = {e: c.numerator for e, c in q.primitive().terms.items()}
    try:
        h = _heu_gcd(f, g, [p.ring.index(v) for v in used])[0]
        return MultiPoly(p.ring, h).canonical()
    except _HeuristicFailed:
        return _prs_gcd(p, q)


def lcm(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    if p.is_zero() or q.is_zero():
        return MultiPoly.zero(p.ring)
    return exquo(p * q, gcd(p, q)).canonical()


def squarefree_part(p: MultiPoly) -> MultiPoly:
    """``p / gcd(p, dp/dv_1, ..., dp/dv_n)``, canonicalised.

    Removes repeated factors without changing the zero set.
    """
    if p.is_zero() or p.is_constant():
        return p.canonical()
    g = p
    for v in p.used_variables():
        d = p.diff(v)
        if not d.is_zero():
            g = gcd(g, d)
            if g.is_constant():
                return p.canonical()
    return exquo(p, g).canonical()


def is_squarefree(p: MultiPoly) -> bool:
    return squarefree_part(p) == p.canonical()


def remove_factor(p: MultiPoly, f: MultiPoly) -> MultiPoly:
    """Divide out every factor ``p`` shares with ``f`` (to any multiplicity)."""
    if f.is_zero():
        return p
    while True:
        g = gcd(p, f)
        if g.is_constant():
            return p
        p = exquo(p, g)
