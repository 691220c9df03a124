"""Variable elimination: Buchberger Gröbner bases and Sylvester resultants."""

from __future__ import annotations

import logging
import operator
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

from gmpy2 import mpq

from .poly import ContextError, MultiPoly
from .polygcd import exquo

log = logging.getLogger(__name__)

_ZERO = mpq(0)


class ResourceLimitError(RuntimeError):
    """A configured cap on basis size, pair queue or work was exceeded."""


class PreconditionError(ValueError):
    pass


# -- monomial orders ------------------------------------------------------------


def _grevlex(e):
    return (sum(e), tuple(-k for k in reversed(e)))


@dataclass(frozen=True)
class MonomialOrder:
    """``lex``, ``grevlex`` or ``block``.

    A block order compares the exponents of ``eliminate`` (ring indices) by
    grevlex first and breaks ties with grevlex on the remaining variables.
    """

    kind: str = "grevlex"
    eliminate: tuple = ()

    def key(self, e):
        if self.kind == "grevlex":
            return _grevlex(e)
        if self.kind == "lex":
            return e
        if self.kind == "block":
            drop = self.eliminate
            first = tuple(e[i] for i in drop)
            rest = tuple(k for i, k in enumerate(e) if i not in drop)
            return (_grevlex(first), _grevlex(rest))
        raise ValueError(f"unknown monomial order {self.kind!r}")

    @classmethod
    def block(cls, ring: Sequence[str], drop: Iterable[str]) -> "MonomialOrder":
        drop = set(drop)
        unknown = drop - set(ring)
        if unknown:
            raise ContextError(f"cannot eliminate unknown variables {sorted(unknown)}")
        return cls("block", tuple(i for i, v in enumerate(ring) if v in drop))


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


@dataclass
class PolySystem:
    generators: list
    order: MonomialOrder = GREVLEX

    def __post_init__(self):
        self.generators = [g for g in self.generators]
        if any(g.is_zero() for g in self.generators):
            raise ValueError("a polynomial system may not contain the zero polynomial")
        rings = {g.ring for g in self.generators}
        if len(rings) > 1:
            raise ContextError("generators live in different rings")

    @property
    def ring(self):
        return self.generators[0].ring if self.generators else None

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def is_empty(self) -> bool:
        return not self.generators


# -- reduction -------------------------------------------------------------------------


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(map(max, a, b))


def _coprime(a, b):
    return not any(x and y for x, y in zip(a, b))


class _Basis:
    """Monic polynomials as dicts plus their leading monomials."""

    def __init__(self, key):
        self.key = key
        self.polys = []
        self.lms = []
        self.alive = []

    def add(self, terms: dict) -> int:
        lm = max(terms, key=self.key)
        inv = 1 / terms[lm]
        self.polys.append({e: c * inv for e, c in terms.items()})
        self.lms.append(lm)
        self.alive.append(True)
        return len(self.polys) - 1

    def reducer(self, e, skip=-1):
        for i, lm in enumerate(self.lms):
            if self.alive[i] and i != skip and _divides(lm, e):
                return i
        return -1


class _Work:
    def __init__(self, max_steps=None, deadline=None):
        self.steps = 0
        self.max_steps = max_steps
        self.deadline = deadline

    def tick(self, n=1):
        self.steps += n
        if self.max_steps is not None and self.steps > self.max_steps:
            raise ResourceLimitError(f"reduction work exceeded {self.max_steps} steps")
        if self.deadline is not None and (self.steps & 255) == 0 and time.monotonic() > self.deadline:
            raise ResourceLimitError("elimination time budget exhausted")


def _reduce(terms: dict, basis: _Basis, key, work: _Work | None = None, skip=-1,
            full=True) -> dict:
    """Normal form of ``terms`` modulo the live basis elements."""
    import heapq
    rem = dict(terms)
    # max-heap through a sortable proxy: store negated rank via sorted list of keys
    heap = []
    keyed = {}

    def push(e):
        k = key(e)
        keyed[e] = k
        heapq.heappush(heap, _Rev(k, e))

    for e in rem:
        push(e)
    out = {}
    add = operator.add
    sub = operator.sub
    while heap:
        item = heapq.heappop(heap)
        e = item.e
        c = rem.pop(e, None)
        if c is None:
            continue
        i = basis.reducer(e, skip)
        if i < 0:
            out[e] = c
            if not full:
                for e2, c2 in rem.items():
                    out[e2] = c2
                return out
            continue
        if work is not None:
            work.tick()
        m = tuple(map(sub, e, basis.lms[i]))
        lm = basis.lms[i]
        for ge, gc in basis.polys[i].items():
            if ge == lm:
                continue
            t = tuple(map(add, ge, m))
            v = rem.get(t)
            if v is None:
                rem[t] = -c * gc
                push(t)
            else:
                v -= c * gc
                if v:
                    rem[t] = v
                else:
                    del rem[t]
    return out


class _Rev:
    """Heap entry ordering monomials from largest to smallest."""

    __slots__ = ("k", "e")

    def __init__(self, k, e):
        self.k = k
        self.e = e

    def __lt__(self, other):
        return self.k > other.k


def normal_form(p: MultiPoly, G, order: MonomialOrder | None = None) -> MultiPoly:
    """Remainder of ``p`` on division by ``G`` (fully reduced)."""
    if isinstance(G, PolySystem):
        order = order or G.order
        gens = G.generators
    else:
        gens = list(G)
        order = order or GREVLEX
    for g in gens:
        if g.ring != p.ring:
            raise ContextError("ring mismatch in normal_form")
    basis = _Basis(order.key)
    for g in gens:
        if not g.is_zero():
            basis.add(g.terms)
    return MultiPoly._raw(p.ring, _reduce(p.terms, basis, order.key))


# -- Buchberger ------------------------------------------------------------------------------


def buchberger(system, order: MonomialOrder | None = None, *, criteria: bool = True,
               max_basis: int = 5000, max_pairs: int = 20000, max_steps: int | None = None,
               time_budget: float | None = None) -> PolySystem:
    """Reduced Gröbner basis of the ideal generated by ``system``.

    Pairs are chosen by normal selection (smallest lcm first).  With
    ``criteria`` the Gebauer-Möller installation of Buchberger's coprime and
    chain criteria prunes pairs; switching it off must give the same basis.
    Exceeding ``max_basis``, ``max_pairs``, ``max_steps`` (reduction steps) or
    ``time_budget`` (seconds) raises :class:`ResourceLimitError`.
    """
    if isinstance(system, PolySystem):
        order = order or system.order
        gens = system.generators
    else:
        gens = list(system)
        order = order or GREVLEX
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise ValueError("buchberger needs at least one nonzero generator")
    ring = gens[0].ring
    for g in gens:
        if g.ring != ring:
            raise ContextError("generators live in different rings")
    key = order.key
    deadline = time.monotonic() + time_budget if time_budget is not None else None
    work = _Work(max_steps, deadline)
    basis = _Basis(key)
    pairs: dict = {}

    def insert(terms):
        h = basis.add(terms)
        lm_h = basis.lms[h]
        old = [i for i in range(h) if basis.alive[i]]
        if not criteria:
            for g in old:
                pairs[(g, h)] = _lcm(basis.lms[g], lm_h)
            return
        # Gebauer-Möller update
        cand = [(g, _lcm(basis.lms[g], lm_h)) for g in old]
        kept = []
        for idx, (g1, l1) in enumerate(cand):
            if _coprime(basis.lms[g1], lm_h):
                kept.append((g1, l1))
                continue
            redundant = False
            for g2, l2 in cand[idx + 1:]:
                if _divides(l2, l1) and l2 != l1:
                    redundant = True
                    break
            if not redundant:
                for g2, l2 in kept:
                    if _divides(l2, l1):
                        redundant = True
                        break
            if not redundant:
                kept.append((g1, l1))
        # among equal lcms keep one; drop coprime pairs
        seen = set()
        for g1, l1 in kept:
            if _coprime(basis.lms[g1], lm_h):
                continue
            if l1 in seen:
                continue
            seen.add(l1)
            pairs[(g1, h)] = l1
        for (g1, g2), l in list(pairs.items()):
            if h in (g1, g2):
                continue
            if (_divides(lm_h, l) and _lcm(basis.lms[g1], lm_h) != l
                    and _lcm(basis.lms[g2], lm_h) != l):
                del pairs[(g1, g2)]
        # superseded elements leave the reducer set; their pending pairs stay
        for g in old:
            if _divides(lm_h, basis.lms[g]):
                basis.alive[g] = False

    for g in sorted(gens, key=lambda p: key(p.leading_term(key)[0])):
        r = _reduce(g.terms, basis, key, work)
        if r:
            insert(r)
        if len(pairs) > max_pairs:
            raise ResourceLimitError(f"pair queue exceeded {max_pairs}")

    while pairs:
        (i, j), l = min(pairs.items(), key=lambda kv: (sum(kv[1]), key(kv[1]), kv[0]))
        del pairs[(i, j)]
        s = _spoly(basis, i, j, l)
        r = _reduce(s, basis, key, work)
        if r:
            insert(r)
            if sum(basis.alive) > max_basis:
                raise ResourceLimitError(f"basis size exceeded {max_basis}")
            if len(pairs) > max_pairs:
                raise ResourceLimitError(f"pair queue exceeded {max_pairs}")

    return PolySystem(_reduced(basis, ring, key, work), order)


def _spoly(basis: _Basis, i: int, j: int, l) -> dict:
    sub = operator.sub
    add = operator.add
    mi = tuple(map(sub, l, basis.lms[i]))
    mj = tuple(map(sub, l, basis.lms[j]))
    out = {}
    for e, c in basis.polys[i].items():
        out[tuple(map(add, e, mi))] = c
    for e, c in basis.polys[j].items():
        t = tuple(map(add, e, mj))
        v = out.get(t, _ZERO) - c
        if v:
            out[t] = v
        else:
            out.pop(t, None)
    return out


def _reduced(basis: _Basis, ring, key, work) -> list:
    idx = [i for i in range(len(basis.polys)) if basis.alive[i]]
    minimal = []
    for i in idx:
        lm = basis.lms[i]
        if any(j != i and _divides(basis.lms[j], lm) and (basis.lms[j] != lm or j < i)
               for j in idx):
            continue
        minimal.append(i)
    red = _Basis(key)
    for i in minimal:
        red.add(basis.polys[i])
    out = []
    for k in range(len(red.polys)):
        r = _reduce(red.polys[k], red, key, work, skip=k)
        out.append(MultiPoly._raw(ring, r).canonical(key))
    out.sort(key=lambda p: key(p.leading_term(key)[0]))
    return out


def is_groebner(system: PolySystem) -> bool:
    """Every S-polynomial reduces to zero."""
    key = system.order.key
    basis = _Basis(key)
    for g in system.generators:
        basis.add(g.terms)
    n = len(basis.polys)
    for i in range(n):
        for j in range(i + 1, n):
            s = _spoly(basis, i, j, _lcm(basis.lms[i], basis.lms[j]))
            if _reduce(s, basis, key):
                return False
    return True


def eliminate(system, drop: Iterable[str], **guards) -> PolySystem:
    """Basis of the elimination ideal (polynomials free of ``drop``).

    The result lives in the ring of retained variables.  An empty system
    means the elimination ideal is zero.
    """
    gens = system.generators if isinstance(system, PolySystem) else list(system)
    ring = gens[0].ring
    drop = list(drop)
    order = MonomialOrder.block(ring, drop)
    gb = buchberger(gens, order, **guards)
    keep = tuple(v for v in ring if v not in drop)
    dropped = [ring.index(v) for v in drop]
    out = [g.embed(keep) for g in gb.generators
           if not any(e[i] for e in g.terms for i in dropped)]
    return PolySystem(out, GREVLEX)


# -- resultants ------------------------------------------------------------------------------


def _coeff_list(p: MultiPoly, var, ring) -> list:
    """High-to-low coefficients of ``p`` in ``var``, embedded in ``ring``."""
    cs = p.coefficients_in(var)
    d = max(cs)
    return [cs[k].embed(ring) if k in cs else MultiPoly.zero(ring) for k in range(d, -1, -1)]


def sylvester_matrix(p: MultiPoly, q: MultiPoly, var) -> list:
    if p.ring != q.ring:
        raise ContextError("ring mismatch in resultant")
    m = p.degree_in(var)
    n = q.degree_in(var)
    if m < 1 or n < 1:
        raise PreconditionError(f"both polynomials need positive degree in {var!r}")
    ring = tuple(v for v in p.ring if v != var)
    pc = _coeff_list(p, var, ring)
    qc = _coeff_list(q, var, ring)
    size = m + n
    zero = MultiPoly.zero(ring)
    rows = []
    for i in range(n):
        rows.append([zero] * i + pc + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + qc + [zero] * (size - n - 1 - i))
    return rows


def det_bareiss(matrix: list, deadline: float | None = None):
    """Fraction-free determinant of a square matrix of polynomials or rationals."""
    M = [list(row) for row in matrix]
    n = len(M)
    if n == 0:
        return 1
    poly = isinstance(M[0][0], MultiPoly)
    sign = 1
    prev = None
    for k in range(n - 1):
        piv = [i for i in range(k, n) if M[i][k]]
        if not piv:
            return MultiPoly.zero(M[0][0].ring) if poly else mpq(0)
        best = min(piv, key=lambda i: len(M[i][k].terms) if poly else 0)
        if best != k:
            M[k], M[best] = M[best], M[k]
            sign = -sign
        pk = M[k][k]
        for i in range(k + 1, n):
            mik = M[i][k]
            row_i = M[i]
            row_k = M[k]
            for j in range(k + 1, n):
                v = pk * row_i[j] - mik * row_k[j]
                if prev is not None:
                    v = exquo(v, prev) if poly else v / prev
                row_i[j] = v
            if deadline is not None and time.monotonic() > deadline:
                raise ResourceLimitError("resultant time budget exhausted")
        prev = pk
    d = M[n - 1][n - 1]
    return -d if sign < 0 else d


def sylvester_resultant(p: MultiPoly, q: MultiPoly, var, *, method: str = "auto",
                        deadline: float | None = None) -> MultiPoly:
    """Res_var(p, q) as a polynomial in the remaining variables.

    ``method`` is ``"bareiss"`` (fraction-free elimination over the
    polynomial ring), ``"interpolate"`` (Bareiss over Q at sample points,
    then Newton interpolation; univariate results only) or ``"auto"``.
    """
    M = sylvester_matrix(p, q, var)
    ring = tuple(v for v in p.ring if v != var)
    used = set(p.used_variables()) | set(q.used_variables())
    used.discard(var)
    if method == "auto":
        method = "interpolate" if len(used) == 1 else "bareiss"
    if method == "interpolate" and len(used) == 1:
        (u,) = used
        return _resultant_interp(M, ring, u, p, q, var)
    if method == "interpolate" and not used:
        vals = [[e.constant_term() for e in row] for row in M]
        return MultiPoly.constant(ring, det_bareiss(vals))
    return det_bareiss(M, deadline)


def _resultant_interp(M, ring, u, p, q, var) -> MultiPoly:
    m = p.degree_in(var)
    n = q.degree_in(var)
    bound = n * max(c.degree_in(u) for c in p.coefficients_in(var).values()) \
        + m * max(c.degree_in(u) for c in q.coefficients_in(var).values())
    ui = ring.index(u)
    dense_rows = [[_dense_in(e, ui) for e in row] for row in M]
    xs = [mpq(k) for k in range(bound + 1)]
    ys = []
    for xv in xs:
        vals = [[_horner(c, xv) for c in row] for row in dense_rows]
        ys.append(det_bareiss(vals))
    coeffs = _newton_interpolate(xs, ys)
    return MultiPoly.from_dense(coeffs, var=u, ring=ring)


def _dense_in(p: MultiPoly, i: int) -> list:
    if not p.terms:
        return []
    out = [_ZERO] * (max(e[i] for e in p.terms) + 1)
    for e, c in p.terms.items():
        out[e[i]] += c
    return out


def _horner(a, x):
    v = _ZERO
    for c in reversed(a):
        v = v * x + c
    return v


def _newton_interpolate(xs, ys) -> list:
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    out = [_ZERO]
    for i in range(n - 1, -1, -1):
        # out = out * (t - xs[i]) + coef[i]
        nxt = [_ZERO] * (len(out) + 1)
        for k, c in enumerate(out):
            nxt[k + 1] += c
            nxt[k] -= c * xs[i]
        nxt[0] += coef[i]
        out = nxt
    while out and not out[-1]:
        out.pop()
    return out


def subresultant(p: MultiPoly, q: MultiPoly, var, j: int) -> list:
    """Coefficients ``[s_j0, ..., s_jj]`` of the j-th subresultant in ``var``.

    ``s_jj`` is the principal subresultant coefficient; ``j = 0`` gives the
    resultant.  Requires ``0 <= j < min(deg p, deg q)``.
    """
    m = p.degree_in(var)
    n = q.degree_in(var)
    if m < n:
        p, q, m, n = q, p, n, m
    if not 0 <= j < n:
        raise PreconditionError("subresultant index out of range")
    ring = tuple(v for v in p.ring if v != var)
    pc = _coeff_list(p, var, ring)
    qc = _coeff_list(q, var, ring)
    zero = MultiPoly.zero(ring)
    width = m + n - j
    rows = []
    for i in range(n - j):
        rows.append([zero] * i + pc + [zero] * (width - m - 1 - i))
    for i in range(m - j):
        rows.append([zero] * i + qc + [zero] * (width - n - 1 - i))
    nrows = len(rows)
    lead = nrows - 1
    out = []
    for k in range(j + 1):
        col = width - 1 - k
        sub = [row[:lead] + [row[col]] for row in rows]
        out.append(det_bareiss(sub))
    return out
