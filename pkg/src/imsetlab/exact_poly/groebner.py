"""Buchberger's algorithm, normal forms, elimination and saturation."""

from __future__ import annotations

import threading
import time
from heapq import heapify, heappop, heappush
from typing import Iterable, Sequence

from gmpy2 import mpq

from imsetlab.exact_poly.polynomial import Polynomial
from imsetlab.exact_poly.ring import Ring, RingError


class BudgetExceeded(RuntimeError):
    """A computation ran past its wall-clock budget."""


def _deadline(budget: float | None) -> float | None:
    return None if budget is None else time.monotonic() + budget


def _reduce_terms(ring: Ring, start: dict, basis: Sequence[Polynomial]) -> tuple:
    """Fully reduce the polynomial given as ``{mono: coef}`` by monic ``basis``."""
    key, flip, guard = ring.key, ring.flip, ring.guard
    divides = ring.divides
    acc = dict(start)
    heap = [-key(m) for m in acc]
    heapify(heap)
    lms = [(g.lm, g.terms[1:]) for g in basis]
    out = []
    while heap:
        m = (-heappop(heap)) ^ flip
        c = acc.pop(m, None)
        if not c:
            continue
        for lm, tail in lms:
            if divides(lm, m):
                q = m - lm
                for gm, gc in tail:
                    t = gm + q
                    if t & guard:
                        raise OverflowError("monomial exponent overflow")
                    old = acc.get(t)
                    if old is None:
                        acc[t] = -c * gc
                        heappush(heap, -key(t))
                    else:
                        acc[t] = old - c * gc
                break
        else:
            out.append((m, c))
    return tuple(out)


def normal_form(f: Polynomial, G: Sequence[Polynomial], ring: Ring | None = None) -> Polynomial:
    """Remainder of ``f`` on division by ``G`` (divisors tried in list order)."""
    ring = ring or f.ring
    if f.ring != ring or any(g.ring != ring for g in G):
        raise RingError("normal_form arguments live in different rings")
    if not G:
        raise ValueError("normal_form needs a nonempty divisor list")
    monic = [g.monic() for g in G if g]
    return Polynomial._from_sorted(ring, _reduce_terms(ring, dict(f.terms), monic))


def _spoly_terms(ring: Ring, f: Polynomial, g: Polynomial) -> dict:
    L = ring.lcm(f.lm, g.lm)
    qf, qg = L - f.lm, L - g.lm
    acc: dict[int, mpq] = {}
    for m, c in f.terms[1:]:
        t = m + qf
        acc[t] = acc.get(t, 0) + c
    for m, c in g.terms[1:]:
        t = m + qg
        acc[t] = acc.get(t, 0) - c
    return acc


def _update(ring: Ring, f: list[Polynomial], G: list[int], B: list, ih: int):
    """Gebauer-Moeller installation of ``f[ih]`` into basis ``G`` and pair list ``B``."""
    lcm, divides, coprime = ring.lcm, ring.divides, ring.coprime
    mh = f[ih].lm
    C = list(G)
    D: list[tuple[int, int, int]] = []
    while C:
        ig = C.pop()
        mg = f[ig].lm
        lhg = lcm(mh, mg)
        if coprime(mh, mg):
            D.append((ih, ig, lhg))
            continue
        redundant = any(divides(lcm(mh, f[ip].lm), lhg) for ip in C) or \
            any(divides(lcm(mh, f[jp].lm), lhg) for _, jp, _ in D)
        if not redundant:
            D.append((ih, ig, lhg))
    E = [(a, b, L) for a, b, L in D if not coprime(mh, f[b].lm)]
    B_new = []
    for g1, g2, L12 in B:
        if (not divides(mh, L12) or lcm(f[g1].lm, mh) == L12
                or lcm(f[g2].lm, mh) == L12):
            B_new.append((g1, g2, L12))
    B_new.extend(E)
    G_new = [ig for ig in G if not divides(mh, f[ig].lm)]
    G_new.append(ih)
    return G_new, B_new


def groebner(gens: Iterable[Polynomial], ring: Ring, budget: float | None = None) -> list[Polynomial]:
    """Reduced Groebner basis (monic, sorted by decreasing leading monomial)."""
    deadline = _deadline(budget)
    f = []
    for g in gens:
        g = g.to_ring(ring) if g.ring != ring else g
        if g:
            f.append(g.monic())
    if not f:
        return []
    degree, key = ring.degree, ring.key
    G: list[int] = []
    B: list = []
    for i in range(len(f)):
        G, B = _update(ring, f, G, B, i)
    while B:
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetExceeded("Groebner basis computation exceeded its budget")
        best = min(range(len(B)), key=lambda k: (degree(B[k][2]), key(B[k][2])))
        ig1, ig2, _ = B[best]
        B[best] = B[-1]
        B.pop()
        s = _spoly_terms(ring, f[ig1], f[ig2])
        h = _reduce_terms(ring, s, [f[i] for i in G])
        if h:
            f.append(Polynomial._from_sorted(ring, h).monic())
            G, B = _update(ring, f, G, B, len(f) - 1)
    return _interreduce(ring, [f[i] for i in G])


def _interreduce(ring: Ring, polys: list[Polynomial]) -> list[Polynomial]:
    divides = ring.divides
    minimal = []
    polys = sorted(polys, key=lambda p: ring.key(p.lm))
    for p in polys:
        if not any(divides(q.lm, p.lm) for q in minimal):
            minimal.append(p)
    out = []
    for k, p in enumerate(minimal):
        others = minimal[:k] + minimal[k + 1:]
        tail = _reduce_terms(ring, dict(p.terms[1:]), others) if others else p.terms[1:]
        out.append(Polynomial(ring, (p.terms[0],) + tuple(tail)).monic())
    out.sort(key=lambda p: ring.key(p.lm), reverse=True)
    return out


def is_groebner(G: Sequence[Polynomial], ring: Ring) -> bool:
    """Buchberger's criterion: every S-polynomial reduces to zero."""
    G = [g.monic() for g in G if g]
    for a in range(len(G)):
        for b in range(a + 1, len(G)):
            if ring.coprime(G[a].lm, G[b].lm):
                continue
            if _reduce_terms(ring, _spoly_terms(ring, G[a], G[b]), G):
                return False
    return True


def is_reduced(G: Sequence[Polynomial], ring: Ring) -> bool:
    for a, g in enumerate(G):
        if g.lc != 1:
            return False
        for b, h in enumerate(G):
            if a != b and any(ring.divides(h.lm, m) for m, _ in g.terms):
                return False
    return True


class IdealHandle:
    """Generators plus a write-once cache of reduced Groebner bases per ring order."""

    def __init__(self, gens: Iterable[Polynomial], ring: Ring):
        self.ring = ring
        self.gens = []
        for g in gens:
            if g.ring != ring:
                raise RingError("generator ring differs from the ideal's ring")
            if g:
                self.gens.append(g)
        self._gb: dict[Ring, list[Polynomial]] = {}
        self._lock = threading.Lock()

    def groebner(self, ring: Ring | None = None, budget: float | None = None) -> list[Polynomial]:
        ring = ring or self.ring
        if ring.names != self.ring.names:
            raise RingError("Groebner ring must have the ideal's variables")
        with self._lock:
            cached = self._gb.get(ring)
        if cached is not None:
            return cached
        gb = groebner([g.to_ring(ring) for g in self.gens], ring, budget)
        with self._lock:
            return self._gb.setdefault(ring, gb)

    def __repr__(self) -> str:
        return f"IdealHandle({len(self.gens)} generators in {self.ring!r})"


def ideal_membership(f: Polynomial, I: IdealHandle, ring: Ring | None = None) -> bool:
    ring = ring or I.ring
    if f.ring.names != I.ring.names:
        raise RingError("polynomial and ideal live in different rings")
    if not f:
        return True
    gb = I.groebner(ring)
    if not gb:
        return False
    return not normal_form(f.to_ring(ring), gb, ring)


def ideal_contains(outer: IdealHandle, inner: IdealHandle, ring: Ring | None = None) -> list[bool]:
    """Per-generator membership of ``inner``'s generators in ``outer``."""
    return [ideal_membership(g, outer, ring) for g in inner.gens]


def ideal_equal(I: IdealHandle, J: IdealHandle, ring: Ring | None = None) -> bool:
    ring = ring or I.ring
    if I.ring.names != J.ring.names:
        raise RingError("ideals live in different rings")
    a, b = I.groebner(ring), J.groebner(ring)
    return [p.terms for p in a] == [p.terms for p in b]


def eliminate(I: IdealHandle, vars_to_remove: Sequence[str | int], budget: float | None = None) -> IdealHandle:
    """Generators of the intersection of ``I`` with the subring of the remaining variables."""
    ring = I.ring
    drop = [ring.names[v] if isinstance(v, int) else v for v in vars_to_remove]
    for nm in drop:
        if nm not in ring.index:
            raise RingError(f"unknown variable {nm!r}")
    keep = [nm for nm in ring.names if nm not in drop]
    if not drop:
        return IdealHandle(I.gens, ring)
    order = ring.order if ring.order != "elim" else "grevlex"
    target = Ring(keep, order) if keep else None
    elim_ring = Ring(list(drop) + keep, "elim", (len(drop), len(keep)) if keep else None) \
        if keep else Ring(list(drop), "grevlex")
    gb = groebner([g.to_ring(elim_ring) for g in I.gens], elim_ring, budget)
    drop_idx = set(range(len(drop)))
    survivors = [g for g in gb if not (g.variables_used() & drop_idx)]
    if target is None:
        return IdealHandle([], Ring(["_"], "grevlex"))
    return IdealHandle([g.to_ring(target) for g in survivors], target)


def _aux_name(ring: Ring) -> str:
    name = "_t"
    while name in ring.index:
        name += "_"
    return name


def saturate_variable(I: IdealHandle, v: str | int, method: str = "elimination",
                      budget: float | None = None) -> IdealHandle:
    """``(I : v^inf)``.

    ``elimination`` adjoins ``t*v - 1`` and eliminates ``t``.  ``grevlex``
    needs homogeneous generators: it computes a grevlex basis with ``v``
    as the smallest variable and divides out every power of ``v``.
    """
    ring = I.ring
    name = ring.names[v] if isinstance(v, int) else v
    if name not in ring.index:
        raise RingError(f"unknown variable {name!r}")
    if method == "elimination":
        t = _aux_name(ring)
        big = Ring((t,) + ring.names, "grevlex")
        tv = Polynomial(big, [(big.pack([1 if k in (0, big.index[name]) else 0 for k in range(big.nvars)]), 1),
                              (big.one, -1)])
        J = IdealHandle([g.to_ring(big) for g in I.gens] + [tv], big)
        out = eliminate(J, [t], budget)
        return IdealHandle([g.to_ring(ring) for g in out.gens], ring)
    if method == "grevlex":
        if not all(g.is_homogeneous() for g in I.gens):
            raise ValueError("grevlex saturation needs homogeneous generators")
        names = [nm for nm in ring.names if nm != name] + [name]
        rev = Ring(names, "grevlex")
        gb = groebner([g.to_ring(rev) for g in I.gens], rev, budget)
        last = rev.nvars - 1
        out = []
        for g in gb:
            low = min(rev.unpack(m)[last] for m, _ in g.terms)
            if low:
                g = Polynomial(rev, [(m - rev.var(last, low), c) for m, c in g.terms])
            out.append(g.to_ring(ring))
        return IdealHandle(out, ring)
    raise ValueError(f"unknown saturation method {method!r}")
