"""Buchberger's algorithm specialised to pure difference binomials ``x^a - x^b``.

Such ideals keep every S-polynomial and remainder a pure difference
binomial, and the remainder of a monomial is again a monomial, so a
binomial is just a pair ``(lead, trail)`` of packed monomials.
"""

from __future__ import annotations

import heapq
import time
from typing import Iterable, Sequence

from imsetlab.exact_poly.groebner import BudgetExceeded
from imsetlab.exact_poly.ring import Ring

Binomial = tuple[int, int]


def _orient(ring: Ring, a: int, b: int) -> Binomial | None:
    ka, kb = ring.key(a), ring.key(b)
    if ka == kb:
        return None
    return (a, b) if ka > kb else (b, a)


def _nf_mono(m: int, G: Sequence[Binomial], divides) -> int:
    changed = True
    while changed:
        changed = False
        for lead, trail in G:
            if divides(lead, m):
                m = m - lead + trail
                changed = True
                break
    return m


def binomial_groebner(gens: Iterable[Binomial], ring: Ring, budget: float | None = None) -> list[Binomial]:
    """Reduced Groebner basis of the ideal of the given binomials (pairs of monomials)."""
    deadline = None if budget is None else time.monotonic() + budget
    divides, lcm, coprime, key, degree = ring.divides, ring.lcm, ring.coprime, ring.key, ring.degree
    G: list[Binomial] = []
    alive: list[bool] = []
    heap: list = []
    done: set[tuple[int, int]] = set()

    def add(b: Binomial) -> None:
        k = len(G)
        G.append(b)
        alive.append(True)
        for i in range(k):
            if alive[i]:
                L = lcm(G[i][0], b[0])
                heapq.heappush(heap, (degree(L), key(L), i, k, L))

    for a, b in gens:
        o = _orient(ring, a, b)
        if o is not None:
            add(o)
    while heap:
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetExceeded("binomial Groebner basis exceeded its budget")
        _, _, i, j, L = heapq.heappop(heap)
        done.add((i, j))
        if coprime(G[i][0], G[j][0]):
            continue
        # chain criterion: some k already handled against both i and j
        skip = False
        for k in range(len(G)):
            if k != i and k != j and divides(G[k][0], L):
                if (min(i, k), max(i, k)) in done and (min(j, k), max(j, k)) in done:
                    skip = True
                    break
        if skip:
            continue
        a = L - G[i][0] + G[i][1]
        b = L - G[j][0] + G[j][1]
        active = [g for g, ok in zip(G, alive) if ok]
        a = _nf_mono(a, active, divides)
        b = _nf_mono(b, active, divides)
        o = _orient(ring, a, b)
        if o is not None:
            add(o)
    return _interreduce(ring, G)


def _interreduce(ring: Ring, G: list[Binomial]) -> list[Binomial]:
    divides, key = ring.divides, ring.key
    G = sorted(set(G), key=lambda b: key(b[0]))
    minimal: list[Binomial] = []
    for b in G:
        if not any(divides(c[0], b[0]) for c in minimal):
            minimal.append(b)
    out = []
    for b in minimal:
        others = [c for c in minimal if c is not b]
        out.append((b[0], _nf_mono(b[1], others, divides)))
    out.sort(key=lambda b: key(b[0]), reverse=True)
    return out


def binomial_normal_form(a: int, b: int, G: Sequence[Binomial], ring: Ring) -> Binomial | None:
    """Remainder of ``x^a - x^b`` modulo a binomial Groebner basis; None when it is 0."""
    a = _nf_mono(a, G, ring.divides)
    b = _nf_mono(b, G, ring.divides)
    return _orient(ring, a, b)


def saturate_binomials(gens: Sequence[tuple[Sequence[int], Sequence[int]]], nvars: int,
                       variables: Sequence[int] | None = None, budget: float | None = None,
                       progress=None) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Saturate a homogeneous pure-binomial ideal by each listed variable in turn.

    Binomials are pairs of exponent vectors.  Each step computes a grevlex
    basis with the variable last and strips its powers (valid because every
    generator is homogeneous).  Returns a Groebner basis of the result for
    the last order used.
    """
    deadline = None if budget is None else time.monotonic() + budget
    variables = list(range(nvars)) if variables is None else list(variables)
    cur = [(tuple(a), tuple(b)) for a, b in gens]
    for a, b in cur:
        if sum(a) != sum(b):
            raise ValueError("binomial saturation needs homogeneous binomials")
    for v in variables:
        order = [k for k in range(nvars) if k != v] + [v]
        ring = Ring([f"v{k}" for k in order], "grevlex")

        def pack(e):
            return ring.pack([e[k] for k in order])

        left = None if deadline is None else max(deadline - time.monotonic(), 0.0)
        gb = binomial_groebner([(pack(a), pack(b)) for a, b in cur], ring, left)
        nxt = []
        for lead, trail in gb:
            la, tb = ring.unpack(lead), ring.unpack(trail)
            e = min(la[-1], tb[-1])
            ea = [0] * nvars
            eb = [0] * nvars
            for pos, k in enumerate(order):
                ea[k] = la[pos]
                eb[k] = tb[pos]
            ea[v] -= e
            eb[v] -= e
            nxt.append((tuple(ea), tuple(eb)))
        cur = nxt
        if progress:
            progress(f"saturated by variable {v + 1}: {len(cur)} binomials")
    return cur
