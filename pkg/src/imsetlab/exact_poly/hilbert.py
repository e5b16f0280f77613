"""Hilbert series numerators of monomial ideals, and dimension/degree."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from imsetlab.exact_poly.groebner import IdealHandle
from imsetlab.exact_poly.ring import Ring

Mono = tuple[tuple[int, int], ...]  # sparse exponents: ((var, exp), ...)


@dataclass(frozen=True)
class DimDeg:
    krull_dim: int
    degree: int


def _sparse(exps: Sequence[int]) -> Mono:
    return tuple((v, e) for v, e in enumerate(exps) if e)


def _divides(a: Mono, b: Mono) -> bool:
    bd = dict(b)
    return all(bd.get(v, 0) >= e for v, e in a)


def _minimalize(gens: Iterable[Mono]) -> tuple[Mono, ...]:
    gens = sorted(set(gens), key=lambda m: (sum(e for _, e in m), m))
    out: list[Mono] = []
    for g in gens:
        if not any(_divides(h, g) for h in out):
            out.append(g)
    return tuple(sorted(out))


def _pmul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _padd(a: list[int], b: list[int]) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, y in enumerate(b):
        out[i] += y
    return out


def _shift(a: list[int], k: int) -> list[int]:
    return [0] * k + a


@lru_cache(maxsize=200_000)
def _numerator(gens: tuple[Mono, ...]) -> tuple[int, ...]:
    """K-polynomial of the ideal generated by minimal monomials ``gens``."""
    if not gens:
        return (1,)
    if len(gens) == 1:
        d = sum(e for _, e in gens[0])
        return tuple([1] + [0] * (d - 1) + [-1])
    # split into blocks with disjoint variable support
    comps = _components(gens)
    if len(comps) > 1:
        out = [1]
        for c in comps:
            out = _pmul(out, list(_numerator(c)))
        return tuple(out)
    # pivot on the variable occurring in the most generators
    counts: dict[int, int] = {}
    for g in gens:
        for v, _ in g:
            counts[v] = counts.get(v, 0) + 1
    pivot = max(counts, key=lambda v: (counts[v], -v))
    # exponents from mixed generators only, so the pivot power is not in the ideal
    exps = sorted(dict(g)[pivot] for g in gens if len(g) > 1 and pivot in dict(g))
    e = exps[len(exps) // 2]
    p: Mono = ((pivot, e),)
    # I + <p>
    plus = _minimalize([g for g in gens if not _divides(p, g)] + [p])
    # I : p
    colon = []
    for g in gens:
        d = dict(g)
        if pivot in d:
            rest = d[pivot] - e
            if rest > 0:
                d[pivot] = rest
            else:
                del d[pivot]
        colon.append(tuple(sorted(d.items())))
    colon_min = _minimalize(colon)
    return tuple(_padd(list(_numerator(plus)), _shift(list(_numerator(colon_min)), e)))


def _components(gens: tuple[Mono, ...]) -> list[tuple[Mono, ...]]:
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        vs = [v for v, _ in g]
        for v in vs:
            parent.setdefault(v, v)
        for v in vs[1:]:
            a, b = find(vs[0]), find(v)
            if a != b:
                parent[a] = b
    groups: dict[int, list[Mono]] = {}
    for g in gens:
        groups.setdefault(find(g[0][0]), []).append(g)
    return [tuple(sorted(v)) for v in groups.values()]


def hilbert_numerator(monomials: Iterable[Sequence[int]]) -> list[int]:
    """K-polynomial coefficients (constant term first) of a monomial ideal."""
    gens = _minimalize(_sparse(m) for m in monomials)
    if any(len(g) == 0 for g in gens):
        return [0]
    out = list(_numerator(gens))
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def dim_degree_from_monomials(monomials: Iterable[Sequence[int]], nvars: int) -> DimDeg:
    k = hilbert_numerator(monomials)
    if k == [0]:
        return DimDeg(0, 0)
    codim = 0
    while True:
        total = sum(k)
        if total != 0:
            break
        # divide by (1 - t): coefficients of the quotient are prefix sums
        q = []
        acc = 0
        for c in k[:-1]:
            acc += c
            q.append(acc)
        k = q
        codim += 1
    return DimDeg(nvars - codim, abs(sum(k)))


def dim_degree(I: IdealHandle, ring: Ring | None = None, budget: float | None = None) -> DimDeg:
    """Affine Krull dimension and degree of a homogeneous ideal."""
    ring = ring or Ring(I.ring.names, "grevlex")
    if not all(g.is_homogeneous() for g in I.gens):
        raise ValueError("dim_degree needs homogeneous generators")
    gb = I.groebner(ring, budget)
    if not gb:
        return DimDeg(ring.nvars, 1)
    return dim_degree_from_monomials([ring.unpack(g.lm) for g in gb], ring.nvars)
