"""Conditional independence statements over ``n`` variables.

Statements are triples ``(I, J, K)`` of disjoint index sets with ``I`` and
``J`` nonempty.  They are stored canonically: ``min(I) < min(J)``, each set
a strictly increasing tuple.  Subsets of ``[n]`` are encoded as bitmasks
``sum(2**(i - 1) for i in S)`` everywhere in this package.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Callable, Hashable, Iterable, Sequence, TypeVar

T = TypeVar("T", bound=Hashable)

STRUCTURAL_TYPES = ("TypeI", "TypeII", "TypeIII", "TypeIV")


class DomainError(ValueError):
    """An argument is outside the domain of an operation."""


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << (i - 1)
    return m


def members(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _as_set(xs: Iterable[int]) -> tuple[int, ...]:
    xs = tuple(xs)
    s = tuple(sorted(set(xs)))
    if len(s) != len(xs):
        raise DomainError(f"repeated index in {xs}")
    if s and s[0] < 1:
        raise DomainError(f"variable indices start at 1, got {s[0]}")
    return s


@dataclass(frozen=True, order=False)
class CIStatement:
    """``I _||_ J | K`` in canonical form."""

    I: tuple[int, ...]
    J: tuple[int, ...]
    K: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        I, J, K = _as_set(self.I), _as_set(self.J), _as_set(self.K)
        if not I or not J:
            raise DomainError("both independent sides must be nonempty")
        if set(I) & set(J) or set(I) & set(K) or set(J) & set(K):
            raise DomainError(f"sets are not pairwise disjoint: {I}, {J}, {K}")
        if J[0] < I[0]:
            I, J = J, I
        object.__setattr__(self, "I", I)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "K", K)

    @classmethod
    def from_masks(cls, i_mask: int, j_mask: int, k_mask: int = 0) -> CIStatement:
        return cls(members(i_mask), members(j_mask), members(k_mask))

    @property
    def i_mask(self) -> int:
        return mask_of(self.I)

    @property
    def j_mask(self) -> int:
        return mask_of(self.J)

    @property
    def k_mask(self) -> int:
        return mask_of(self.K)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self.I + self.J + self.K))

    @property
    def max_index(self) -> int:
        return max(self.support)

    def elementary(self) -> bool:
        return len(self.I) == 1 and len(self.J) == 1

    def sort_key(self) -> tuple[int, int, int, int, int]:
        return (self.I[0], self.J[0], self.k_mask, self.i_mask, self.j_mask)

    def __lt__(self, other: CIStatement) -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        def fmt(s: tuple[int, ...]) -> str:
            return "".join(map(str, s)) if s else "e"

        return f"{fmt(self.I)} _||_ {fmt(self.J)} | {fmt(self.K)}"


def sigma(n: int) -> int:
    """Number of elementary statements on ``n`` variables, C(n,2)*2**(n-2)."""
    if n < 2:
        raise DomainError(f"sigma needs n >= 2, got {n}")
    return comb(n, 2) * 2 ** (n - 2)


def enumerate_elementary(n: int) -> list[CIStatement]:
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    full = (1 << n) - 1
    out = []
    for i, j in itertools.combinations(range(1, n + 1), 2):
        rest = full & ~(1 << (i - 1)) & ~(1 << (j - 1))
        for k in range(full + 1):
            if k & ~rest == 0:
                out.append(CIStatement((i,), (j,), members(k)))
    out.sort()
    return out


# Shape templates (sizes of I, J, K) of the non-elementary statements whose
# imsets are sums of elementary imsets, together with the n=4 type tag.
_SHAPES = {
    3: [((2, 1, 0), None)],
    4: [
        ((2, 2, 0), "TypeI"),
        ((3, 1, 0), "TypeII"),
        ((2, 1, 0), "TypeIII"),
        ((2, 1, 1), "TypeIV"),
    ],
}


def _statements_of_shape(n: int, a: int, b: int, c: int) -> list[CIStatement]:
    found = set()
    idx = range(1, n + 1)
    for I in itertools.combinations(idx, a):
        rest = [x for x in idx if x not in I]
        for J in itertools.combinations(rest, b):
            rest2 = [x for x in rest if x not in J]
            for K in itertools.combinations(rest2, c):
                found.add(CIStatement(I, J, K))
    return sorted(found)


def structural_type(s: CIStatement) -> str | None:
    """n = 4 type tag of a non-elementary statement, ``None`` if no type fits."""
    sizes = sorted((len(s.I), len(s.J)), reverse=True)
    k = len(s.K)
    table = {((2, 2), 0): "TypeI", ((3, 1), 0): "TypeII",
             ((2, 1), 0): "TypeIII", ((2, 1), 1): "TypeIV"}
    return table.get((tuple(sizes), k))


def enumerate_structural(n: int, certify: bool = True) -> list[tuple[CIStatement, str | None]]:
    """Non-elementary statements that are sums of at least two elementary imsets.

    Only n = 3 and n = 4 are supported.  With ``certify`` each candidate must
    admit a decomposition found by :func:`imsetlab.imset_core.decompose`.
    """
    if n not in _SHAPES:
        raise DomainError(f"structural enumeration supports n in (3, 4), got {n}")
    out = []
    for (a, b, c), tag in _SHAPES[n]:
        for s in _statements_of_shape(n, a, b, c):
            out.append((s, tag))
    if certify:
        from imsetlab.imset_core import decompose

        for s, _ in out:
            budget = len(s.I) * len(s.J)
            if not decompose(s, n, budget, limit=1):
                raise AssertionError(f"{s} has no elementary decomposition")
    return out


@dataclass(frozen=True)
class Permutation:
    """A bijection on ``[n]``; ``images[i - 1]`` is the image of ``i``."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        imgs = tuple(self.images)
        if sorted(imgs) != list(range(1, len(imgs) + 1)):
            raise DomainError(f"not a permutation of 1..{len(imgs)}: {imgs}")
        object.__setattr__(self, "images", imgs)

    @property
    def n(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def transposition(cls, n: int, a: int, b: int) -> Permutation:
        imgs = list(range(1, n + 1))
        imgs[a - 1], imgs[b - 1] = b, a
        return cls(tuple(imgs))

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def compose(self, other: Permutation) -> Permutation:
        """``self o other``: apply ``other`` first."""
        return Permutation(tuple(self(other(i)) for i in range(1, self.n + 1)))

    def inverse(self) -> Permutation:
        inv = [0] * self.n
        for i, g in enumerate(self.images, start=1):
            inv[g - 1] = i
        return Permutation(tuple(inv))

    def map_mask(self, mask: int) -> int:
        return mask_of(self(i) for i in members(mask))


def all_permutations(n: int) -> list[Permutation]:
    return [Permutation(p) for p in itertools.permutations(range(1, n + 1))]


def apply_permutation(s: CIStatement, g: Permutation) -> CIStatement:
    if s.max_index > g.n:
        raise DomainError(f"{s} uses indices beyond the permutation's n={g.n}")
    return CIStatement(tuple(map(g, s.I)), tuple(map(g, s.J)), tuple(map(g, s.K)))


def orbit_partition(
    items: Sequence[T],
    act: Callable[[T, Permutation], T],
    n: int,
    key: Callable[[T], object] | None = None,
    check_samples: int = 4,
    closed: bool = True,
) -> list[list[T]]:
    """Split ``items`` into orbits of the symmetric group on ``[n]``.

    With ``closed`` every image of an item under ``act`` must itself be in
    ``items``; otherwise each class is an orbit intersected with ``items``.
    Orbits are sorted internally by ``key`` and listed by their minimal member.
    """
    key = key or (lambda x: x)
    group = all_permutations(n)
    ident = Permutation.identity(n)
    pool = set(items)
    for x in list(items)[:check_samples]:
        if act(x, ident) != x:
            raise RuntimeError(f"identity does not fix {x!r}")
        for g, h in ((group[-1], group[1 % len(group)]), (group[len(group) // 2], group[-1])):
            if act(x, g.compose(h)) != act(act(x, h), g):
                raise RuntimeError("action is not compatible with composition")
    seen: set = set()
    orbits = []
    for x in items:
        if x in seen:
            continue
        orbit = {act(x, g) for g in group}
        missing = orbit - pool
        if missing and closed:
            raise RuntimeError(f"orbit of {x!r} leaves the item set: {next(iter(missing))!r}")
        orbit &= pool
        seen |= orbit
        orbits.append(sorted(orbit, key=key))
    orbits.sort(key=lambda o: key(o[0]))
    return orbits
