"""Imsets: the map from CI statements to integer vectors on the power set.

Coordinates are indexed by subset bitmasks, so ``coeffs[mask]`` is the
value at ``{i : bit i-1 of mask set}``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from imsetlab.ci_model import CIStatement, DomainError, enumerate_elementary, members, sigma
from imsetlab.relation_lang import BinomialExpr, CIRelation, render


@dataclass(frozen=True)
class Imset:
    n: int
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coeffs) != 1 << self.n:
            raise DomainError(f"imset over n={self.n} needs {1 << self.n} entries")

    @classmethod
    def zero(cls, n: int) -> Imset:
        return cls(n, (0,) * (1 << n))

    def __add__(self, other: Imset) -> Imset:
        if other.n != self.n:
            raise DomainError(f"cannot add imsets over n={self.n} and n={other.n}")
        return Imset(self.n, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: Imset) -> Imset:
        if other.n != self.n:
            raise DomainError(f"cannot subtract imsets over n={self.n} and n={other.n}")
        return Imset(self.n, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def support(self) -> dict[int, int]:
        return {m: c for m, c in enumerate(self.coeffs) if c}


def _check_within(s: CIStatement, n: int) -> None:
    if s.max_index > n:
        raise DomainError(f"{s} is not a statement over n={n}")


def semi_elementary_imset(s: CIStatement, n: int) -> Imset:
    """``e_{IJK} + e_K - e_{IK} - e_{JK}``."""
    _check_within(s, n)
    c = [0] * (1 << n)
    i, j, k = s.i_mask, s.j_mask, s.k_mask
    c[i | j | k] += 1
    c[k] += 1
    c[i | k] -= 1
    c[j | k] -= 1
    return Imset(n, tuple(c))


def elementary_imset(s: CIStatement, n: int) -> Imset:
    if not s.elementary():
        raise DomainError(f"{s} is not elementary")
    return semi_elementary_imset(s, n)


@dataclass(frozen=True)
class ImsetMatrix:
    """Columns are the elementary imsets in canonical statement order."""

    n: int
    statements: tuple[CIStatement, ...]
    columns: tuple[Imset, ...]

    @property
    def rows(self) -> list[list[int]]:
        return [[col.coeffs[m] for col in self.columns] for m in range(1 << self.n)]

    def index(self, s: CIStatement) -> int:
        return self._index[s]

    @property
    def _index(self) -> dict[CIStatement, int]:
        cache = self.__dict__.get("_index_cache")
        if cache is None:
            cache = {s: k for k, s in enumerate(self.statements)}
            object.__setattr__(self, "_index_cache", cache)
        return cache

    def apply(self, x: Sequence[int]) -> Imset:
        """Image of an integer combination of the columns."""
        c = [0] * (1 << self.n)
        for coef, col in zip(x, self.columns):
            if coef:
                for m, v in enumerate(col.coeffs):
                    if v:
                        c[m] += coef * v
        return Imset(self.n, tuple(c))

    def rank(self) -> int:
        return integer_rank([list(col.coeffs) for col in self.columns])

    def to_csv(self) -> str:
        from imsetlab.relation_lang import subset_key

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["subset"] + [render(s) for s in self.statements])
        for m, row in enumerate(self.rows):
            w.writerow([subset_key(m) or "e"] + row)
        return buf.getvalue()

    def to_json(self) -> str:
        from imsetlab.relation_lang import statement_to_json, subset_key

        return json.dumps({
            "n": self.n,
            "rows": [subset_key(m) for m in range(1 << self.n)],
            "columns": [statement_to_json(s) for s in self.statements],
            "matrix": self.rows,
        })


def integer_rank(vectors: Iterable[Sequence[int]]) -> int:
    """Rank over Q via fraction-free elimination."""
    rows = [list(v) for v in vectors if any(v)]
    rank = 0
    if not rows:
        return 0
    ncols = len(rows[0])
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank]
        for r in range(rank + 1, len(rows)):
            a = rows[r][col]
            if a:
                b = p[col]
                rows[r] = [b * x - a * y for x, y in zip(rows[r], p)]
        rank += 1
        if rank == len(rows):
            break
    return rank


def build_matrix(n: int) -> ImsetMatrix:
    if not 2 <= n <= 9:
        raise DomainError(f"matrix construction supports 2 <= n <= 9, got {n}")
    stmts = tuple(enumerate_elementary(n))
    return ImsetMatrix(n, stmts, tuple(elementary_imset(s, n) for s in stmts))


def recognize_semi_elementary(u: Imset) -> CIStatement | None:
    supp = u.support()
    if len(supp) != 4:
        return None
    pos = [m for m, c in supp.items() if c == 1]
    neg = [m for m, c in supp.items() if c == -1]
    if len(pos) != 2 or len(neg) != 2:
        return None
    low, top = sorted(pos, key=lambda m: bin(m).count("1"))
    a, b = neg
    if a & b != low or a | b != top or low & ~top:
        return None
    i, j = a & ~low, b & ~low
    if not i or not j:
        return None
    return CIStatement.from_masks(i, j, low)


def sum_imsets(side: Iterable[CIStatement], n: int) -> Imset:
    total = [0] * (1 << n)
    for s in side:
        for m, c in semi_elementary_imset(s, n).support().items():
            total[m] += c
    return Imset(n, tuple(total))


@dataclass
class VerificationReport:
    relation: CIRelation
    n: int
    side_imsets: list[Imset]
    sides_equal: list[list[bool]]
    recognized: CIStatement | None
    side_statements: list[CIStatement | None]
    target_matches: bool | None
    valid: bool
    notes: list[str] = field(default_factory=list)


def verify_relation(r: CIRelation, n: int | None = None) -> VerificationReport:
    """Check that every side (and the declared target) has the same imset."""
    n = n or r.n
    sides = r.all_sides()
    imsets = [sum_imsets(side, n) for side in sides]
    eq = [[a == b for b in imsets] for a in imsets]
    all_equal = all(all(row) for row in eq)
    per_side = [recognize_semi_elementary(u) for u in imsets]
    recognized = per_side[0] if all_equal else None
    matches = None
    notes = []
    if r.target is not None:
        matches = all_equal and recognized == r.target
        if all_equal and not matches:
            got = render(recognized) if recognized else "no semi-elementary statement"
            notes.append(f"sides sum to {got}, not the declared {render(r.target)}")
    for a in range(len(sides)):
        for b in range(a + 1, len(sides)):
            if not eq[a][b]:
                notes.append(f"side {a + 1} != side {b + 1}")
    if not all_equal:
        for a, st in enumerate(per_side, start=1):
            notes.append(f"side {a} sums to {render(st) if st else 'a non-semi-elementary imset'}")
    valid = all_equal and matches is not False
    return VerificationReport(r, n, imsets, eq, recognized, per_side, matches, valid, notes)


@dataclass(frozen=True)
class Decomposition:
    target: CIStatement
    parts: tuple[CIStatement, ...]


def _terms_by_coordinate(n: int) -> tuple[list[CIStatement], dict, dict]:
    elems = enumerate_elementary(n)
    plus: dict[int, list[int]] = {}
    minus: dict[int, list[int]] = {}
    for k, s in enumerate(elems):
        i, j, K = s.i_mask, s.j_mask, s.k_mask
        for m in (i | j | K, K):
            plus.setdefault(m, []).append(k)
        for m in (i | K, j | K):
            minus.setdefault(m, []).append(k)
    return elems, plus, minus


def decompose(target: CIStatement, n: int, max_terms: int, limit: int | None = None) -> list[Decomposition]:
    """Every multiset of at most ``max_terms`` elementary statements summing to the target.

    The search fixes the most negative (then most positive) coordinate of the
    residual and branches over the elementary imsets that can cancel it.
    """
    if target.elementary():
        raise DomainError(f"{target} is elementary; nothing to decompose")
    if max_terms < 2:
        raise DomainError("max_terms must be at least 2")
    elems, plus, minus = _terms_by_coordinate(n)
    cols = [elementary_imset(s, n).support() for s in elems]
    residual = list(semi_elementary_imset(target, n).coeffs)
    found: set[tuple[int, ...]] = set()
    chosen: list[int] = []

    def search(left: int) -> bool:
        norm = sum(map(abs, residual))
        if norm == 0:
            found.add(tuple(sorted(chosen)))
            return limit is not None and len(found) >= limit
        if left == 0 or norm > 4 * left:
            return False
        m = min(range(len(residual)), key=lambda x: (residual[x], -abs(residual[x])))
        if residual[m] < 0:
            cands = minus.get(m, ())
        else:
            m = max(range(len(residual)), key=residual.__getitem__)
            cands = plus.get(m, ())
        for k in cands:
            for mm, c in cols[k].items():
                residual[mm] -= c
            chosen.append(k)
            stop = search(left - 1)
            chosen.pop()
            for mm, c in cols[k].items():
                residual[mm] += c
            if stop:
                return True
        return False

    search(max_terms)
    out = [Decomposition(target, tuple(elems[k] for k in combo)) for combo in found]
    out.sort(key=lambda d: (len(d.parts), [s.sort_key() for s in d.parts]))
    return out


def extend_quadratic_binomial(b: BinomialExpr, n: int) -> CIRelation | None:
    """Three-sided relation ``[plus] = [minus] = [target]`` if the sums agree on a semi-elementary imset."""
    if len(b.plus) != 2 or len(b.minus) != 2:
        raise DomainError("extension is defined for quadratic binomials only")
    left, right = sum_imsets(b.plus, n), sum_imsets(b.minus, n)
    if left != right:
        return None
    target = recognize_semi_elementary(left)
    if target is None or target.elementary():
        return None
    return CIRelation((b.plus, b.minus), target)
