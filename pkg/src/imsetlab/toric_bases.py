"""Toric ideal of the elementary imset matrix: lattice, Markov and Graver bases.

Vectors live in Z^sigma(n), indexed by the canonical order of elementary
statements.  A vector ``v`` stands for the binomial ``x^{v+} - x^{v-}``.
"""

from __future__ import annotations

import heapq
import time
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from imsetlab.ci_model import DomainError, Permutation, apply_permutation, orbit_partition
from imsetlab.exact_poly import BudgetExceeded, IdealHandle, Polynomial, Ring, saturate_variable
from imsetlab.exact_poly.binomial import saturate_binomials
from imsetlab.imset_core import ImsetMatrix, build_matrix, extend_quadratic_binomial
from imsetlab.relation_lang import BinomialExpr, CIRelation, render

LatticeVector = tuple[int, ...]


class PartialResult(BudgetExceeded):
    """Budget ran out; ``partial`` holds what had been computed."""

    def __init__(self, message: str, partial: list):
        super().__init__(message)
        self.partial = partial


def _canonical_sign(v: Sequence[int]) -> LatticeVector:
    for x in v:
        if x:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    raise DomainError("zero vector has no binomial")


@dataclass(frozen=True)
class ToricBinomial:
    vector: LatticeVector

    @classmethod
    def from_vector(cls, v: Sequence[int]) -> ToricBinomial:
        return cls(_canonical_sign([int(x) for x in v]))

    @property
    def plus(self) -> tuple[int, ...]:
        return tuple(max(x, 0) for x in self.vector)

    @property
    def minus(self) -> tuple[int, ...]:
        return tuple(max(-x, 0) for x in self.vector)

    @property
    def degree(self) -> int:
        return max(sum(self.plus), sum(self.minus))

    def sort_key(self):
        return (self.degree, tuple(-x for x in self.vector))

    def to_expr(self, A: ImsetMatrix) -> BinomialExpr:
        def mono(e):
            return tuple(s for s, k in zip(A.statements, e) for _ in range(k))
        return BinomialExpr(mono(self.plus), mono(self.minus))

    def to_text(self, A: ImsetMatrix) -> str:
        return render(self.to_expr(A))

    def to_polynomial(self, ring: Ring) -> Polynomial:
        return Polynomial.from_exponents(ring, [(self.plus, 1), (self.minus, -1)])

    def to_json(self, A: ImsetMatrix | None = None) -> dict:
        out = {"vector": list(self.vector), "degree": self.degree}
        if A is not None:
            out["text"] = self.to_text(A)
        return out


def canonical_order(binomials: Iterable[ToricBinomial]) -> list[ToricBinomial]:
    return sorted(set(binomials), key=ToricBinomial.sort_key)


def _as_matrix(A: ImsetMatrix | int) -> ImsetMatrix:
    return build_matrix(A) if isinstance(A, int) else A


def in_kernel(A: ImsetMatrix, v: Sequence[int]) -> bool:
    return A.apply(v).is_zero()


# ---------------------------------------------------------------------------
# integer kernel

def _integer_kernel(cols: list[list[int]]) -> list[list[int]]:
    """Z-basis of {x : sum_k x_k cols[k] = 0} by unimodular row reduction of [cols | I]."""
    m = len(cols)
    width = len(cols[0]) if cols else 0
    rows = [list(c) + [int(k == j) for j in range(m)] for k, c in enumerate(cols)]
    r = 0
    for col in range(width):
        while True:
            live = [k for k in range(r, m) if rows[k][col]]
            if not live:
                break
            piv = min(live, key=lambda k: abs(rows[k][col]))
            rows[r], rows[piv] = rows[piv], rows[r]
            done = True
            for k in range(r + 1, m):
                if rows[k][col]:
                    q = rows[k][col] // rows[r][col]
                    rows[k] = [a - q * b for a, b in zip(rows[k], rows[r])]
                    if rows[k][col]:
                        done = False
            if done:
                r += 1
                break
        if r == m:
            break
    return [row[width:] for row in rows[r:]]


def _lll(basis: list[list[int]]) -> list[list[int]]:
    from sympy import ZZ
    from sympy.polys.matrices import DomainMatrix

    if not basis:
        return basis
    M = DomainMatrix([[ZZ(x) for x in row] for row in basis], (len(basis), len(basis[0])), ZZ)
    return [[int(x) for x in row] for row in M.lll().to_list()]


def kernel_basis(A: ImsetMatrix | int, reduce: bool = True) -> list[LatticeVector]:
    """Z-basis of ker(A) of size sigma(n) - rank(A), LLL-reduced by default."""
    A = _as_matrix(A)
    basis = _integer_kernel([list(col.coeffs) for col in A.columns])
    if reduce:
        basis = _lll(basis)
    return [tuple(v) for v in basis]


# ---------------------------------------------------------------------------
# Markov basis

def toric_ring(A: ImsetMatrix, order: str = "grevlex") -> Ring:
    return Ring([f"x{k + 1}" for k in range(len(A.statements))], order)


def lattice_ideal(A: ImsetMatrix, ring: Ring | None = None) -> IdealHandle:
    """Toric ideal of ``A``: lattice-basis ideal saturated by every variable in turn."""
    ring = ring or toric_ring(A)
    gens = [ToricBinomial.from_vector(v).to_polynomial(ring) for v in kernel_basis(A)]
    return IdealHandle(gens, ring)


def saturated_toric_ideal(A: ImsetMatrix, method: str = "grevlex", budget: float | None = None,
                          progress: Callable[[str], None] | None = None) -> IdealHandle:
    deadline = None if budget is None else time.monotonic() + budget
    I = lattice_ideal(A)
    for v in range(I.ring.nvars):
        left = None if deadline is None else max(deadline - time.monotonic(), 0.0)
        I = saturate_variable(I, v, method=method, budget=left)
        if progress:
            progress(f"saturated by {I.ring.names[v]}: {len(I.gens)} generators")
    return I


def _binomial_vector(p: Polynomial) -> tuple[int, ...]:
    if len(p.terms) != 2 or p.terms[0][1] != -p.terms[1][1]:
        raise DomainError(f"{p} is not a pure difference binomial")
    a, b = (p.ring.unpack(m) for m, _ in p.terms)
    return tuple(x - y for x, y in zip(a, b))


def _moves_connect(u: tuple[int, ...], v: tuple[int, ...], moves: list[tuple[int, ...]],
                   limit: int = 200_000) -> bool:
    """Is ``v`` reachable from ``u`` inside their fiber using ``+-moves``?

    For pure difference binomials this is exactly membership of
    ``x^u - x^v`` in the ideal the moves generate.
    """
    if u == v:
        return True
    seen = {u}
    queue = deque([u])
    signed = [(m, tuple(i for i, x in enumerate(m) if x)) for m in moves]
    signed += [(tuple(-x for x in m), sup) for m, sup in signed]
    while queue:
        w = queue.popleft()
        for m, sup in signed:
            if all(w[i] - m[i] >= 0 for i in sup):
                nxt = tuple(a - b for a, b in zip(w, m))
                if nxt == v:
                    return True
                if nxt not in seen:
                    seen.add(nxt)
                    if len(seen) > limit:
                        raise RuntimeError("fiber exploration limit reached")
                    queue.append(nxt)
    return False


def minimalize(vectors: Iterable[Sequence[int]]) -> list[ToricBinomial]:
    """Minimal generating subset, scanning in increasing degree.

    A candidate is dropped when its endpoints are already connected in their
    fiber by the moves kept so far (the candidate lies in their ideal).
    """
    cands = canonical_order(ToricBinomial.from_vector(v) for v in vectors)
    kept: list[ToricBinomial] = []
    for b in cands:
        if not _moves_connect(b.plus, b.minus, [k.vector for k in kept]):
            kept.append(b)
    return canonical_order(kept)


def markov_basis(A: ImsetMatrix | int, method: str = "binomial", budget: float | None = None,
                 progress: Callable[[str], None] | None = None) -> list[ToricBinomial]:
    """Minimal binomial generating set of the toric ideal of ``A``.

    ``method`` picks the saturation engine: ``binomial`` (pure-binomial
    Buchberger), or ``grevlex`` / ``elimination`` through the general
    polynomial code.
    """
    A = _as_matrix(A)
    if A.n > 5:
        raise DomainError(f"Markov bases are supported for n <= 5, got {A.n}")
    try:
        if method == "binomial":
            gens = [(b.plus, b.minus) for b in (ToricBinomial.from_vector(v) for v in kernel_basis(A))]
            sat = saturate_binomials(gens, len(A.statements), budget=budget, progress=progress)
            vectors = [tuple(x - y for x, y in zip(a, b)) for a, b in sat]
        else:
            I = saturated_toric_ideal(A, method=method, budget=budget, progress=progress)
            vectors = [_binomial_vector(g) for g in I.groebner(I.ring)]
    except BudgetExceeded as exc:
        raise PartialResult(f"Markov basis: {exc}", []) from None
    out = minimalize(vectors)
    for b in out:
        if not in_kernel(A, b.vector):
            raise RuntimeError(f"Markov element {b.vector} is not in the kernel")
    return out


# ---------------------------------------------------------------------------
# Graver basis (completion with conformal reduction, lifted one coordinate at a time)

def fiber(A: ImsetMatrix | int, u: Sequence[int], moves: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
    """Nonnegative points reachable from ``u`` by the moves (and their negatives).

    With a Markov or Graver set as moves this is the whole fiber of ``A.u``.
    """
    A = _as_matrix(A)
    M = np.array([v for m in moves for v in (m, [-x for x in m])], dtype=np.int64)
    start = tuple(int(x) for x in u)
    seen = {start}
    todo = [start]
    while todo:
        x = np.array(todo.pop(), dtype=np.int64)
        nxt = M + x
        for w in nxt[np.all(nxt >= 0, axis=1)]:
            t = tuple(int(c) for c in w)
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return sorted(seen)


def is_indispensable(b: ToricBinomial, A: ImsetMatrix | int, moves: Iterable[Sequence[int]]) -> bool:
    """True when the fiber of ``b`` is exactly its two monomials, so every
    generating set of the toric ideal must contain ``b``."""
    return fiber(A, b.plus, moves) == sorted([b.plus, b.minus])


def _unimodular_coordinates(B: np.ndarray) -> list[int] | None:
    """Greedy choice of rank(B) columns forming a unimodular submatrix of the basis ``B``."""
    from sympy import Matrix

    d, N = B.shape
    rows = [list(map(int, r)) for r in B]
    # fraction-free greedy: try columns in order, keep a column set whose minor stays nonsingular
    chosen: list[int] = []
    for j in range(N):
        trial = chosen + [j]
        if Matrix([[r[c] for c in trial] for r in rows]).rank() == len(trial):
            chosen = trial
            if len(chosen) == d:
                break
    if len(chosen) == d and abs(Matrix([[r[c] for c in chosen] for r in rows]).det()) == 1:
        return chosen
    # fall back to a search over the other column choices
    import itertools

    for combo in itertools.combinations(range(N), d):
        M = Matrix([[r[c] for c in combo] for r in rows])
        if abs(M.det()) == 1:
            return list(combo)
    return None


class _Completion:
    """Project-and-lift completion on a growing coordinate set ``T``.

    ``V`` holds one sign of every element of the Graver basis of the
    projection onto ``T``.  Lifting to ``T + [j]`` only needs sums of pairs
    that agree in sign on ``T`` and disagree at ``j``; such sums never cancel
    on ``T``, so a candidate either has a conformal divisor already kept or
    is new.  Candidates are taken in increasing 1-norm on ``T``.
    """

    def __init__(self, vecs: Iterable[Sequence[int]], T: list[int], deadline: float | None):
        self.V = [_canonical_sign(v) for v in vecs if any(v)]
        self.T = list(T)
        self.deadline = deadline

    def lift(self, j: int) -> None:
        old = np.array(self.T, dtype=np.intp)
        T = self.T + [j]
        cols = np.array(T, dtype=np.intp)
        ncoord = len(self.V[0])
        cap = 1024
        kept = np.zeros((cap, ncoord), dtype=np.int64)
        pos = np.zeros(cap, dtype=np.int64)
        neg = np.zeros(cap, dtype=np.int64)
        size = 0

        def masks(v):
            p = q = 0
            for c in T:
                if v[c] > 0:
                    p |= 1 << c
                elif v[c] < 0:
                    q |= 1 << c
            return p, q

        def norm(v):
            return sum(abs(v[c]) for c in self.T)

        heap: list = []
        seen: set[LatticeVector] = set()
        for v in self.V:
            if v not in seen:
                seen.add(v)
                heapq.heappush(heap, (norm(v), v))
        popped = 0
        while heap:
            popped += 1
            if self.deadline is not None and popped % 512 == 0 and time.monotonic() > self.deadline:
                self.V = [tuple(int(x) for x in kept[k]) for k in range(0, size, 2)]
                raise BudgetExceeded("Graver completion exceeded its budget")
            _, s = heapq.heappop(heap)
            sp, sn = masks(s)
            sa = np.array(s, dtype=np.int64)
            hits = np.flatnonzero(((pos[:size] & ~sp) == 0) & ((neg[:size] & ~sn) == 0))
            if hits.size and np.any(np.all(np.abs(kept[hits][:, cols]) <= np.abs(sa[cols]), axis=1)):
                continue
            if size + 2 > cap:
                cap *= 2
                kept = np.resize(kept, (cap, ncoord))
                pos = np.resize(pos, cap)
                neg = np.resize(neg, cap)
            kept[size], kept[size + 1] = sa, -sa
            pos[size], neg[size] = sp, sn
            pos[size + 1], neg[size + 1] = sn, sp
            size += 2
            if sa[j] == 0:
                continue
            K = kept[:size]
            ok = np.all(K[:, old] * sa[old] >= 0, axis=1) & (K[:, j] * sa[j] < 0)
            for w in K[ok] + sa:
                w = _canonical_sign(w.tolist())
                if w not in seen:
                    seen.add(w)
                    heapq.heappush(heap, (norm(w), w))
        self.V = [tuple(int(x) for x in kept[k]) for k in range(0, size, 2)]
        self.T = T


def graver_basis(A: ImsetMatrix | int, budget: float | None = None,
                 progress: Callable[[str], None] | None = None) -> list[ToricBinomial]:
    """Primitive vectors of ker(A), by completion lifted one coordinate at a time."""
    A = _as_matrix(A)
    if A.n > 4:
        raise DomainError(f"Graver bases are supported for n <= 4, got {A.n}")
    deadline = None if budget is None else time.monotonic() + budget
    basis = kernel_basis(A)
    if not basis:
        return []
    B = np.array(basis, dtype=np.int64)
    N = B.shape[1]
    tau = _unimodular_coordinates(B)
    if tau is None:
        raise DomainError("kernel lattice has no unimodular coordinate projection")
    from sympy import Matrix

    Binv = Matrix(B[:, tau].tolist()).inv()
    # these rows project to the unit vectors on tau: the Graver basis there
    lifted = (Binv * Matrix(B.tolist())).tolist()
    comp = _Completion(lifted, list(tau), deadline)
    try:
        for j in (j for j in range(N) if j not in tau):
            comp.lift(j)
            if progress:
                progress(f"lifted coordinate {j + 1}: {len(comp.V)} elements")
    except BudgetExceeded as exc:
        raise PartialResult(f"Graver basis: {exc}", canonical_order(ToricBinomial(v) for v in comp.V)) from None
    out = canonical_order(ToricBinomial.from_vector(v) for v in comp.V)
    for b in out:
        if not in_kernel(A, b.vector):
            raise RuntimeError(f"Graver element {b.vector} is not in the kernel")
    return out


def conformal_divides(s: Sequence[int], w: Sequence[int]) -> bool:
    return all(a * b >= 0 and abs(a) <= abs(b) for a, b in zip(s, w))


def is_primitive_set(vectors: Sequence[Sequence[int]]) -> bool:
    """No element (or its negative) is a proper conformal divisor of another."""
    V = np.array(vectors, dtype=np.int64)
    V = np.vstack([V, -V])
    for k in range(len(vectors)):
        w = V[k]
        ok = np.all((V * w >= 0) & (np.abs(V) <= np.abs(w)), axis=1)
        ok &= ~np.all(V == w, axis=1)
        if np.any(ok):
            return False
    return True


def conformal_reduces_to_zero(v: Sequence[int], basis: Sequence[Sequence[int]]) -> bool:
    """Greedy conformal reduction of ``v`` by ``+-basis``; true when it reaches 0."""
    V = np.array(basis, dtype=np.int64)
    V = np.vstack([V, -V])
    w = np.array(v, dtype=np.int64)
    while np.any(w):
        ok = np.flatnonzero(np.all((V * w >= 0) & (np.abs(V) <= np.abs(w)), axis=1))
        if not ok.size:
            return False
        w = w - V[ok[0]]
    return True


# ---------------------------------------------------------------------------
# classification

@dataclass(frozen=True)
class BinomialClassification:
    binomial: ToricBinomial
    total_degree: int
    is_homogeneous: bool
    is_multilinear: bool
    symmetry_class_id: int

    def to_json(self) -> dict:
        return {"vector": list(self.binomial.vector), "degree": self.total_degree,
                "homogeneous": self.is_homogeneous, "multilinear": self.is_multilinear,
                "orbit": self.symmetry_class_id}


def permute_vector(A: ImsetMatrix, v: Sequence[int], g: Permutation) -> LatticeVector:
    out = [0] * len(v)
    for k, x in enumerate(v):
        if x:
            out[A.index(apply_permutation(A.statements[k], g))] += x
    return tuple(out)


def orbits(binomials: Sequence[ToricBinomial], A: ImsetMatrix) -> list[list[ToricBinomial]]:
    """Classes of the induced action of S_n, intersected with the given set."""
    def act(b: ToricBinomial, g: Permutation) -> ToricBinomial:
        return ToricBinomial.from_vector(permute_vector(A, b.vector, g))

    return orbit_partition(list(binomials), act, A.n, key=ToricBinomial.sort_key, closed=False)


def classify(binomials: Sequence[ToricBinomial], A: ImsetMatrix | int) -> list[BinomialClassification]:
    A = _as_matrix(A)
    cls = {}
    for k, orb in enumerate(orbits(binomials, A)):
        for b in orb:
            cls[b] = k
    out = []
    for b in binomials:
        if not any(b.vector):
            raise DomainError("zero binomial")
        out.append(BinomialClassification(
            b, b.degree, sum(b.plus) == sum(b.minus), all(abs(x) <= 1 for x in b.vector), cls[b]))
    return out


def degree_profile(binomials: Iterable[ToricBinomial]) -> dict[int, int]:
    prof: dict[int, int] = defaultdict(int)
    for b in binomials:
        prof[b.degree] += 1
    return dict(sorted(prof.items()))


def orbit_profile(binomials: Sequence[ToricBinomial], A: ImsetMatrix) -> dict[int, list[int]]:
    """Degree -> sizes of the symmetry classes of that degree."""
    prof: dict[int, list[int]] = defaultdict(list)
    for orb in orbits(binomials, A):
        prof[orb[0].degree].append(len(orb))
    return {d: sorted(v, reverse=True) for d, v in sorted(prof.items())}


def quadratics_to_relations(binomials: Iterable[ToricBinomial], A: ImsetMatrix | int) -> list[CIRelation]:
    """Three-sided relation of each quadratic multilinear binomial; raise on a failure."""
    A = _as_matrix(A)
    out = []
    for b in binomials:
        if b.degree != 2 or any(abs(x) > 1 for x in b.vector):
            raise DomainError(f"{b.to_text(A)} is not a quadratic multilinear binomial")
        rel = extend_quadratic_binomial(b.to_expr(A), A.n)
        if rel is None:
            raise RuntimeError(f"quadratic binomial {b.to_text(A)} does not extend to a relation")
        out.append(rel)
    return out
