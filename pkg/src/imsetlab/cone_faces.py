"""The cone spanned by the elementary imsets: facets, face lattice, models.

Facets come from an exact double description run on the dual cone inside
the cone's linear span.  Faces are stored as bitsets over ray indices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

from imsetlab.ci_model import CIStatement, DomainError
from imsetlab.imset_core import ImsetMatrix, build_matrix, integer_rank
from imsetlab.relation_lang import render


def _bits(mask: int) -> list[int]:
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return out


def _primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, x)
    return tuple(x // g for x in v) if g > 1 else tuple(v)


@dataclass(frozen=True)
class Facet:
    normal: tuple[int, ...]
    incident_rays: int


@dataclass(frozen=True)
class Face:
    incident_rays: int
    dim: int

    @property
    def rays(self) -> list[int]:
        return _bits(self.incident_rays)


class Cone:
    def __init__(self, A: ImsetMatrix | int):
        self.A = build_matrix(A) if isinstance(A, int) else A
        self.n = self.A.n
        self.rays = [tuple(c.coeffs) for c in self.A.columns]
        if not self.rays or not any(any(r) for r in self.rays):
            raise DomainError("cone has no nonzero rays")
        if len(set(self.rays)) != len(self.rays):
            raise DomainError("rays are not pairwise distinct")
        self.ambient_dim = 1 << self.n
        self.lin_dim = integer_rank(self.rays)
        self.full = (1 << len(self.rays)) - 1

    @property
    def statements(self) -> tuple[CIStatement, ...]:
        return self.A.statements

    def rank_of(self, mask: int) -> int:
        return integer_rank(self.rays[k] for k in _bits(mask))

    def _span_coordinates(self) -> list[int]:
        """Coordinates on which the projected rays keep the full rank."""
        coords: list[int] = []
        for c in range(self.ambient_dim):
            trial = coords + [c]
            if integer_rank([[r[i] for i in trial] for r in self.rays]) == len(trial):
                coords = trial
                if len(coords) == self.lin_dim:
                    break
        return coords

    @cached_property
    def facets(self) -> list[Facet]:
        coords = self._span_coordinates()
        proj = [[r[i] for i in coords] for r in self.rays]
        normals = _double_description(proj)
        out = []
        for y in normals:
            full = [0] * self.ambient_dim
            for i, c in zip(coords, y):
                full[i] = c
            inc = 0
            for k, r in enumerate(self.rays):
                val = sum(a * b for a, b in zip(full, r))
                if val < 0:
                    raise RuntimeError("facet normal is not valid on every ray")
                if val == 0:
                    inc |= 1 << k
            out.append(Facet(_primitive(full), inc))
        # a cone of dimension 1 has no proper facets other than the apex
        if self.lin_dim == 1:
            out = [f for f in out if f.incident_rays != 0] or []
        out.sort(key=lambda f: (_bits(f.incident_rays), f.normal))
        return out

    def closure(self, mask: int) -> int:
        """Ray set of the smallest face containing the given rays."""
        out = self.full
        for f in self.facets:
            if mask & ~f.incident_rays == 0:
                out &= f.incident_rays
        return out

    def is_face(self, stmts: Iterable[CIStatement]) -> bool:
        mask = 0
        for s in stmts:
            mask |= 1 << self.A.index(s)
        return self.closure(mask) == mask

    def mask_of(self, stmts: Iterable[CIStatement]) -> int:
        mask = 0
        for s in stmts:
            mask |= 1 << self.A.index(s)
        return mask


def _double_description(rows: list[list[int]]) -> list[tuple[int, ...]]:
    """Extreme rays of {y : r.y >= 0 for r in rows} for a full-rank row set.

    Exact integer arithmetic; adjacency by the combinatorial test on sets of
    tight constraints.
    """
    m = len(rows)
    d = len(rows[0])
    # start from d independent rows: the cone they cut out is simplicial
    basis: list[int] = []
    for k in range(m):
        if integer_rank([rows[i] for i in basis + [k]]) == len(basis) + 1:
            basis.append(k)
            if len(basis) == d:
                break
    if len(basis) < d:
        raise DomainError("rays do not span the projected space")
    from sympy import Matrix

    Binv = Matrix([rows[i] for i in basis]).inv()
    rays = []
    for col in range(d):
        v = [Binv[r, col] for r in range(d)]
        den = 1
        for x in v:
            den = den * x.q // gcd(den, x.q)
        rays.append(_primitive([int(x * den) for x in v]))

    def tight(y):
        t = 0
        for k in range(m):
            if sum(a * b for a, b in zip(rows[k], y)) == 0:
                t |= 1 << k
        return t

    current = [(y, tight(y)) for y in rays]
    done = set(basis)
    for k in range(m):
        if k in done:
            continue
        done.add(k)
        row = rows[k]
        val = [sum(a * b for a, b in zip(row, y)) for y, _ in current]
        pos = [i for i, v in enumerate(val) if v > 0]
        neg = [i for i, v in enumerate(val) if v < 0]
        zero = [i for i, v in enumerate(val) if v == 0]
        new = [current[i] for i in pos] + [current[i] for i in zero]
        done_mask = 0
        for i in done:
            done_mask |= 1 << i
        tights = [t & done_mask for _, t in current]
        for i in pos:
            for j in neg:
                common = tights[i] & tights[j]
                if bin(common).count("1") < d - 2:
                    continue
                if any(l != i and l != j and tights[l] & common == common for l in range(len(current))):
                    continue
                yi, yj = current[i][0], current[j][0]
                a, b = val[i], -val[j]
                y = _primitive([b * p + a * q for p, q in zip(yi, yj)])
                new.append((y, tight(y)))
        current = new
    return sorted(y for y, _ in current)


@dataclass
class FaceLattice:
    cone: Cone
    faces: dict[int, list[Face]] = field(default_factory=dict)
    dims: dict[int, int] = field(default_factory=dict)

    @property
    def f_vector(self) -> list[int]:
        return [len(self.faces.get(d, [])) for d in range(self.cone.lin_dim + 1)]

    def f_vector_without_apex(self) -> list[int]:
        """The apex entry reported as 0, as in the printed n=3 vector."""
        return [0] + self.f_vector[1:]

    @property
    def total(self) -> int:
        return sum(self.f_vector)

    def face(self, mask: int) -> Face:
        return Face(mask, self.dims[mask])

    def hasse_edges(self) -> list[tuple[int, int]]:
        """Covering pairs (lower, upper) as ray bitsets."""
        edges = []
        facets = [f.incident_rays for f in self.cone.facets]
        for mask, d in self.dims.items():
            if d == 0:
                continue
            for f in facets:
                low = mask & f
                if low != mask and self.dims.get(low) == d - 1:
                    edges.append((low, mask))
        return sorted(set(edges), key=lambda e: (self.dims[e[1]], _bits(e[1]), _bits(e[0])))

    def models(self, d: int) -> list[list[CIStatement]]:
        return [face_to_model(f, self.cone) for f in self.faces.get(d, [])]

    def to_json(self) -> str:
        return json.dumps({
            "n": self.cone.n,
            "f_vector": self.f_vector,
            "faces": [{"dim": f.dim, "rays": f.rays} for d in sorted(self.faces) for f in self.faces[d]],
        })

    def to_dot(self, labels: bool = True) -> str:
        names = {}
        out = ["digraph faces {", "  rankdir=BT;"]
        for d in sorted(self.faces):
            for k, f in enumerate(self.faces[d]):
                nid = f"f{d}_{k}"
                names[f.incident_rays] = nid
                if labels:
                    lab = "\\n".join(render(s) for s in face_to_model(f, self.cone)) or "0"
                else:
                    lab = f"dim {d}"
                out.append(f'  {nid} [label="{lab}"];')
        for lo, hi in self.hasse_edges():
            out.append(f"  {names[lo]} -> {names[hi]};")
        out.append("}")
        return "\n".join(out) + "\n"


def facets(cone: Cone) -> list[Facet]:
    return cone.facets


def face_lattice(cone: Cone) -> FaceLattice:
    """Every intersection of facet ray-sets, with its dimension."""
    facet_sets = sorted({f.incident_rays for f in cone.facets})
    seen = {cone.full}
    frontier = [cone.full]
    while frontier:
        nxt = []
        for mask in frontier:
            for f in facet_sets:
                low = mask & f
                if low not in seen:
                    seen.add(low)
                    nxt.append(low)
        frontier = nxt
    seen.add(0)
    lat = FaceLattice(cone)
    for mask in seen:
        lat.dims[mask] = cone.rank_of(mask) if mask else 0
    groups: dict[int, list[Face]] = {}
    for mask, d in lat.dims.items():
        groups.setdefault(d, []).append(Face(mask, d))
    for d in groups:
        groups[d].sort(key=lambda f: _bits(f.incident_rays))
    lat.faces = dict(sorted(groups.items()))
    return lat


def face_to_model(f: Face | int, cone: Cone) -> list[CIStatement]:
    mask = f.incident_rays if isinstance(f, Face) else f
    return [cone.statements[k] for k in _bits(mask)]


def is_face(stmts: Iterable[CIStatement], cone: Cone) -> bool:
    return cone.is_face(stmts)
