import itertools
import json

import numpy as np
import pytest
from scipy.optimize import linprog

from imsetlab.ci_model import DomainError
from imsetlab.cone_faces import Cone, face_lattice, face_to_model, is_face
from imsetlab.imset_core import build_matrix
from imsetlab.relation_lang import parse_statement
from imsetlab.toric_bases import markov_basis


def lp_is_face(rays, mask):
    """Is there a functional >= 0 on all rays, = 0 exactly on ``mask``?  (floating LP oracle)"""
    R = np.array(rays, dtype=float)
    inside = [k for k in range(len(rays)) if mask >> k & 1]
    outside = [k for k in range(len(rays)) if not mask >> k & 1]
    d = R.shape[1]
    # y.r = 0 on inside, y.r >= 1 on outside (scaling)
    A_eq = R[inside] if inside else None
    b_eq = np.zeros(len(inside)) if inside else None
    A_ub = -R[outside] if outside else None
    b_ub = -np.ones(len(outside)) if outside else None
    res = linprog(np.zeros(d), A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                  bounds=[(None, None)] * d, method="highs")
    return res.status == 0


def test_n3_facets(cone3):
    assert len(cone3.facets) == 5
    for f in cone3.facets:
        assert all(sum(a * b for a, b in zip(f.normal, r)) >= 0 for r in cone3.rays)


def test_n3_faces_against_lp(cone3, lattice3):
    faces = set(lattice3.dims)
    brute = {m for m in range(1 << len(cone3.rays)) if lp_is_face(cone3.rays, m)}
    assert faces == brute


def test_n3_f_vector(lattice3):
    assert lattice3.f_vector == [1, 6, 9, 5, 1]
    assert lattice3.f_vector_without_apex() == [0, 6, 9, 5, 1]
    assert lattice3.total == 22


def test_n3_semigraphoid_face(cone3, lattice3, A3):
    for b in markov_basis(A3):
        stmts = [s for s, k in zip(A3.statements, b.vector) if k]
        assert is_face(stmts, cone3)
        assert lattice3.dims[cone3.mask_of(stmts)] == 3


def test_n3_relation_sides_are_not_faces(cone3, A3):
    for b in markov_basis(A3):
        for side in (b.plus, b.minus):
            stmts = [s for s, k in zip(A3.statements, side) if k]
            assert not is_face(stmts, cone3)


def test_closure_is_idempotent(cone3):
    for mask in range(1 << len(cone3.rays)):
        c = cone3.closure(mask)
        assert c & mask == mask
        assert cone3.closure(c) == c


def test_hasse_and_exports(lattice3, cone3):
    edges = lattice3.hasse_edges()
    assert all(lattice3.dims[hi] == lattice3.dims[lo] + 1 for lo, hi in edges)
    obj = json.loads(lattice3.to_json())
    assert obj["f_vector"] == [1, 6, 9, 5, 1] and len(obj["faces"]) == 22
    dot = lattice3.to_dot()
    assert dot.startswith("digraph faces {") and dot.count("->") == len(edges)
    assert face_to_model(0, cone3) == []


def test_n2_cone():
    lat = face_lattice(Cone(2))
    assert lat.f_vector == [1, 1]


def test_cone_rejects_zero_rays():
    A = build_matrix(3)
    from imsetlab.imset_core import ImsetMatrix, Imset
    bad = ImsetMatrix(3, A.statements[:1], (Imset.zero(3),))
    with pytest.raises(DomainError):
        Cone(bad)


@pytest.mark.slow
def test_n4_f_vector(lattice4, cone4):
    assert len(cone4.facets) == 37
    assert lattice4.f_vector == [1, 24, 228, 1128, 3212, 5560, 5980, 3985, 1596, 356, 37, 1]
    assert lattice4.total == 22108


@pytest.mark.slow
def test_n4_facets_valid(cone4):
    for f in cone4.facets:
        vals = [sum(a * b for a, b in zip(f.normal, r)) for r in cone4.rays]
        assert min(vals) == 0
        assert cone4.rank_of(f.incident_rays) == cone4.lin_dim - 1


@pytest.mark.slow
def test_n4_sampled_faces_against_lp(cone4, lattice4):
    faces = set(lattice4.dims)
    rng = np.random.default_rng(7)
    sample = set(rng.choice(sorted(faces), 60, replace=False).tolist())
    # random non-faces as well
    while len(sample) < 120:
        sample.add(int(rng.integers(0, 1 << 24)))
    for m in sample:
        assert (m in faces) == lp_is_face(cone4.rays, m)


def test_is_face_examples(cone3):
    assert is_face([parse_statement("1 _||_ 2 | e")], cone3)
    assert is_face([], cone3)
    assert not is_face([parse_statement("1 _||_ 2 | 3"), parse_statement("1 _||_ 3 | e")], cone3)
    pairs = list(itertools.combinations(cone3.statements, 2))
    assert sum(is_face(p, cone3) for p in pairs) == 9
