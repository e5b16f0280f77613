import itertools

import pytest
import sympy

from imsetlab.ci_model import DomainError, Permutation, all_permutations, sigma
from imsetlab.imset_core import build_matrix, verify_relation
from imsetlab.relation_lang import parse_statement, render
from imsetlab.toric_bases import (
    PartialResult,
    ToricBinomial,
    canonical_order,
    classify,
    conformal_divides,
    conformal_reduces_to_zero,
    degree_profile,
    fiber,
    graver_basis,
    in_kernel,
    is_indispensable,
    is_primitive_set,
    kernel_basis,
    markov_basis,
    minimalize,
    orbit_profile,
    permute_vector,
    quadratics_to_relations,
)


def brute_graver(A, box):
    """Primitive kernel vectors with entries in ``[-box, box]``, up to sign."""
    kern = []
    for v in itertools.product(range(-box, box + 1), repeat=len(A.statements)):
        if any(v) and in_kernel(A, v):
            kern.append(v)
    prim = set()
    for v in kern:
        if not any(w != v and conformal_divides(w, v) for w in kern):
            prim.add(ToricBinomial.from_vector(v))
    return prim


@pytest.mark.parametrize("n", [2, 3, 4])
def test_kernel_basis_size_and_membership(n):
    A = build_matrix(n)
    B = kernel_basis(A)
    assert len(B) == sigma(n) - A.rank()
    assert all(in_kernel(A, v) for v in B)
    assert sympy.Matrix(B).rank() == len(B)


def test_kernel_is_saturated_lattice_n3(A3):
    # Smith form of the basis has unit invariants, so it spans the full integer kernel
    B = sympy.Matrix(kernel_basis(A3))
    from sympy.matrices.normalforms import smith_normal_form
    snf = smith_normal_form(B, domain=sympy.ZZ)
    assert [abs(snf[i, i]) for i in range(B.rows)] == [1] * B.rows


def test_binomial_sides(A3):
    b = ToricBinomial.from_vector([1, -1, -1, 1, 0, 0])
    assert b == ToricBinomial.from_vector([-1, 1, 1, -1, 0, 0])
    assert b.degree == 2 and sum(b.plus) == sum(b.minus) == 2
    assert not any(p and m for p, m in zip(b.plus, b.minus))
    assert b.to_json(A3)["degree"] == 2


def test_markov_n3_semigraphoid_moves(A3, markov3):
    want = {
        "[1 _||_ 2 | e * 1 _||_ 3 | 2] - [1 _||_ 2 | 3 * 1 _||_ 3 | e]",
        "[1 _||_ 2 | e * 2 _||_ 3 | 1] - [1 _||_ 2 | 3 * 2 _||_ 3 | e]",
        "[1 _||_ 3 | e * 2 _||_ 3 | 1] - [1 _||_ 3 | 2 * 2 _||_ 3 | e]",
    }

    def norm(text):
        a, b = text.split(" - ")
        return frozenset((a, b))

    assert {norm(b.to_text(A3)) for b in markov3} == {norm(t) for t in want}


def test_markov_methods_agree_n3(A3, markov3):
    for method in ("grevlex", "elimination"):
        assert set(markov_basis(A3, method=method)) == set(markov3)


def test_graver_n3_against_brute_force(A3, graver3):
    assert set(graver3) == brute_graver(A3, 2)


def test_graver_n2_empty():
    assert graver_basis(2) == [] and markov_basis(2) == []


def test_primitive_and_conformal_helpers():
    assert conformal_divides((1, 0, -1), (2, 1, -1))
    assert not conformal_divides((1, 0, -1), (1, 0, 1))
    assert is_primitive_set([(1, -1, 0), (0, 1, -1)])
    assert not is_primitive_set([(1, -1, 0), (1, 0, -1), (2, -1, -1)])
    assert conformal_reduces_to_zero((2, -1, -1), [(1, -1, 0), (1, 0, -1)])
    assert not conformal_reduces_to_zero((1, 0, -1), [(1, -1, 0)])


def test_minimalize_drops_redundant(A3, markov3):
    a, b = markov3[0].vector, markov3[1].vector
    combo = tuple(x + y for x, y in zip(a, b))
    out = minimalize([v.vector for v in markov3] + [combo])
    assert set(out) == set(markov3)


def test_fiber_and_indispensable(A3, markov3, graver3):
    b = markov3[0]
    pts = fiber(A3, b.plus, [g.vector for g in graver3])
    assert set(pts) == {b.plus, b.minus}
    assert is_indispensable(b, A3, [g.vector for g in graver3])


def test_classification_n3(A3, markov3):
    cls = classify(markov3, A3)
    assert all(c.total_degree == 2 and c.is_homogeneous and c.is_multilinear for c in cls)
    assert len({c.symmetry_class_id for c in cls}) == 1
    assert orbit_profile(markov3, A3) == {2: [3]}
    assert degree_profile(markov3) == {2: 3}


def test_permute_vector_preserves_kernel(A3, markov3):
    for g in all_permutations(3):
        for b in markov3:
            assert in_kernel(A3, permute_vector(A3, b.vector, g))


def test_quadratics_to_relations_n3(A3, markov3):
    rels = quadratics_to_relations(markov3, A3)
    assert all(verify_relation(r).valid for r in rels)
    assert {r.target for r in rels} == {parse_statement(t) for t in
                                        ("1 _||_ 23 | e", "12 _||_ 3 | e", "13 _||_ 2 | e")}


def test_canonical_order_sorted(markov3):
    assert canonical_order(reversed(markov3)) == canonical_order(markov3)


def test_graver_budget_gives_partial_result(A4):
    with pytest.raises(PartialResult) as info:
        graver_basis(A4, budget=0.5)
    assert all(in_kernel(A4, b.vector) for b in info.value.partial)


def test_markov_large_n_rejected():
    with pytest.raises(DomainError):
        markov_basis(6)


@pytest.mark.slow
def test_markov_n4(A4, markov4):
    assert len(markov4) == 49
    assert degree_profile(markov4) == {2: 24, 3: 4, 4: 21}
    assert all(in_kernel(A4, b.vector) for b in markov4)


@pytest.mark.slow
def test_markov4_quartics_indispensable(A4, markov4, graver4):
    moves = [g.vector for g in graver4]
    quartics = [b for b in markov4 if b.degree == 4]
    assert all(is_indispensable(b, A4, moves) for b in quartics)


@pytest.mark.slow
def test_markov_in_graver_n4(markov4, graver4):
    assert set(markov4) <= set(graver4)


@pytest.mark.slow
def test_graver_n4(A4, graver4):
    assert len(graver4) == 3667
    assert degree_profile(graver4) == {2: 24, 3: 112, 4: 507, 5: 1200, 6: 1440, 7: 384}
    assert all(in_kernel(A4, b.vector) for b in graver4)
    assert is_primitive_set([b.vector for b in graver4[:400]] + [b.vector for b in graver4[-400:]])


@pytest.mark.slow
def test_graver_n4_symmetric(A4, graver4):
    pool = set(graver4)
    for g in (Permutation.transposition(4, 1, 2), Permutation((2, 3, 4, 1))):
        assert {ToricBinomial.from_vector(permute_vector(A4, b.vector, g)) for b in graver4} == pool


@pytest.mark.slow
def test_quadratic_graver_relations_n4(A4, graver4):
    quads = [b for b in graver4 if b.degree == 2]
    rels = quadratics_to_relations(quads, A4)
    assert len(rels) == 24
    assert all(verify_relation(r).valid for r in rels)
    assert render(rels[0]).count("=") == 2
