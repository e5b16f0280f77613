"""Property tests for the structural invariants of each module."""

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from imsetlab.ci_ideal import (
    StateVector,
    binary,
    ci_generators,
    ci_ideal,
    expected_generator_count,
    permute_ring_ideal,
    prob_ring,
)
from imsetlab.ci_model import (
    CIStatement,
    DomainError,
    Permutation,
    apply_permutation,
    enumerate_elementary,
    enumerate_structural,
    sigma,
)
from imsetlab.exact_poly import (
    IdealHandle,
    Polynomial,
    Ring,
    dim_degree,
    groebner,
    ideal_equal,
    is_groebner,
    normal_form,
)
from imsetlab.imset_core import (
    build_matrix,
    decompose,
    elementary_imset,
    recognize_semi_elementary,
    semi_elementary_imset,
    sum_imsets,
)
from imsetlab.relation_lang import ParseError, parse_relation, parse_relation_text, parse_statement, render
from imsetlab.toric_bases import (
    conformal_divides,
    conformal_reduces_to_zero,
    in_kernel,
    markov_basis,
    saturated_toric_ideal,
)

ELEM4 = enumerate_elementary(4)
STRUCT4 = [s for s, _ in enumerate_structural(4, certify=False)]


def statements(n):
    return st.sampled_from(enumerate_elementary(n))


def perms(n):
    return st.permutations(list(range(1, n + 1))).map(lambda p: Permutation(tuple(p)))


# -- ci_model -------------------------------------------------------------

@pytest.mark.parametrize("n", range(2, 7))
def test_enumeration_size(n):
    assert len(enumerate_elementary(n)) == sigma(n)


@given(statements(5))
def test_recanonicalization_idempotent(s):
    again = CIStatement(s.J, s.I, s.K)
    assert again == s and CIStatement(again.I, again.J, again.K) == again
    assert s.elementary()


@given(statements(4), perms(4), perms(4))
def test_permutation_action_composes(s, g, h):
    assert apply_permutation(s, g.compose(h)) == apply_permutation(apply_permutation(s, h), g)


def test_structural_set_properties():
    rows = enumerate_structural(4)
    stmts = [s for s, _ in rows]
    assert len(set(stmts)) == len(stmts)
    assert not any(s.elementary() for s in stmts)
    by_type = {}
    for s, t in rows:
        by_type.setdefault(t, set()).add(s)
    assert set().union(*by_type.values()) == set(stmts)


# -- relation_lang --------------------------------------------------------

@pytest.mark.parametrize("s", ELEM4 + STRUCT4, ids=str)
def test_statement_roundtrip(s):
    assert parse_statement(render(s)) == s


@settings(max_examples=300)
@given(st.text(alphabet="0123456789e_|[]+=*- \t", max_size=40))
def test_parser_fuzz_only_raises_parse_errors(text):
    for fn in (parse_statement, parse_relation):
        try:
            fn(text)
        except ParseError:
            pass


@given(st.lists(st.sampled_from(["", "# note", "[1 _||_ 2|3 + 1 _||_ 3|e] = [1 _||_ 3|2 + 1 _||_ 2|e]",
                                 "[1 _||_ 2 |", "   "]), max_size=12))
def test_line_numbers_exact(lines):
    rf = parse_relation_text("\n".join(lines))
    good = [k for k, t in enumerate(lines, start=1) if t.startswith("[1 _||_ 2|3")]
    bad = [k for k, t in enumerate(lines, start=1) if t == "[1 _||_ 2 |"]
    assert [ln for ln, _ in rf.relations] == good
    assert [ln for ln, _ in rf.errors] == bad


# -- imset_core -----------------------------------------------------------

@pytest.mark.parametrize("s", ELEM4, ids=str)
def test_recognize_roundtrip(s):
    assert recognize_semi_elementary(elementary_imset(s, 4)) == s


@given(st.lists(st.integers(-3, 3), min_size=24, max_size=24))
def test_images_have_zero_coordinate_sum(x):
    A = build_matrix(4)
    assert sum(A.apply(x).coeffs) == 0


@pytest.mark.parametrize("n", [4, 5])
def test_prop1_identity_exhaustive(n):
    for i, j, l in itertools.permutations(range(1, n + 1), 3):
        rest = [x for x in range(1, n + 1) if x not in (i, j, l)]
        for r in range(len(rest) + 1):
            for K in itertools.combinations(rest, r):
                K = tuple(K)
                left = sum_imsets([CIStatement((i,), (j,), K + (l,)), CIStatement((i,), (l,), K)], n)
                right = sum_imsets([CIStatement((i,), (j,), K), CIStatement((i,), (l,), K + (j,))], n)
                target = semi_elementary_imset(CIStatement((i,), (j, l), K), n)
                assert left == right == target


def dfs_decompositions(target, n, max_terms):
    """Independent search: choose terms in statement order, pruning by 1-norm."""
    elems = enumerate_elementary(n)
    cols = [elementary_imset(s, n).coeffs for s in elems]
    goal = semi_elementary_imset(target, n).coeffs
    out = set()

    def rec(start, chosen, resid):
        if not any(resid):
            out.add(tuple(elems[k] for k in chosen))
            return
        if len(chosen) == max_terms or sum(map(abs, resid)) > 4 * (max_terms - len(chosen)):
            return
        for k in range(start, len(elems)):
            rec(k, chosen + [k], tuple(a - b for a, b in zip(resid, cols[k])))

    rec(0, [], goal)
    return out


@pytest.mark.parametrize("n,text", [(3, "1 _||_ 23 | e"), (3, "12 _||_ 3 | e"),
                                    (4, "14 _||_ 2 | 3"), (4, "123 _||_ 4 | e")])
def test_decompose_matches_independent_search(n, text):
    t = parse_statement(text)
    got = {tuple(sorted(d.parts)) for d in decompose(t, n, 3)}
    assert got == {tuple(sorted(p)) for p in dfs_decompositions(t, n, 3)}


# -- cone_faces -----------------------------------------------------------

def semigraphoid_quadruples(n):
    out = set()
    for i, j, l in itertools.permutations(range(1, n + 1), 3):
        rest = [x for x in range(1, n + 1) if x not in (i, j, l)]
        for r in range(len(rest) + 1):
            for K in itertools.combinations(rest, r):
                K = tuple(K)
                out.add(frozenset([CIStatement((i,), (j,), K + (l,)), CIStatement((i,), (l,), K),
                                   CIStatement((i,), (j,), K), CIStatement((i,), (l,), K + (j,))]))
    return out


def test_quadruples_are_dim3_faces_n4(cone4, lattice4):
    quads = semigraphoid_quadruples(4)
    assert len(quads) == 24
    for q in quads:
        m = cone4.mask_of(q)
        assert cone4.is_face(q) and lattice4.dims[m] == 3


@pytest.mark.parametrize("which", ["3", "4"])
def test_lattice_closed_under_intersection(which, lattice3, lattice4):
    lat = lattice3 if which == "3" else lattice4
    faces = list(lat.dims)
    rnd = random.Random(1)
    pairs = itertools.combinations(faces, 2) if which == "3" else (rnd.sample(faces, 2) for _ in range(3000))
    for a, b in pairs:
        assert a & b in lat.dims


def test_hasse_graded_n3(lattice3, cone3):
    up = {}
    for lo, hi in lattice3.hasse_edges():
        up.setdefault(lo, []).append(hi)

    def chains(m):
        if m == cone3.full:
            return {0}
        return {1 + c for nxt in up[m] for c in chains(nxt)}

    assert chains(0) == {cone3.lin_dim}


# -- exact_poly -----------------------------------------------------------

R4 = Ring(["a", "b", "c", "d"])
small_poly = st.lists(st.tuples(st.tuples(*[st.integers(0, 2)] * 4), st.integers(-4, 4).filter(bool)),
                      min_size=1, max_size=3).map(lambda t: Polynomial.from_exponents(R4, t))


@settings(max_examples=30, deadline=None)
@given(st.lists(small_poly, min_size=1, max_size=3), st.randoms())
def test_reduced_basis_unique_under_shuffle(F, rnd):
    F = [f for f in F if f]
    assume(F)
    G1 = groebner(F, R4)
    F2 = list(F)
    rnd.shuffle(F2)
    G2 = groebner(F2, R4)
    assert [g.terms for g in G1] == [g.terms for g in G2]
    assert is_groebner(G1, R4)


@settings(max_examples=30, deadline=None)
@given(st.lists(small_poly, min_size=1, max_size=3), small_poly, small_poly)
def test_normal_form_linearity(F, f, h):
    F = [x for x in F if x]
    assume(F)
    G = groebner(F, R4)
    for g in G:
        assert normal_form(f * g + h, G, R4) == normal_form(h, G, R4)


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 3))
def test_regular_sequence_of_quadrics(q):
    ring = Ring([f"x{k}" for k in range(12)])
    gens = []
    for k in range(q):
        a, b, c, d = (4 * k + t for t in range(4))
        gens.append(Polynomial.from_exponents(ring, [
            ([1 if v in (a, b) else 0 for v in range(12)], 1),
            ([1 if v in (c, d) else 0 for v in range(12)], -1)]))
    dd = dim_degree(IdealHandle(gens, ring))
    assert (dd.krull_dim, dd.degree) == (12 - q, 2 ** q)


# -- toric_bases ----------------------------------------------------------

def test_markov_generates_saturation_n3(A3, markov3):
    I = saturated_toric_ideal(A3)
    J = IdealHandle([b.to_polynomial(I.ring) for b in markov3], I.ring)
    assert ideal_equal(I, J)


def test_graver_primitive_n3(graver3):
    vs = [b.vector for b in graver3]
    assert not any(conformal_divides(a, b) for a, b in itertools.permutations(vs, 2))


@pytest.mark.slow
def test_markov_reduces_by_graver_n4(markov4, graver4):
    basis = [b.vector for b in graver4]
    assert all(conformal_reduces_to_zero(b.vector, basis) for b in markov4)


@pytest.mark.slow
def test_graver_primitive_sampled_n4(graver4):
    vs = [b.vector for b in graver4]
    rnd = random.Random(3)
    sample = rnd.sample(vs, 300)
    for a in sample:
        assert not any(b != a and conformal_divides(b, a) for b in vs)


# -- ci_ideal -------------------------------------------------------------

@pytest.mark.parametrize("states", ["2,2,2,2", "2,3,2,2"])
def test_generators_quadrics_and_counts(states):
    sv = StateVector.parse(states)
    ring = prob_ring(sv)
    for s in ELEM4 + STRUCT4:
        gens = ci_generators(s, sv, ring)
        assert len(gens) == expected_generator_count(s, sv)
        assert all(g.is_homogeneous() and g.total_degree() == 2 for g in gens)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(ELEM4 + STRUCT4), st.integers(0, 10 ** 6))
def test_rank_one_point_annihilates(s, seed):
    sv = binary(4)
    ring = prob_ring(sv)
    rnd = random.Random(seed)
    a = {x: Fraction(rnd.randint(1, 7)) for x in itertools.product((1, 2), repeat=len(s.I + s.K))}
    b = {x: Fraction(rnd.randint(1, 7)) for x in itertools.product((1, 2), repeat=len(s.J + s.K))}
    vals = {}
    for x in sv.outcomes():
        vals[ring.index["p" + "".join(map(str, x))]] = (a[tuple(x[i - 1] for i in s.I + s.K)]
                                                         * b[tuple(x[j - 1] for j in s.J + s.K)])
    assert all(g.evaluate(vals) == 0 for g in ci_generators(s, sv, ring))


@settings(max_examples=20, deadline=None)
@given(statements(3), perms(3))
def test_permuted_ideal_matches_permuted_statement(s, g):
    sv = binary(3)
    ring = prob_ring(sv)
    I = ci_ideal(s, sv, ring)
    P = permute_ring_ideal(I, g, sv)
    assert ideal_equal(P, ci_ideal(apply_permutation(s, g), sv, ring))
    assert dim_degree(P) == dim_degree(I)


def test_kernel_check_rejects_non_kernel(A3):
    assert not in_kernel(A3, [1, 0, 0, 0, 0, 0])
    with pytest.raises(DomainError):
        markov_basis(6)
