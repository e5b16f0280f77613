import itertools
import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imsetlab.ci_ideal import (
    DISCREPANCY,
    MATCH,
    NA,
    PARTNER_RELATIONS,
    TABLE1_IDEALS,
    TABLE3_MODELS,
    StateVector,
    binary,
    ci_generators,
    ci_ideal,
    containment_report,
    expected_generator_count,
    lex_gb_claim,
    model_ideal,
    paper_generator_check,
    permute_ring_ideal,
    prob_ring,
    segre_dim_degree,
    side_isomorphism,
    side_permutation,
    statements_ideal,
    table_report,
    var_name,
)
from imsetlab.ci_model import DomainError, Permutation, apply_permutation, enumerate_elementary
from imsetlab.exact_poly import dim_degree, ideal_equal
from imsetlab.relation_lang import parse_statement as S


def product_point(states, stmt, seed):
    """A rational point of the model of ``stmt``: p = q(I,K) q(J,K) q(rest)."""
    rnd = random.Random(seed)
    n = states.n
    I, J, K = stmt.I, stmt.J, stmt.K
    rest = [i for i in range(1, n + 1) if i not in I + J + K]

    def table(idx):
        return {v: Fraction(rnd.randint(1, 9)) for v in itertools.product(*(range(1, states.r[i - 1] + 1)
                                                                              for i in idx))}
    qIK, qJK, qR = table(I + K), table(J + K), table(rest)
    vals = {}
    for x in states.outcomes():
        def pick(idx):
            return tuple(x[i - 1] for i in idx)
        vals[var_name(x)] = qIK[pick(I + K)] * qJK[pick(J + K)] * qR[pick(rest)]
    return vals


def evaluate(poly, vals):
    ring = poly.ring
    return poly.evaluate({ring.index[k]: v for k, v in vals.items()})


def test_state_vector_parse():
    sv = StateVector.parse("2, 3,2")
    assert sv.r == (2, 3, 2) and sv.n == 3 and len(sv.outcomes()) == 12
    for bad in ("", "2,x", "2,1"):
        with pytest.raises(DomainError):
            StateVector.parse(bad)


def test_ring_variable_order():
    ring = prob_ring(binary(3))
    assert ring.names[0] == "p111" and ring.names[-1] == "p222"
    assert prob_ring(binary(3), reverse=True).names[0] == "p222"


@pytest.mark.parametrize("states", ["2,2,2", "3,2,2", "2,3,2", "2,2,3", "2,2,2,2"])
def test_generator_counts(states):
    sv = StateVector.parse(states)
    for s in enumerate_elementary(sv.n):
        assert len(ci_generators(s, sv)) == expected_generator_count(s, sv)


def test_generator_count_formula():
    sv = StateVector.parse("3,2,2")
    s = S("1 _||_ 23 | e")
    assert expected_generator_count(s, sv) == comb(3, 2) * comb(4, 2)


@pytest.mark.parametrize("states", ["2,2,2", "3,2,2", "2,3,2"])
def test_generators_vanish_on_model(states):
    sv = StateVector.parse(states)
    stmts = enumerate_elementary(3) + [S("1 _||_ 23 | e"), S("12 _||_ 3 | e")]
    for k, s in enumerate(stmts):
        vals = product_point(sv, s, k)
        assert all(evaluate(g, vals) == 0 for g in ci_generators(s, sv))


def test_generators_detect_dependence():
    sv = binary(3)
    vals = {var_name(x): Fraction(k + 1) for k, x in enumerate(sv.outcomes())}
    assert any(evaluate(g, vals) != 0 for g in ci_generators(S("1 _||_ 2 | 3"), sv))


def test_statement_beyond_states():
    with pytest.raises(DomainError):
        ci_ideal(S("1 _||_ 4 | e"), binary(3))
    with pytest.raises(DomainError):
        model_ideal([S("1 _||_ 23 | e")], binary(3))


def test_permute_ring_ideal_all_n3():
    sv = binary(3)
    ring = prob_ring(sv)
    for s in enumerate_elementary(3):
        I = ci_ideal(s, sv, ring)
        for g in Permutation.identity(3), Permutation((2, 3, 1)), Permutation.transposition(3, 1, 2):
            assert ideal_equal(permute_ring_ideal(I, g, sv), ci_ideal(apply_permutation(s, g), sv, ring))


def test_permute_ring_needs_symmetric_states():
    sv = StateVector.parse("3,2,2")
    I = ci_ideal(S("1 _||_ 2 | e"), sv)
    with pytest.raises(DomainError):
        permute_ring_ideal(I, Permutation.transposition(3, 1, 2), sv)


def test_containment_report_j_ideals():
    sv = binary(3)
    ring = prob_ring(sv)
    J = {k: statements_ideal(v, sv, ring) for k, v in TABLE1_IDEALS.items()}
    rep = containment_report(J["J1"], J["J3"])
    assert rep.inner_subset and not rep.outer_subset


def test_segre_formula():
    assert (segre_dim_degree(2, 4).krull_dim, segre_dim_degree(2, 4).degree) == (5, 4)
    assert (segre_dim_degree(3, 4).krull_dim, segre_dim_degree(3, 4).degree) == (6, 10)
    assert (segre_dim_degree(2, 6).krull_dim, segre_dim_degree(2, 6).degree) == (7, 6)


@pytest.mark.parametrize("states,want", [("2,2,2", (5, 4)), ("3,2,2", (6, 10)),
                                         ("2,3,2", (7, 6)), ("2,2,3", (7, 6))])
def test_j3_dim_degree(states, want):
    sv = StateVector.parse(states)
    dd = dim_degree(statements_ideal(TABLE1_IDEALS["J3"], sv))
    assert (dd.krull_dim, dd.degree) == want
    seg = segre_dim_degree(sv.r[0], sv.r[1] * sv.r[2])
    assert (seg.krull_dim, seg.degree) == want


def test_table3_rows():
    sv = binary(3)
    for name, want in {"M1^1": (7, 2), "M1^6": (6, 4), "M4": (4, 6)}.items():
        dd = dim_degree(model_ideal(TABLE3_MODELS[name], sv))
        assert (dd.krull_dim, dd.degree) == want


def test_lex_claim_reports_both_orders():
    sv = binary(3)
    ring = prob_ring(sv)
    out = lex_gb_claim(model_ideal(TABLE3_MODELS["M3^2"], sv, ring), ci_ideal(S("12 _||_ 3 | e"), sv, ring), sv)
    assert set(out) == {"outcome-lex", "reversed"}
    assert any(out.values())


def test_side_permutation():
    a, b = PARTNER_RELATIONS["14 _||_ 2 | e"]
    g = side_permutation(a, b, 4)
    assert g is not None
    assert side_permutation(a, a[:1], 4) is None


def test_quadratic_partner_isomorphisms():
    sv = binary(4)
    for key in ("14 _||_ 2 | e", "14 _||_ 2 | 3"):
        a, b = PARTNER_RELATIONS[key]
        r = side_isomorphism(a, b, sv)
        assert r.holds
    r = side_isomorphism(*PARTNER_RELATIONS["14 _||_ 2 | e"], sv)
    assert (r.left.krull_dim, r.left.degree) == (13, 8)


def test_table1_report_statuses():
    rep = table_report("table1")
    by = {(c.column, c.ideal, c.quantity): c for c in rep.cells}
    assert by[("(2,2,2)", "J3", "dim")].status == MATCH
    assert by[("(2,2,2)", "J1", "dim")].status == DISCREPANCY
    assert by[("(2,2,2)", "J1", "dim")].computed == 5
    assert all(c.status == NA for c in rep.cells if c.quantity == "minimal primes")
    assert rep.checks["J1 in J3 (binary)"] is True


def test_unknown_table():
    with pytest.raises(DomainError):
        table_report("table9")


def test_paper_generator_check_shape():
    out = paper_generator_check()
    assert out["verbatim"] == 2 and out["verbatim_in_13_2"] == 6
    assert out["generates"] == ["13 _||_ 2 | e"]


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(enumerate_elementary(3)), st.permutations([1, 2, 3]))
def test_permutation_invariance_of_dim_degree(s, images):
    sv = binary(3)
    g = Permutation(tuple(images))
    a = dim_degree(ci_ideal(s, sv))
    b = dim_degree(ci_ideal(apply_permutation(s, g), sv))
    assert a == b
