import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qinv.cocycle import (PolyCochain, U, chi_poly, chi_alternating, binom_div_p, e0_cocycle, e1_cocycle,
                          gamma_cocycle, quadruple_enumerate, quadruple_cases, MochizukiQuadruple, permuted,
                          quandle_cocycle_check, additive_group_check, group_cocycle_basis,
                          quandle_cocycle_catalogue, cohomology_dimension_check, phi_pullback_poly,
                          pullback_phi, theta_gamma, theta_checks, massey_verify, ConditionViolated,
                          CaseTwoUnsupported, CocycleError, TooLarge)
from qinv.field import create_field, elements_of_order
from qinv.quandle import parse_quandle, alexander_quandle


def test_polynomial_evaluation_and_algebra():
    F = create_field(5)
    P = PolyCochain.monomial(F, (2, 1)) + PolyCochain.monomial(F, (0, 3), coef=2)
    x, y = 3, 4
    assert P(x, y) == (x ** 2 * y + 2 * y ** 3) % 5
    assert (P - P).is_zero()
    assert (P * P)(x, y) == (P(x, y) ** 2) % 5
    assert P.frobenius(1)(x, y) == (P(x, y) ** 5) % 5
    assert PolyCochain.from_json(F, P.to_json()) == P


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 8), st.integers(0, 8))
def test_chi_forms_agree(x, y):
    F = create_field(3, 2)
    assert chi_poly(F)(x, y) == chi_alternating(F)(x, y)


@pytest.mark.parametrize("p,h", [(2, 2), (3, 1), (3, 2), (5, 1)])
def test_chi_is_additive_2_cocycle(p, h):
    F = create_field(p, h)
    assert additive_group_check(F, chi_poly(F))


@pytest.mark.parametrize("p,h", [(2, 2), (3, 2)])
def test_group_cocycle_basis_on_additive_group(p, h):
    F = create_field(p, h)
    for name, P in group_cocycle_basis(F, 3):
        assert additive_group_check(F, P), name


def test_binom_div_p_needs_power():
    F = create_field(3)
    with pytest.raises(CocycleError):
        binom_div_p(F, 6)


def test_quadruple_examples():
    # F_25 with w = -1 has exactly one quadruple
    F = create_field(5, 2)
    qs = quadruple_enumerate(F, F.neg[1])
    assert [(q.qs, q.case) for q in qs] == [((1, 1, 5, 5), 1)]
    F9 = create_field(3, 2)
    assert quadruple_cases(F9, F9.neg[1], (1, 1, 3, 3)) == [1]
    assert quadruple_cases(F9, F9.parse_elem("0,1"), (1, 1, 3, 3)) == [3]
    # w = 2 + 2t has order 8, so (1,1,3,3) is not a quadruple
    assert quadruple_cases(F9, F9.parse_elem("2,2"), (1, 1, 3, 3)) == []


def test_case_permutation():
    q = MochizukiQuadruple(1, 2, 3, 4, 3)
    assert permuted(q) == (1, 3, 4, 2)
    assert permuted(MochizukiQuadruple(1, 2, 3, 4, 4)) == (3, 1, 2, 4)


FIELDS = [(2, 2, None), (3, 2, "-1"), (3, 2, "0,1"), (2, 3, None), (2, 4, "ord5"), (2, 4, "ord3"),
          (5, 2, "-1")]


def _X(p, h, w):
    F = create_field(p, h)
    if w is None:
        c = F.primitive
    elif w == "-1":
        c = F.neg[1]
    elif w.startswith("ord"):
        c = elements_of_order(F, int(w[3:]))[0]
    else:
        c = F.parse_elem(w)
    return alexander_quandle(F, F.from_code(c))


@pytest.mark.parametrize("p,h,w", FIELDS)
def test_gamma_cocycles_pass(p, h, w):
    X = _X(p, h, w)
    for quad in quadruple_enumerate(X.field, X.omega):
        assert quandle_cocycle_check(X, gamma_cocycle(X.field, X.omega, quad), 3), quad


def test_case_two_gamma_is_a_cocycle_but_its_first_monomial_is_not():
    X = _X(2, 4, "ord3")
    quad = [q for q in quadruple_enumerate(X.field, X.omega) if q.case == 2][0]
    assert quandle_cocycle_check(X, gamma_cocycle(X.field, X.omega, quad), 3)
    q1, q2, q3, q4 = quad.qs
    assert not quandle_cocycle_check(X, PolyCochain.monomial(X.field, (q1, q2 + q3, q4)), 3)


def test_e1_display_variant_fails():
    X = parse_quandle("alexander:3^2:omega=-1")
    F = X.field
    assert quandle_cocycle_check(X, e1_cocycle(F, X.omega, 1, 3), 3)
    bad = e1_cocycle(F, X.omega, 1, 3, display=True)
    rep = quandle_cocycle_check(X, bad, 3, report=True)
    assert not rep["ok"] and rep["witness"]["kind"] == "coboundary"


def test_e0_conditions():
    F = create_field(3, 2)
    w = F.neg[1]
    assert e0_cocycle(F, w, 3, 3) is not None
    with pytest.raises(ConditionViolated):
        e0_cocycle(F, w, 3, 1)
    with pytest.raises(ConditionViolated):
        e0_cocycle(F, w, 2, 1)
    with pytest.raises(ConditionViolated):
        e0_cocycle(F, F.parse_elem("0,1"), 3, 1)


def test_non_cocycle_detected():
    X = parse_quandle("alexander:3^2:omega=-1")
    P = PolyCochain.monomial(X.field, (1, 1, 1))
    rep = quandle_cocycle_check(X, P, 3, report=True)
    assert not rep["ok"]
    # constant cochains are not normalized
    rep = quandle_cocycle_check(X, PolyCochain.constant(X.field, 2), 2, report=True)
    assert rep["witness"]["kind"] == "degenerate"


def test_cocycle_check_size_guard():
    X = parse_quandle("alexander:2^4:omega=ord5")
    with pytest.raises(TooLarge):
        quandle_cocycle_check(X, PolyCochain.monomial(X.field, (1, 2, 4)), 3, limit=1000)


@pytest.mark.parametrize("spec", ["alexander:3:omega=2", "alexander:2^2:omega=gen", "alexander:3^2:omega=-1",
                                  "alexander:3^2:omega=0,1", "alexander:5:omega=2"])
def test_catalogue_is_a_basis(spec):
    r = cohomology_dimension_check(parse_quandle(spec))
    assert r["ok"], r


@pytest.mark.parametrize("p,h,w", [(3, 2, "-1"), (2, 2, None), (5, 1, None)])
def test_symbolic_and_pointwise_pullback_agree(p, h, w):
    X = _X(p, h, w)
    F = X.field
    cols = np.stack(np.meshgrid(*[np.arange(F.q)] * 3, indexing="ij"), -1).reshape(-1, 3)
    u = [F.sub(cols[:, 0], cols[:, 1]), F.sub(cols[:, 1], cols[:, 2]), cols[:, 2]]
    for P in [PolyCochain.monomial(F, (1, p, 1)), U(F, 3, 0) * chi_poly(F, 1, 2, 3)]:
        sym = phi_pullback_poly(F, X.omega, P)
        pt = pullback_phi(X, P, 3)(cols[:, 0], cols[:, 1], cols[:, 2])
        assert np.array_equal(sym(*u), pt)


def test_theta_checks_exhaustive_q9():
    X = parse_quandle("alexander:3^2:omega=-1")
    quad = quadruple_enumerate(X.field, X.omega)[0]
    r = theta_checks(theta_gamma(quad, X))
    assert r["exhaustive"] and r["order"] == 27
    assert r["cocycle"] and r["invariant"] and r["normalized"]


def test_massey_rejects_case_two():
    X = _X(2, 4, "ord3")
    quad = [q for q in quadruple_enumerate(X.field, X.omega) if q.case == 2][0]
    with pytest.raises(CaseTwoUnsupported):
        massey_verify(quad, X)


def test_massey_q9_case3():
    X = parse_quandle("alexander:3^2:omega=0,1")
    quad = quadruple_enumerate(X.field, X.omega)[0]
    assert quad.case == 3
    r = massey_verify(quad, X)
    assert r["ok"] is True and r["exhaustive"]


def test_degree_two_catalogue():
    X = parse_quandle("alexander:3^2:omega=-1")
    cat = quandle_cocycle_catalogue(X.field, X.omega, 2)
    assert [e["params"] for e in cat] == [[1, 3]]
    assert quandle_cocycle_check(X, cat[0]["poly"], 2)
