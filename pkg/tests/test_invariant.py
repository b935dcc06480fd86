import math

import numpy as np
import pytest

from qinv.cocycle import PolyCochain, gamma_cocycle, quadruple_enumerate, theta_gamma
from qinv.diagram import parse_link, enumerate_colorings
from qinv.field import create_field, elements_of_order
from qinv.invariant import (GroupRingValue, NotDivisible, NotACocycle, HypothesisUnmet, InvariantError,
                            state_sum_invariant, pairings, dw_partial, dw_hypothesis, torus_closed_form,
                            torus_brute_force, torus_case, torus_zeta, torus_coloring_dim, lemma55_pairings,
                            table_value, TABULATED)
from qinv.quandle import parse_quandle, alexander_quandle

X9 = parse_quandle("alexander:3^2/1,0,1:omega=-1")
Q9 = quadruple_enumerate(X9.field, X9.omega)[0]
G9 = gamma_cocycle(X9.field, X9.omega, Q9)
SPEC_TREFOIL = "pd:[[1,4,2,5],[3,6,4,1],[5,2,6,3]]"


# ---------------------------------------------------------------------------
# group ring values

def test_group_ring_arithmetic():
    F = create_field(3, 2)
    a = GroupRingValue(F, {0: 2, 1: 4})
    b = GroupRingValue.point(F, 6, 1)
    assert (a + b).counts == {0: 2, 1: 10}
    assert a.scale(3).divide(3) == a
    assert a.mass() == 6
    assert a.negate_elements().counts == {0: 2, int(F.neg[1]): 4}
    with pytest.raises(NotDivisible):
        a.divide(4)


def test_empty_value_serializes_to_empty_coeffs():
    F = create_field(5)
    v = GroupRingValue(F)
    assert v.to_json()["coeffs"] == []
    assert v.trivial
    assert v.dumps() == GroupRingValue(F).dumps()


def test_from_values_counts():
    F = create_field(5)
    v = GroupRingValue.from_values(F, [0, 1, 1, 4], weight=2)
    assert v.counts == {0: 2, 1: 4, 4: 2}
    assert v.sorted_items() == [("0", 2), ("1", 4), ("4", 2)]


# ---------------------------------------------------------------------------
# state sums

def test_trefoil_values():
    # the two trefoils differ by a -> -a; the unknot and figure-eight are trivial
    pos = state_sum_invariant(parse_link("braid:n=2:1,1,1"), X9, G9)
    neg = state_sum_invariant(parse_link(SPEC_TREFOIL), X9, G9)
    assert pos.sorted_items() == [("0,0", 81), ("1,0", 648)]
    assert neg.sorted_items() == [("0,0", 81), ("2,0", 648)]
    assert state_sum_invariant(parse_link("unknot"), X9, G9).sorted_items() == [("0,0", 81)]
    assert state_sum_invariant(parse_link("knot:4_1"), X9, G9).trivial


@pytest.mark.parametrize("a,b", [
    ("braid:n=2:1,1,1", "knot:3_1"),
    ("braid:n=2:1,1,1", "braid:n=3:1,1,1,2"),      # stabilization
    ("braid:n=2:1,1,1", "braid:n=3:2,2,2"),        # different strands
    ("braid:n=3:1,-2,1,-2", "knot:4_1"),
    ("braid:n=3:1,2,1,2", "braid:n=3:2,1,2,2"),    # braid relation and conjugation
    ("braid:n=3:1,-2,1,-2", "braid:n=3:-2,1,-2,1"),
])
def test_presentation_invariance(a, b):
    for spec in ["alexander:3^2:omega=-1", "alexander:3^2:omega=0,1"]:
        X = parse_quandle(spec)
        for quad in quadruple_enumerate(X.field, X.omega):
            psi = gamma_cocycle(X.field, X.omega, quad)
            assert state_sum_invariant(parse_link(a), X, psi) == state_sum_invariant(parse_link(b), X, psi)


@pytest.mark.parametrize("link", ["knot:3_1", "knot:4_1", "torus:3,4", "braid:n=3:1,1,2,-1,2"])
def test_mirror_negates_elements(link):
    D = parse_link(link)
    X = parse_quandle("alexander:3^2:omega=0,1")
    psi = gamma_cocycle(X.field, X.omega, quadruple_enumerate(X.field, X.omega)[0])
    a = state_sum_invariant(D, X, psi)
    b = state_sum_invariant(D.mirror(), X, psi)
    assert b == a.negate_elements()


@pytest.mark.parametrize("link", ["knot:3_1", "knot:4_1", "torus:3,4", "unknot"])
def test_mass_counts_shadow_colorings(link):
    D = parse_link(link)
    I = state_sum_invariant(D, X9, G9)
    assert I.mass() == X9.size * len(enumerate_colorings(D, X9))
    assert I == state_sum_invariant(D, X9, G9, mode="reduced")


def test_coboundary_gives_trivial_invariant():
    # delta f pairs to zero with every fundamental class, whatever f is
    X = parse_quandle("alexander:5:omega=2")
    F = X.field
    f = PolyCochain.monomial(F, (1, 2)).on_rack(X)
    w = X.op

    def cobound(x, y, z):
        # dual of d(x,y,z) = (x,z) - (x<y,z) - (x,y) + (x<z,y<z)
        terms = [f(x, z), F.neg[f(w[x, y], z)], F.neg[f(x, y)], f(w[x, z], w[y, z])]
        return F.sum(np.stack(terms, -1), axis=-1)

    for link in ["knot:3_1", "knot:4_1", "torus:3,4"]:
        D = parse_link(link)
        cols = enumerate_colorings(D, X)
        for x0 in range(X.size):
            assert np.all(pairings(D, X, cobound, cols, x0) == 0)


def test_non_cocycle_rejected():
    with pytest.raises(NotACocycle):
        state_sum_invariant(parse_link("knot:3_1"), X9, PolyCochain.monomial(X9.field, (1, 1, 1)))


def test_unknown_mode_rejected():
    with pytest.raises(InvariantError):
        state_sum_invariant(parse_link("knot:3_1"), X9, G9, mode="bogus")


def test_extended_quandle_state_sum_matches_pullback():
    # a cocycle pulled back along the covering projection gives a value with
    # the same support as the base value
    Xt = parse_quandle("extended:alexander:3^2:omega=-1")
    G = Xt.clauwens
    f = G9.on_rack(X9)

    def pulled(x, y, z):
        px = G.covering_project
        return f(px(x), px(y), px(z))

    D = parse_link("knot:3_1")
    I = state_sum_invariant(D, Xt, pulled, field=X9.field, check=False)
    base = state_sum_invariant(D, X9, G9)
    assert I.mass() == Xt.size * len(enumerate_colorings(D, Xt))
    assert {a for a in I.counts} == {a for a in base.counts}


# ---------------------------------------------------------------------------
# Dijkgraaf-Witten partial sum

def test_dw_values():
    kappa = theta_gamma(Q9, X9)
    assert dw_partial(parse_link("braid:n=2:1,1,1"), X9, kappa).sorted_items() == [("0,0", 9), ("1,0", 72)]
    assert dw_partial(parse_link(SPEC_TREFOIL), X9, kappa).sorted_items() == [("0,0", 9), ("2,0", 72)]
    assert dw_partial(parse_link("unknot"), X9, kappa).sorted_items() == [("0,0", 9)]


def test_dw_hypothesis():
    assert dw_hypothesis(X9)["ok"]
    X = parse_quandle("alexander:2^2:omega=gen")
    h = dw_hypothesis(X)
    assert h["type"] == 3 and not h["ok"]


# ---------------------------------------------------------------------------
# torus knots

SWEEP = [(3, 2), (2, 4), (5, 2), (3, 3), (7, 2)]


@pytest.mark.parametrize("p,h", SWEEP)
def test_torus_closed_form_sweep(p, h):
    F = create_field(p, h)
    n_checked = 0
    for w in range(2, F.q):
        X = alexander_quandle(F, F.from_code(w))
        for quad in quadruple_enumerate(F, w):
            for m in range(2, 7):
                for n in range(2, 7):
                    if math.gcd(m, n) != 1 or math.gcd(F.q, n) != 1:
                        continue
                    if torus_case(m, n, X, quad) == "iii":
                        continue
                    cf = torus_closed_form(m, n, X, quad)
                    assert cf == torus_brute_force(m, n, X, quad), (F.q, w, quad, m, n)
                    n_checked += 1
    assert n_checked > 0


def test_torus_example_value():
    cf = torus_closed_form(3, 2, X9, Q9)
    assert cf.meta["case"] == "ii"
    assert cf.sorted_items() == [("0,0", 81), ("2,0", 648)]


def test_torus_zeta_without_primitive_root():
    F = create_field(5, 2)
    w = elements_of_order(F, 6)[0]
    # T(3, 4): no primitive 4th root with zeta^3 = w^3, but zeta = -1 works
    assert torus_zeta(F, w, 3, 4) == F.neg[1]


def test_torus_coloring_dim():
    F = create_field(5, 2)
    w = F.neg[1]
    # T(2,3) has Delta(-1) = 3, a unit mod 5: only trivial colorings
    assert torus_coloring_dim(F, w, 2, 3) == 1
    assert torus_coloring_dim(create_field(3, 2), create_field(3, 2).neg[1], 2, 3) == 2


def test_torus_hypotheses():
    with pytest.raises(HypothesisUnmet):
        torus_closed_form(2, 4, X9, Q9)
    with pytest.raises(HypothesisUnmet):
        torus_closed_form(2, 3, X9, Q9)


def test_cyclic_cover_pairings_p3():
    X = parse_quandle("alexander:3^2:omega=0,1")
    quad = quadruple_enumerate(X.field, X.omega)[0]
    r = lemma55_pairings(3, 4, X, quad)
    assert r["ok"] and r["items"]["II"]["status"] == "pass"
    with pytest.raises(HypothesisUnmet):
        lemma55_pairings(2, 3, X, quad)


# ---------------------------------------------------------------------------
# knot table

@pytest.mark.parametrize("name,p,expect", [("9_49", 5, "match"), ("10_103", 5, "match"), ("10_157", 7, "mirror"),
                                           ("9_41", 7, "none"), ("10_155", 5, "none")])
def test_table_comparison(name, p, expect):
    F = create_field(p, 2)
    w = F.neg[1]
    X = alexander_quandle(F, F.from_code(w))
    quad = quadruple_enumerate(F, w)[0]
    I = state_sum_invariant(parse_link("knot:" + name), X, gamma_cocycle(F, w, quad), mode="reduced", check=False)
    T = table_value(name, F, quad)
    got = "match" if I == T else "mirror" if I.negate_elements() == T else "none"
    assert got == expect


def test_table_wrong_prime():
    F = create_field(3, 2)
    with pytest.raises(HypothesisUnmet):
        table_value("9_40", F, Q9)
    assert set(TABULATED) == {"9_40", "9_41", "9_49", "10_103", "10_123", "10_155", "10_157"}
