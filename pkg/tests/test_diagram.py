import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qinv.chain import boundary_rack
from qinv.diagram import (BraidWord, from_pd, from_braid, braid_to_pd, torus_braid, parse_link, parse_braid,
                          mirror_pd, enumerate_colorings, count_colorings, coloring_basis, is_coloring,
                          shadow_regions, shadow_complete, weights, fundamental_class, knot_record,
                          load_knot_table, DiagramError, MalformedPD, _dfs_colorings)
from qinv.quandle import parse_quandle

TREFOIL_PD = [[1, 4, 2, 5], [3, 6, 4, 1], [5, 2, 6, 3]]


def test_trefoil_counts():
    D = from_pd(TREFOIL_PD)
    assert (D.n_arcs, D.n_crossings, D.n_regions) == (3, 3, 5)
    assert D.components == 1
    assert set(D.signs().tolist()) == {-1}
    # Fox 3-colorings of the trefoil
    assert count_colorings(D, parse_quandle("alexander:3:omega=2")) == 9


def test_figure_eight_regions_and_signs():
    D = parse_link("knot:4_1")
    assert (D.n_arcs, D.n_regions) == (4, 6)
    assert sorted(D.signs().tolist()) == [-1, -1, 1, 1]


def test_positive_braid_matches_tabulated_pd():
    B = parse_link("braid:n=2:1,1,1")
    P = parse_link("knot:3_1")
    assert set(B.signs().tolist()) == {1} and set(P.signs().tolist()) == {1}
    X = parse_quandle("alexander:3^2:omega=-1")
    assert count_colorings(B, X) == count_colorings(P, X) == 81


def test_mirror_flips_signs():
    D = parse_link("knot:3_1")
    M = from_pd(mirror_pd(D.source["pd"]))
    assert np.array_equal(M.signs(), -D.signs())
    assert np.array_equal(D.mirror().signs(), -D.signs())


def test_torus_braid_convention():
    b = torus_braid(3, 2)
    assert b.strands == 2 and list(b.letters) == [-1, -1, -1]
    assert list(torus_braid(2, 3, sign=1).letters) == [2, 1, 2, 1]
    # T(m, n) is closed up from m full twists on n strands
    assert parse_link("torus:2,5").n_crossings == 8


def test_braid_pd_is_valid():
    rows, _ = braid_to_pd(BraidWord(3, (1, -2, 1, -2)))
    flat = sorted(e for r in rows for e in r)
    assert flat == sorted(list(range(1, 9)) * 2)


@pytest.mark.parametrize("bad", [
    [[1, 2, 3]],                               # wrong row length
    [[1, 5, 2, 4], [3, 1, 4, 6], [5, 3, 6, 7]],  # label used once
    [[1, 1, 2, 2], [1, 2, 3, 3]],             # label used three times
])
def test_malformed_pd(bad):
    with pytest.raises(MalformedPD):
        from_pd(bad)


def test_parse_link_variants(tmp_path):
    f = tmp_path / "k.json"
    f.write_text(json.dumps({"pd": TREFOIL_PD}))
    a = parse_link(f"pd:@{f}")
    b = parse_link("pd:" + json.dumps(TREFOIL_PD))
    assert a.n_crossings == b.n_crossings == 3
    u = parse_link("unknot")
    assert u.n_crossings == 0 and u.n_arcs == 1
    for s in ["braid:n=2:3", "knot:99_99", "cable:1"]:
        with pytest.raises(DiagramError):
            parse_link(s)


def test_parse_braid():
    b = parse_braid("braid:n=3:1,-2,1")
    assert b.strands == 3 and list(b.letters) == [1, -2, 1]


def test_knot_table_override(tmp_path, monkeypatch):
    f = tmp_path / "t.json"
    f.write_text(json.dumps({"knots": {"k": {"pd": TREFOIL_PD}}}))
    monkeypatch.setenv("QINV_KNOT_TABLE", str(f))
    assert list(load_knot_table()) == ["k"]
    assert parse_link("knot:k").n_crossings == 3
    f.write_text(json.dumps([{"name": "k2", "pd": TREFOIL_PD}]))
    assert parse_link("knot:k2").n_crossings == 3
    monkeypatch.delenv("QINV_KNOT_TABLE")
    assert "9_40" in load_knot_table()


@pytest.mark.parametrize("name", ["3_1", "4_1", "9_40", "9_41", "9_49", "10_103", "10_123", "10_155", "10_157"])
def test_table_pd_matches_braid(name):
    # two independent presentations from the table: equal signature of
    # coloring counts and the same determinant
    rec = knot_record(name)
    P = from_pd(rec["pd"])
    B = from_braid(BraidWord(rec["strands"], tuple(rec["braid"])))
    for spec in ["alexander:3:omega=2", "alexander:5:omega=4", "alexander:7:omega=6", "alexander:11:omega=10"]:
        X = parse_quandle(spec)
        assert count_colorings(P, X) == count_colorings(B, X)
    # Fox colorings mod p are nontrivial exactly when p divides the determinant
    for p in (3, 5, 7, 11):
        X = parse_quandle(f"alexander:{p}:omega={p - 1}")
        assert (count_colorings(P, X) > p) == (rec["determinant"] % p == 0)


LINKS = ["knot:3_1", "knot:4_1", "braid:n=3:1,-2,1,-2", "torus:3,4", "braid:n=3:1,1,2,-1,2"]


@pytest.mark.parametrize("link", LINKS)
@pytest.mark.parametrize("spec", ["alexander:3^2:omega=-1", "alexander:2^2:omega=gen", "alexander:5:omega=2"])
def test_enumeration_routes_agree(link, spec):
    D = parse_link(link)
    X = parse_quandle(spec)
    a = enumerate_colorings(D, X)
    b = _dfs_colorings(D, X, 10 ** 6)
    assert np.array_equal(a, b)
    assert len(a) == X.size ** len(coloring_basis(D, X))
    assert all(is_coloring(D, X, c) for c in a)


def test_non_alexander_enumeration():
    X = parse_quandle("extended:alexander:3^2:omega=-1")
    D = parse_link("knot:3_1")
    cols = enumerate_colorings(D, X)
    assert all(is_coloring(D, X, c) for c in cols)
    # every coloring covers a coloring of the base quandle
    px = X.clauwens.covering_project
    base = {tuple(r) for r in enumerate_colorings(D, X.base).tolist()}
    assert {tuple(px(c).tolist()) for c in cols} <= base


@pytest.mark.parametrize("link", LINKS)
def test_region_orders_agree(link):
    D = parse_link(link)
    X = parse_quandle("alexander:3^2:omega=0,1")
    cols = enumerate_colorings(D, X)
    for x0 in (0, 4):
        a = shadow_regions(D, X, cols, x0, order="bfs")
        b = shadow_regions(D, X, cols, x0, order="dfs")
        assert np.array_equal(a, b)


@pytest.mark.parametrize("link", LINKS)
@settings(max_examples=15, deadline=None)
@given(data=st.data())
def test_fundamental_class_is_a_cycle(link, data):
    D = parse_link(link)
    X = parse_quandle("alexander:3^2:omega=-1")
    cols = enumerate_colorings(D, X)
    C = cols[data.draw(st.integers(0, len(cols) - 1))]
    S = shadow_complete(D, X, C, data.draw(st.integers(0, X.size - 1)))
    assert boundary_rack(X, fundamental_class(D, S)).is_zero()


def test_weights_shape():
    D = parse_link("knot:3_1")
    X = parse_quandle("alexander:3:omega=2")
    cols = enumerate_colorings(D, X)
    lam = shadow_regions(D, X, cols, 0)
    W, sg = weights(D, cols, lam)
    assert W.shape == (9, 3, 3) and sg.shape == (3,)
    # trivial colorings give degenerate weights
    triv = [i for i, c in enumerate(cols) if len(set(c.tolist())) == 1]
    assert all(np.all(W[i, :, 1] == W[i, :, 2]) for i in triv)


def test_shadow_rejects_non_coloring():
    D = parse_link("knot:3_1")
    X = parse_quandle("alexander:3:omega=2")
    with pytest.raises(DiagramError):
        shadow_complete(D, X, [0, 1, 1], 0)
