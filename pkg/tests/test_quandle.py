import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qinv.field import create_field
from qinv.quandle import (alexander_quandle, group_quandle, parse_quandle, quandle_type, is_connected,
                          Quandle, QuandleError)

SPECS = ["alexander:3:omega=2", "alexander:2^2:omega=gen", "alexander:3^2/1,0,1:omega=-1",
         "alexander:5:omega=2", "alexander:2^3:omega=ord7", "alexander:3^2:omega=0,1"]


@pytest.mark.parametrize("spec", SPECS)
def test_alexander_quandle_axioms(spec):
    X = parse_quandle(spec)
    X._check_axioms()
    n = X.size
    a = np.arange(n)
    assert np.all(X.op[a, a] == a)
    assert np.all(X.op[X.opinv, a[None, :]] == a[:, None])


@pytest.mark.parametrize("spec", SPECS)
def test_type_is_order_of_omega(spec):
    X = parse_quandle(spec)
    assert quandle_type(X) == X.field.order_of(X.omega)
    assert is_connected(X)


@pytest.mark.parametrize("spec", SPECS)
def test_spec_string_roundtrip(spec):
    X = parse_quandle(spec)
    Y = parse_quandle(X.spec_string())
    assert Y.spec_string() == X.spec_string()
    assert np.array_equal(X.op, Y.op)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 8), st.integers(0, 8), st.integers(0, 8))
def test_alexander_operation_formula(x, y, z):
    F = create_field(3, 2)
    w = F.parse_elem("0,1")
    X = alexander_quandle(F, F.from_code(w))
    assert X.op[x, y] == F.add(F.mul(w, x), F.mul(F.sub(1, w), y))
    assert X.op[X.op[x, y], z] == X.op[X.op[x, z], X.op[y, z]]


def test_alexander_rejects_trivial_omega():
    F = create_field(5)
    for w in (0, 1):
        with pytest.raises(QuandleError):
            alexander_quandle(F, w)


def test_group_quandle_from_file(tmp_path):
    # Z_5 with rho = multiplication by 2 is the Alexander quandle (F_5, 2)
    n = 5
    mul = [[(a + b) % n for b in range(n)] for a in range(n)]
    rho = [(2 * a) % n for a in range(n)]
    f = tmp_path / "g.json"
    f.write_text(json.dumps({"mul": mul, "rho": rho}))
    X = parse_quandle(f"groupaut:@{f}")
    Y = parse_quandle("alexander:5:omega=2")
    assert np.array_equal(X.op, Y.op)


def test_group_quandle_rejects_non_automorphism():
    n = 4
    mul = [[(a + b) % n for b in range(n)] for a in range(n)]
    with pytest.raises(QuandleError):
        group_quandle(mul, [0, 2, 1, 3])


def test_bad_tables_rejected():
    with pytest.raises(QuandleError):
        Quandle([[1, 0], [1, 0]])
    # the dihedral-like table that is not self-distributive
    bad = [[0, 2, 1], [2, 1, 0], [0, 1, 2]]
    with pytest.raises(QuandleError):
        Quandle(bad)


def test_parse_errors():
    for s in ["alexander:3", "alexander:3:omega=1", "mystery:1", "alexander:9:omega=2"]:
        with pytest.raises(ValueError):
            parse_quandle(s)


def test_extended_quandle_order():
    X = parse_quandle("extended:alexander:3^2:omega=-1")
    assert X.size == 27
    assert X.kind == "groupaut"
    assert X.base.size == 9
