import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qinv.field import (create_field, parse_field, is_irreducible, canonical_modulus, elements_of_order,
                        find_zeta, FieldError, NotPrime, Reducible, DegreeMismatch, ZeroElement)

FIELDS = [(2, 1), (3, 1), (2, 2), (3, 2), (2, 3), (5, 2), (2, 4), (3, 3), (7, 2)]


@pytest.mark.parametrize("p,h", FIELDS)
def test_tables_satisfy_field_axioms(p, h):
    F = create_field(p, h)
    a = np.arange(F.q)
    # additive group
    assert np.all(F.add(a, F.neg[a]) == 0)
    assert np.all(F.add(a, 0) == a)
    # multiplicative group of nonzero elements
    nz = a[1:]
    assert np.all(F.mul(nz, F.inv(nz)) == 1)
    assert np.all(F.mul(a, 1) == a)
    assert np.all(F.mul(a, 0) == 0)


@pytest.mark.parametrize("p,h", FIELDS)
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_ring_identities(p, h, data):
    F = create_field(p, h)
    x, y, z = (data.draw(st.integers(0, F.q - 1)) for _ in range(3))
    assert F.mul(x, F.add(y, z)) == F.add(F.mul(x, y), F.mul(x, z))
    assert F.mul(F.mul(x, y), z) == F.mul(x, F.mul(y, z))
    assert F.add(F.add(x, y), z) == F.add(x, F.add(y, z))
    assert F.mul(x, y) == F.mul(y, x)
    # Frobenius is additive
    assert F.pow(F.add(x, y), p) == F.add(F.pow(x, p), F.pow(y, p))


@pytest.mark.parametrize("p,h", FIELDS)
def test_multiplicative_group_is_cyclic(p, h):
    F = create_field(p, h)
    # one generator and phi(d) elements of each order d dividing q - 1
    for d in range(1, F.q):
        if (F.q - 1) % d == 0:
            phi = sum(1 for k in range(1, d + 1) if math.gcd(k, d) == 1)
            assert len(elements_of_order(F, d)) == phi
    assert F.order_of(F.primitive) == F.q - 1


def test_canonical_modulus_is_irreducible():
    for p, h in FIELDS:
        m = canonical_modulus(p, h)
        assert len(m) == h + 1 and m[-1] == 1
        assert is_irreducible(m, p)
    # x^2 + 1 over F_3 is the least one
    assert canonical_modulus(3, 2) == (1, 0, 1)


def test_irreducibility():
    assert is_irreducible((1, 1, 1), 2)
    assert not is_irreducible((1, 0, 1), 2)  # (x + 1)^2
    assert not is_irreducible((2, 0, 1), 3)  # x^2 - 1


def test_parse_and_format_roundtrip():
    F = parse_field("3^2/1,0,1")
    assert F.spec_string() == "3^2/1,0,1"
    assert parse_field(F.spec_string()) == F
    for c in range(F.q):
        assert F.parse_elem(F.format_elem(c)) == c
    assert parse_field("5") == create_field(5, 1)


def test_i_squared_is_minus_one():
    F = parse_field("3^2/1,0,1")
    i = F.parse_elem("0,1")
    assert F.mul(i, i) == F.neg[1]
    assert F.order_of(i) == 4


def test_field_elem_operators():
    F = create_field(5, 2)
    a = F.elem([1, 2])
    b = F.elem(3)
    assert (a + b) - b == a
    assert (a * b) / b == a
    assert a ** (F.q - 1) == F.elem(1)
    assert -a + a == F.elem(0)


def test_errors():
    with pytest.raises(NotPrime):
        create_field(4, 1)
    with pytest.raises(Reducible):
        create_field(2, 2, (1, 0, 1))
    with pytest.raises(DegreeMismatch):
        create_field(3, 2, (1, 1))
    with pytest.raises(DegreeMismatch):
        create_field(3, 2).parse_elem("1,1,1")
    with pytest.raises(ZeroElement):
        create_field(3, 1).order_of(0)
    with pytest.raises(FieldError):
        create_field(2, 17)


def test_find_zeta():
    F = create_field(3, 2)
    w = F.from_code(F.neg[1])
    z = find_zeta(w, 3, 2)
    # zeta is a primitive square root of unity with zeta^3 = w^3
    assert z is not None
    assert F.pow(z.code, 2) == 1 and z.code != 1
    assert F.pow(z.code, 3) == F.pow(w.code, 3)
