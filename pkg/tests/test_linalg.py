import itertools
import math

import numpy as np
from hypothesis import given, settings, strategies as st

from qinv.field import create_field
from qinv.linalg import smith_diagonal, rank_mod_p, field_nullspace, rref_mod_p


def _det(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    return sum((-1) ** j * M[0][j] * _det([r[:j] + r[j + 1:] for r in M[1:]]) for j in range(n))


def _determinantal_divisors(M):
    # d_k = gcd of the k x k minors; invariant factors are d_k / d_{k-1}
    rows, cols = len(M), len(M[0])
    out = []
    prev = 1
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for r in itertools.combinations(range(rows), k):
            for c in itertools.combinations(range(cols), k):
                g = math.gcd(g, _det([[M[i][j] for j in c] for i in r]))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def test_smith_small_examples():
    assert smith_diagonal([[2, 4], [6, 8]]) == [2, 4]
    assert smith_diagonal([[0, 0], [0, 0]]) == []
    assert smith_diagonal([[3]]) == [3]
    assert smith_diagonal(np.zeros((0, 3), dtype=np.int64)) == []


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_smith_matches_determinantal_divisors(r, c, data):
    M = [[data.draw(st.integers(-6, 6)) for _ in range(c)] for _ in range(r)]
    d = smith_diagonal(M)
    assert d == _determinantal_divisors(M)
    assert all(b % a == 0 for a, b in zip(d, d[1:]))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.sampled_from([2, 3, 5]), st.data())
def test_rank_mod_p_properties(r, c, p, data):
    M = np.array([[data.draw(st.integers(0, p - 1)) for _ in range(c)] for _ in range(r)])
    k = rank_mod_p(M, p)
    assert k == rank_mod_p(M.T, p) <= min(r, c)
    R, piv = rref_mod_p(M, p)
    assert len(piv) == k
    assert np.all(R[np.arange(k), piv] == 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 5), st.data())
def test_field_nullspace(r, c, data):
    F = create_field(3, 2)
    M = np.array([[data.draw(st.integers(0, F.q - 1)) for _ in range(c)] for _ in range(r)])
    for v in field_nullspace(F, M):
        assert np.all(F.sum(F.mul(M, v[None, :]), axis=1) == 0)
