"""Exact linear algebra: row reduction over F_p and F_q, Smith normal form over Z."""

from __future__ import annotations

import math

import numpy as np


def rref_mod_p(M, p: int):
    """Reduced row echelon form over F_p.  Returns (R, pivot_columns) with R
    holding only the nonzero rows."""
    A = np.array(M, dtype=np.int64) % p
    rows, cols = A.shape
    pivots = []
    r = 0
    inv = [0] + [pow(x, -1, p) for x in range(1, p)]
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            A[[r, k]] = A[[k, r]]
        A[r] = (A[r] * inv[A[r, c]]) % p
        col = A[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            A[nzr] = (A[nzr] - col[nzr, None] * A[r][None, :]) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank_mod_p(M, p: int) -> int:
    """Rank over F_p; eliminates on the smaller orientation."""
    A = np.asarray(M, dtype=np.int64)
    if A.size == 0:
        return 0
    if A.shape[0] > A.shape[1]:
        A = A.T
    return len(rref_mod_p(A, p)[1])


def field_rref(F, M):
    """RREF over F_q for a small matrix of field codes (python-level loops)."""
    A = np.array(M, dtype=np.int64).copy()
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            A[[r, k]] = A[[k, r]]
        A[r] = F.mul(int(F.inv(A[r, c])), A[r])
        for i in range(rows):
            if i != r and A[i, c] != 0:
                A[i] = F.sub(A[i], F.mul(int(A[i, c]), A[r]))
        pivots.append(c)
        r += 1
    return A[:r], pivots


def field_nullspace(F, M):
    """Basis of {v : M v = 0} over F_q as a list of code vectors."""
    M = np.asarray(M, dtype=np.int64)
    ncols = M.shape[1]
    if M.shape[0] == 0:
        R, piv = np.zeros((0, ncols), dtype=np.int64), []
    else:
        R, piv = field_rref(F, M)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = np.zeros(ncols, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(piv):
            v[pc] = F.neg[R[i, f]]
        basis.append(v)
    return basis


def field_rank(F, M) -> int:
    M = np.asarray(M, dtype=np.int64)
    if M.size == 0:
        return 0
    return len(field_rref(F, M)[1])


def smith_diagonal(M):
    """Nonzero invariant factors of an integer matrix (d_1 | d_2 | ...).

    Smallest-magnitude pivoting on exact integers; entries stay small for the
    boundary matrices handled here, and overflow is guarded by switching to
    Python integers.
    """
    A = np.array(M, dtype=object if np.asarray(M).dtype == object else np.int64)
    if A.size == 0:
        return []
    diag = []
    while A.size and np.any(A != 0):
        absA = np.abs(A)
        masked = np.where(absA == 0, np.iinfo(np.int64).max if A.dtype != object else 10 ** 30, absA)
        i, j = np.unravel_index(np.argmin(masked), A.shape)
        while True:
            piv = A[i, j]
            # clear column j
            col = A[:, j]
            qs = col // piv
            qs[i] = 0
            if np.any(qs != 0):
                A = A - np.outer(qs, A[i])
            # clear row i
            row = A[i, :]
            qs = row // piv
            qs[j] = 0
            if np.any(qs != 0):
                A = A - np.outer(A[:, j], qs)
            rest_col = np.nonzero(A[:, j])[0]
            rest_row = np.nonzero(A[i, :])[0]
            rest_col = rest_col[rest_col != i]
            rest_row = rest_row[rest_row != j]
            if rest_col.size == 0 and rest_row.size == 0:
                break
            # a smaller remainder appeared: move the pivot there
            cands = [(abs(A[k, j]), k, j) for k in rest_col] + [(abs(A[i, k]), i, k) for k in rest_row]
            _, i, j = min(cands)
        diag.append(abs(int(A[i, j])))
        A = np.delete(np.delete(A, i, axis=0), j, axis=1)
        if A.dtype != object and A.size and np.abs(A).max() > 2 ** 40:
            A = A.astype(object)
    return _invariant_factors(diag)


def _invariant_factors(diag):
    d = sorted(x for x in diag if x != 0)
    changed = True
    while changed:
        changed = False
        for a in range(len(d)):
            for b in range(a + 1, len(d)):
                if d[b] % d[a]:
                    g = math.gcd(d[a], d[b])
                    l = d[a] * d[b] // g
                    d[a], d[b] = g, l
                    changed = True
        d.sort()
    return d
