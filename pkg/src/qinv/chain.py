"""Chain complexes of quandles and groups, the maps Upsilon and phi_n, and
integral quandle homology.

Chains are handled in two forms.  :class:`FormalChain` is a dict from tuples to
nonzero integers, convenient at API level.  For exhaustive checks the same
differentials act on *batches*: arrays ``(gid, tup, coef)`` where ``gid`` tags
the generator a term came from, ``tup`` is an (N, n) array of element indices
and ``coef`` the integer coefficients.  Each batch operation is a pure numpy
transformation, and :func:`collect` merges equal terms.

Coordinates:

* rack chains (x_1, ..., x_n) with boundary d^R;
* group-quandle chains (g_1, ..., g_n) with d^{R_G}, related to rack chains by
  Upsilon(x_1, ..., x_n) = (x_1 x_2^-1, ..., x_{n-1} x_n^-1, x_n);
* inhomogeneous group chains with the bar differential d^gr.
"""

from __future__ import annotations

import itertools

import numpy as np

from .linalg import smith_diagonal, rank_mod_p
from .quandle import Quandle, quandle_type


class ChainError(ValueError):
    pass


class DegreeMismatch(ChainError):
    pass


class NotGroupQuandle(ChainError):
    pass


class TooLarge(ChainError):
    pass


class FormalChain:
    """A finite Z-linear combination of n-tuples."""

    def __init__(self, degree: int, terms=None):
        self.degree = degree
        self.terms = {}
        if terms:
            for t, c in (terms.items() if isinstance(terms, dict) else terms):
                self.add_term(t, c)

    def add_term(self, t, c=1):
        t = tuple(int(x) for x in t)
        if len(t) != self.degree:
            raise DegreeMismatch(f"tuple {t} has arity {len(t)}, expected {self.degree}")
        v = self.terms.get(t, 0) + int(c)
        if v:
            self.terms[t] = v
        else:
            self.terms.pop(t, None)

    def __add__(self, other):
        if other.degree != self.degree:
            raise DegreeMismatch("adding chains of different degree")
        out = FormalChain(self.degree, self.terms)
        for t, c in other.terms.items():
            out.add_term(t, c)
        return out

    def __neg__(self):
        return FormalChain(self.degree, {t: -c for t, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k: int):
        return FormalChain(self.degree, {t: k * c for t, c in self.terms.items()} if k else None)

    def __eq__(self, other):
        return isinstance(other, FormalChain) and self.degree == other.degree and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        body = " + ".join(f"{c}*{t}" for t, c in sorted(self.terms.items()))
        return f"FormalChain[{self.degree}]({body or '0'})"

    def to_json(self):
        return [{"coef": c, "tuple": list(t)} for t, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, degree, data):
        return cls(degree, [(d["tuple"], d["coef"]) for d in data])

    # batch conversion

    def arrays(self):
        n = self.degree
        if not self.terms:
            return (np.zeros(0, dtype=np.int64), np.zeros((0, n), dtype=np.int64),
                    np.zeros(0, dtype=np.int64))
        tup = np.array(list(self.terms.keys()), dtype=np.int64).reshape(-1, n)
        coef = np.array(list(self.terms.values()), dtype=np.int64)
        return np.zeros(len(coef), dtype=np.int64), tup, coef

    @classmethod
    def from_arrays(cls, degree, tup, coef):
        out = cls(degree)
        for t, c in zip(np.asarray(tup).reshape(-1, degree).tolist(), np.asarray(coef).tolist()):
            out.add_term(t, c)
        return out


def generator(*t) -> FormalChain:
    return FormalChain(len(t), {tuple(t): 1})


# ---------------------------------------------------------------------------
# batch primitives

def _empty(n):
    return (np.zeros(0, dtype=np.int64), np.zeros((0, n), dtype=np.int64),
            np.zeros(0, dtype=np.int64))


def _cat(parts, n):
    if not parts:
        return _empty(n)
    return (np.concatenate([p[0] for p in parts]),
            np.concatenate([p[1] for p in parts]).reshape(-1, n),
            np.concatenate([p[2] for p in parts]))


def tuple_codes(tup, base: int):
    tup = np.asarray(tup, dtype=np.int64)
    code = np.zeros(tup.shape[0], dtype=np.int64)
    for j in range(tup.shape[1]):
        code = code * base + tup[:, j]
    return code


def collect(batch, base: int):
    """Merge equal (gid, tuple) terms and drop zero coefficients."""
    gid, tup, coef = batch
    n = tup.shape[1]
    if len(coef) == 0:
        return batch
    key = gid * base ** n + tuple_codes(tup, base)
    uk, first, inv = np.unique(key, return_index=True, return_inverse=True)
    sums = np.bincount(inv.ravel(), weights=coef, minlength=len(uk)).round().astype(np.int64)
    keep = sums != 0
    return gid[first][keep], tup[first][keep], sums[keep]


def rack_boundary_batch(X: Quandle, batch):
    """d^R(x_1..x_n) = sum_{i=2..n} (-1)^i [(..x_i^..) - (x_1<x_i, .., x_{i-1}<x_i, x_{i+1}, ..)]."""
    gid, tup, coef = batch
    n = tup.shape[1]
    if n <= 1:
        return _empty(0)
    parts = []
    for i in range(2, n + 1):
        s = 1 if i % 2 == 0 else -1
        rest = np.delete(tup, i - 1, axis=1)
        parts.append((gid, rest, s * coef))
        moved = rest.copy()
        moved[:, : i - 1] = X.op[tup[:, : i - 1], tup[:, i - 1][:, None]]
        parts.append((gid, moved, -s * coef))
    return _cat(parts, n - 1)


def _group(X: Quandle):
    if X.group is None:
        raise NotGroupQuandle("quandle has no (G, rho) presentation")
    return X.group


def rack_group_boundary_batch(X: Quandle, batch):
    """d^{R_G}: sum_{i=1..n-1} (-1)^i [(.., g_i g_{i+1}, ..) - (rho g_1, .., rho g_{i-1}, rho(g_i) g_{i+1}, ..)]."""
    G = _group(X)
    gid, tup, coef = batch
    n = tup.shape[1]
    if n <= 1:
        return _empty(0)
    parts = []
    for i in range(1, n):
        s = 1 if i % 2 == 0 else -1
        a = np.delete(tup, i, axis=1)
        a[:, i - 1] = G.mul[tup[:, i - 1], tup[:, i]]
        parts.append((gid, a, s * coef))
        b = np.delete(tup, i, axis=1)
        b[:, : i - 1] = G.rho[tup[:, : i - 1]]
        b[:, i - 1] = G.mul[G.rho[tup[:, i - 1]], tup[:, i]]
        parts.append((gid, b, -s * coef))
    return _cat(parts, n - 1)


def group_boundary_batch(G, batch):
    """Inhomogeneous bar differential (g_2..g_n) + sum (-1)^i (..g_i g_{i+1}..) + (-1)^n (g_1..g_{n-1})."""
    gid, tup, coef = batch
    n = tup.shape[1]
    if n <= 1:
        return _empty(0)
    parts = [(gid, tup[:, 1:], coef)]
    for i in range(1, n):
        s = 1 if i % 2 == 0 else -1
        a = np.delete(tup, i, axis=1)
        a[:, i - 1] = G.mul[tup[:, i - 1], tup[:, i]]
        parts.append((gid, a, s * coef))
    parts.append((gid, tup[:, :-1], (1 if n % 2 == 0 else -1) * coef))
    return _cat(parts, n - 1)


def upsilon_batch(G, batch, direction="fwd"):
    gid, tup, coef = batch
    n = tup.shape[1]
    out = tup.copy()
    if direction == "fwd":
        for i in range(n - 1):
            out[:, i] = G.mul[tup[:, i], G.inv[tup[:, i + 1]]]
    elif direction == "inv":
        for i in range(n - 2, -1, -1):
            out[:, i] = G.mul[tup[:, i], out[:, i + 1]]
    else:
        raise ValueError("direction must be 'fwd' or 'inv'")
    return gid, out, coef


def phi_exponents(n: int, t: int):
    """The index set of phi_n: k_1 >= ... >= k_n, steps in {0, 1}, k_n in [0, t).

    Returns (K, signs) with K an array of rho-exponents reduced mod t and sign
    (-1)^(k_1 - k_n).
    """
    ks = []
    signs = []
    for kn in range(t):
        for steps in itertools.product((0, 1), repeat=n - 1):
            k = [kn]
            for s in reversed(steps):
                k.append(k[-1] + s)
            k = k[::-1]
            ks.append([x % t for x in k])
            signs.append(-1 if (k[0] - k[-1]) % 2 else 1)
    return np.array(ks, dtype=np.int64).reshape(-1, n), np.array(signs, dtype=np.int64)


def _rho_powers(G, t):
    return np.stack([G.rho_pow(k) for k in range(t)])


def phi_batch(X: Quandle, batch, t: int | None = None):
    """phi_n(g_1..g_n) = sum_K sign(K) (rho^{k_1} g_1, ..., rho^{k_n} g_n)."""
    G = _group(X)
    if t is None:
        t = quandle_type(X)
    gid, tup, coef = batch
    n = tup.shape[1]
    K, S = phi_exponents(n, t)
    R = _rho_powers(G, t)
    m = len(S)
    N = len(coef)
    out = np.empty((N, m, n), dtype=np.int64)
    for j in range(n):
        out[:, :, j] = R[K[None, :, j], tup[:, j][:, None]]
    return (np.repeat(gid, m), out.reshape(N * m, n),
            (coef[:, None] * S[None, :]).reshape(-1))


def drop_identity_batch(G, batch, slots=None):
    """Normalization: remove terms with the identity in any of the given slots."""
    gid, tup, coef = batch
    if tup.shape[0] == 0:
        return batch
    cols = tup if slots is None else tup[:, slots]
    keep = ~np.any(cols == G.identity, axis=1) if cols.shape[1] else np.ones(len(coef), dtype=bool)
    return gid[keep], tup[keep], coef[keep]


def drop_rack_degenerate_batch(batch):
    gid, tup, coef = batch
    if tup.shape[1] < 2 or tup.shape[0] == 0:
        return batch
    keep = ~np.any(tup[:, 1:] == tup[:, :-1], axis=1)
    return gid[keep], tup[keep], coef[keep]


def canonicalize_batch(X: Quandle, batch, t: int | None = None):
    """Replace each tuple by the least member of its simultaneous rho-orbit."""
    G = _group(X)
    if t is None:
        t = quandle_type(X)
    gid, tup, coef = batch
    if tup.shape[0] == 0:
        return batch
    R = _rho_powers(G, t)
    base = G.order
    imgs = np.stack([R[k][tup] for k in range(t)])  # (t, N, n)
    codes = np.stack([tuple_codes(imgs[k], base) for k in range(t)])
    best = np.argmin(codes, axis=0)
    return gid, imgs[best, np.arange(tup.shape[0])], coef


# ---------------------------------------------------------------------------
# FormalChain wrappers

def _wrap(batch, degree):
    _, tup, coef = batch
    return FormalChain.from_arrays(degree, tup, coef)


def boundary_rack(X: Quandle, c: FormalChain) -> FormalChain:
    if c.degree < 1:
        raise DegreeMismatch("degree must be positive")
    if c.degree == 1:
        return FormalChain(0)
    return _wrap(rack_boundary_batch(X, c.arrays()), c.degree - 1)


def boundary_rack_group(X: Quandle, c: FormalChain) -> FormalChain:
    if c.degree < 1:
        raise DegreeMismatch("degree must be positive")
    if c.degree == 1:
        return FormalChain(0)
    return _wrap(rack_group_boundary_batch(X, c.arrays()), c.degree - 1)


def boundary_group(G, c: FormalChain, normalized=True) -> FormalChain:
    """Bar differential; ``G`` is a Quandle with group data or a GroupData."""
    G = G.group if isinstance(G, Quandle) else G
    if c.degree == 1:
        return FormalChain(0)
    b = group_boundary_batch(G, c.arrays())
    if normalized:
        b = drop_identity_batch(G, b)
    return _wrap(b, c.degree - 1)


def normalize_group(G, c: FormalChain) -> FormalChain:
    G = G.group if isinstance(G, Quandle) else G
    return _wrap(drop_identity_batch(G, c.arrays()), c.degree)


def upsilon(X: Quandle, c: FormalChain, direction="fwd") -> FormalChain:
    return _wrap(upsilon_batch(_group(X), c.arrays(), direction), c.degree)


def phi_map(X: Quandle, c: FormalChain) -> FormalChain:
    if c.degree > 4:
        raise DegreeMismatch("phi_n is provided for n <= 4")
    return _wrap(phi_batch(X, c.arrays()), c.degree)


def phi_coinvariant(X: Quandle, c: FormalChain) -> FormalChain:
    if c.degree > 4:
        raise DegreeMismatch("phi_n is provided for n <= 4")
    return _wrap(canonicalize_batch(X, phi_batch(X, c.arrays())), c.degree)


def canonicalize(X: Quandle, c: FormalChain) -> FormalChain:
    return _wrap(canonicalize_batch(X, c.arrays()), c.degree)


def reduce_p_batch(X: Quandle, batch):
    gid, tup, coef = batch
    if tup.shape[1] < 2:
        raise DegreeMismatch("reduce_p_map needs n >= 2")
    return canonicalize_batch(X, phi_batch(X, (gid, tup[:, :-1], coef)))


def reduce_p_map(X: Quandle, c: FormalChain) -> FormalChain:
    """Drop the last coordinate, then apply Phi_{n-1}."""
    if c.degree < 2:
        raise DegreeMismatch("reduce_p_map needs n >= 2")
    return _wrap(reduce_p_batch(X, c.arrays()), c.degree - 1)


# ---------------------------------------------------------------------------
# exhaustive checks

def all_tuples(size: int, n: int, start=0, stop=None):
    """Rows start..stop-1 of the lexicographic enumeration of range(size)^n."""
    total = size ** n
    stop = total if stop is None else min(stop, total)
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((len(idx), n), dtype=np.int64)
    for j in range(n - 1, -1, -1):
        out[:, j] = idx % size
        idx = idx // size
    return out


def _difference_vanishes(a, b, base):
    ga, ta, ca = a
    gb, tb, cb = b
    merged = collect((np.concatenate([ga, gb]), np.concatenate([ta, tb]),
                      np.concatenate([ca, -cb])), base)
    return len(merged[2]) == 0, merged


def _blocks(total, block):
    for s in range(0, total, block):
        yield s, min(total, s + block)


def check_chain_map(X: Quandle, n: int, normalized=True, block=20000):
    """Exhaustively compare d^gr phi_n with phi_{n-1} d^{R_G} on all of G^n.

    With ``normalized`` both sides are read in the normalized group complex
    (tuples containing the identity dropped).  Also checks that phi_n kills
    every tuple with the identity in a slot i <= n-1.  Returns a report dict.
    """
    G = _group(X)
    t = quandle_type(X)
    size = G.order
    total = size ** n
    bad = 0
    example = None
    for s, e in _blocks(total, block):
        tup = all_tuples(size, n, s, e)
        gid = np.arange(s, e, dtype=np.int64)
        batch = (gid, tup, np.ones(len(gid), dtype=np.int64))
        lhs = group_boundary_batch(G, phi_batch(X, batch, t))
        rhs = phi_batch(X, rack_group_boundary_batch(X, batch), t) if n > 1 else _empty(0)
        if normalized:
            lhs = drop_identity_batch(G, lhs)
            rhs = drop_identity_batch(G, rhs)
        ok, diff = _difference_vanishes(lhs, rhs, size)
        if not ok:
            failing = np.unique(diff[0])
            bad += len(failing)
            if example is None:
                example = all_tuples(size, n, int(failing[0]), int(failing[0]) + 1)[0].tolist()
        # degenerate generators
        deg = np.any(tup[:, : n - 1] == G.identity, axis=1) if n > 1 else np.zeros(len(gid), bool)
        if np.any(deg):
            img = phi_batch(X, (gid[deg], tup[deg], np.ones(int(deg.sum()), dtype=np.int64)), t)
            img = collect(drop_identity_batch(G, img) if normalized else img, size)
            if len(img[2]):
                bad += len(np.unique(img[0]))
                if example is None:
                    example = all_tuples(size, n, int(img[0][0]), int(img[0][0]) + 1)[0].tolist()
    return {"n": n, "generators": total, "failures": int(bad), "ok": bad == 0,
            "normalized": normalized, "example": example, "type": t}


def check_boundary_squared(X: Quandle, n: int, kind: str, block=20000):
    """d_{n-1} d_n = 0 on all generators of degree n; kind in rack|rack_group|group."""
    size = X.size if kind == "rack" else _group(X).order
    total = size ** n
    for s, e in _blocks(total, block):
        tup = all_tuples(size, n, s, e)
        batch = (np.arange(s, e, dtype=np.int64), tup, np.ones(e - s, dtype=np.int64))
        if kind == "rack":
            out = rack_boundary_batch(X, rack_boundary_batch(X, batch))
        elif kind == "rack_group":
            out = rack_group_boundary_batch(X, rack_group_boundary_batch(X, batch))
        elif kind == "group":
            G = _group(X)
            out = group_boundary_batch(G, group_boundary_batch(G, batch))
        else:
            raise ValueError(kind)
        if len(collect(out, size)[2]):
            return False
    return True


def check_upsilon_intertwines(X: Quandle, n: int, sign: int = -1, block=20000):
    """Check Upsilon d^R = sign * d^{R_G} Upsilon on all rack n-tuples."""
    G = _group(X)
    size = X.size
    total = size ** n
    for s, e in _blocks(total, block):
        tup = all_tuples(size, n, s, e)
        batch = (np.arange(s, e, dtype=np.int64), tup, np.ones(e - s, dtype=np.int64))
        lhs = upsilon_batch(G, rack_boundary_batch(X, batch))
        g, tt, c = rack_group_boundary_batch(X, upsilon_batch(G, batch))
        ok, _ = _difference_vanishes(lhs, (g, tt, sign * c), size)
        if not ok:
            return False
    return True


def check_reduce_p(X: Quandle, n: int, sign: int = 1, block=20000):
    """Exhaustive check that Phi_{n-1} P is a (degree -1) chain map:
    d^gr (Phi_{n-1} P) = sign * (Phi_{n-2} P) d^{R_G} in the coinvariant,
    normalized group complex; also that it kills quandle-degenerate tuples."""
    if n < 3:
        raise DegreeMismatch("the reduced map is checked from n = 3 on")
    G = _group(X)
    t = quandle_type(X)
    size = G.order
    total = size ** n
    for s, e in _blocks(total, block):
        tup = all_tuples(size, n, s, e)
        batch = (np.arange(s, e, dtype=np.int64), tup, np.ones(e - s, dtype=np.int64))
        lhs = canonicalize_batch(X, drop_identity_batch(G, group_boundary_batch(G, reduce_p_batch(X, batch))), t)
        g, tt, c = reduce_p_batch(X, rack_group_boundary_batch(X, batch))
        rhs = canonicalize_batch(X, drop_identity_batch(G, (g, tt, sign * c)), t)
        ok, _ = _difference_vanishes(lhs, rhs, size)
        if not ok:
            return False
        deg = np.any(tup[:, : n - 1] == G.identity, axis=1)
        if np.any(deg):
            img = reduce_p_batch(X, (batch[0][deg], tup[deg], batch[2][deg]))
            if len(collect(drop_identity_batch(G, img), size)[2]):
                return False
    return True


# ---------------------------------------------------------------------------
# homology

def _nondegenerate(size, n):
    tup = all_tuples(size, n)
    if n >= 2:
        tup = tup[~np.any(tup[:, 1:] == tup[:, :-1], axis=1)]
    return tup


def quandle_boundary_matrix(X: Quandle, n: int):
    """Integer matrix of d_n on the quandle complex (rows: n-tuples, cols: (n-1)-tuples)."""
    size = X.size
    rows = _nondegenerate(size, n)
    cols = _nondegenerate(size, n - 1) if n > 1 else np.zeros((0, 0), dtype=np.int64)
    M = np.zeros((len(rows), len(cols)), dtype=np.int64)
    if n <= 1 or len(rows) == 0:
        return M, rows, cols
    index = np.full(size ** (n - 1), -1, dtype=np.int64)
    index[tuple_codes(cols, size)] = np.arange(len(cols))
    gid, tup, coef = rack_boundary_batch(X, (np.arange(len(rows), dtype=np.int64), rows,
                                             np.ones(len(rows), dtype=np.int64)))
    gid, tup, coef = drop_rack_degenerate_batch((gid, tup, coef))
    np.add.at(M, (gid, index[tuple_codes(tup, size)]), coef)
    return M, rows, cols


def quandle_homology(X: Quandle, n: int, limit=3 ** 6):
    """H_n^Q(X; Z) as {"free_rank", "torsion"} from Smith normal forms."""
    if X.size ** n > limit and X.size ** (n + 1) > limit * X.size:
        raise TooLarge(f"|X|^n = {X.size ** n} exceeds the desk-scale limit")
    Mn, rows, _ = quandle_boundary_matrix(X, n)
    Mn1, _, _ = quandle_boundary_matrix(X, n + 1)
    dn = smith_diagonal(Mn) if Mn.size else []
    dn1 = smith_diagonal(Mn1) if Mn1.size else []
    free = len(rows) - len(dn) - len(dn1)
    torsion = [d for d in dn1 if d > 1]
    return {"degree": n, "free_rank": free, "torsion": torsion}


def format_homology(H) -> str:
    parts = (["Z"] if H["free_rank"] == 1 else [f"Z^{H['free_rank']}"] if H["free_rank"] else [])
    parts += [f"Z_{d}" for d in H["torsion"]]
    return " + ".join(parts) if parts else "0"


def quandle_cohomology_dim(X: Quandle, n: int, p: int) -> int:
    """dim over F_p of H^n_Q(X; F_p) = dim C_n - rank d_{n+1} - rank d_n."""
    Mn, rows, _ = quandle_boundary_matrix(X, n)
    Mn1, _, _ = quandle_boundary_matrix(X, n + 1)
    return len(rows) - rank_mod_p(Mn1, p) - (rank_mod_p(Mn, p) if Mn.size else 0)
