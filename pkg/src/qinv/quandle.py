"""Finite quandles with precomputed operation tables.

Two variants share one class:

* Alexander quandles ``(F_q, omega)`` with ``x < y = omega*x + (1-omega)*y``;
* group quandles ``(G, rho)`` with ``g < h = rho(g h^-1) h``.

Every quandle also carries its underlying group data (multiplication table,
inverses, identity, automorphism rho).  For an Alexander quandle the group is
the additive group of F_q and rho is multiplication by omega, so the group-side
chain maps work uniformly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .field import FieldElem, FieldSpec, parse_field, elements_of_order


class QuandleError(ValueError):
    pass


@dataclass(frozen=True)
class GroupData:
    """A finite group on 0..n-1 together with an automorphism rho."""

    mul: np.ndarray
    inv: np.ndarray
    identity: int
    rho: np.ndarray

    @property
    def order(self) -> int:
        return len(self.inv)

    def rho_pow(self, k: int) -> np.ndarray:
        perm = np.arange(self.order)
        for _ in range(k):
            perm = self.rho[perm]
        return perm


class Quandle:
    """A finite quandle on 0..size-1.

    ``op[x, y]`` is x < y and ``opinv[x, y]`` the unique w with w < y = x.
    """

    def __init__(self, op, group: GroupData | None = None, *, kind="groupaut",
                 field: FieldSpec | None = None, omega: int | None = None,
                 labels=None, check=True):
        self.op = np.asarray(op, dtype=np.int64)
        n = self.op.shape[0]
        self.size = n
        self.kind = kind
        self.field = field
        self.omega = omega
        self.group = group
        self.labels = labels
        self.meta = {}
        if check:
            self._check_axioms()
        opinv = np.empty_like(self.op)
        cols = np.arange(n)
        for y in range(n):
            opinv[self.op[:, y], y] = cols
        self.opinv = opinv

    def _check_axioms(self):
        n = self.size
        op = self.op
        if op.shape != (n, n) or op.min() < 0 or op.max() >= n:
            raise QuandleError("operation table has the wrong shape or range")
        if np.any(op[np.arange(n), np.arange(n)] != np.arange(n)):
            raise QuandleError("idempotency fails")
        srt = np.sort(op, axis=0)
        if np.any(srt != np.arange(n)[:, None]):
            raise QuandleError("a right translation is not a bijection")
        if n <= 256:
            # (x<y)<z == (x<z)<(y<z), one z at a time to bound memory
            for z in range(n):
                lhs = op[op, z]
                col = op[:, z]
                rhs = op[col[:, None], col[None, :]]
                if np.any(lhs != rhs):
                    raise QuandleError("self-distributivity fails")

    # basic operations

    def qop(self, x, y):
        return self.op[x, y]

    def qop_inv(self, x, y):
        return self.opinv[x, y]

    def elem_label(self, x: int) -> str:
        if self.kind == "alexander":
            return self.field.format_elem(x)
        if self.labels is not None:
            return str(self.labels[x])
        return str(int(x))

    def spec_string(self) -> str:
        return self.meta.get("spec", f"{self.kind}:{self.size}")

    def __repr__(self):
        return f"Quandle({self.spec_string()})"


def qop(X: Quandle, x, y):
    return X.qop(x, y)


def qop_inv(X: Quandle, x, y):
    return X.qop_inv(x, y)


def _perm_order(perm) -> int:
    perm = np.asarray(perm)
    seen = np.zeros(len(perm), dtype=bool)
    order = 1
    for s in range(len(perm)):
        if seen[s]:
            continue
        length = 0
        j = s
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        order = order * length // math.gcd(order, length)
    return order


def quandle_type(X: Quandle) -> int:
    """Least N such that N-fold right translation by any b is the identity."""
    t = 1
    for b in range(X.size):
        o = _perm_order(X.op[:, b])
        t = t * o // math.gcd(t, o)
    return t


def is_connected(X: Quandle) -> bool:
    """Orbit closure of element 0 under all right translations."""
    reached = np.zeros(X.size, dtype=bool)
    reached[0] = True
    frontier = np.array([0])
    while frontier.size:
        nxt = np.unique(X.op[frontier, :].ravel())
        nxt = nxt[~reached[nxt]]
        reached[nxt] = True
        frontier = nxt
    return bool(reached.all())


def alexander_quandle(field: FieldSpec, omega) -> Quandle:
    w = field.code_of(omega)
    if w == 0 or w == 1:
        raise QuandleError("Alexander quandles need omega != 0, 1")
    q = field.q
    codes = np.arange(q)
    one_minus = int(field.sub(1, w))
    wx = field.mul(w, codes)
    ty = field.mul(one_minus, codes)
    op = field.add(wx[:, None], ty[None, :])
    add = field.add(codes[:, None], codes[None, :])
    group = GroupData(mul=np.asarray(add), inv=field.neg.copy(), identity=0,
                      rho=np.asarray(wx))
    X = Quandle(op, group, kind="alexander", field=field, omega=w, check=q <= 256)
    X.meta["spec"] = f"alexander:{field.spec_string()}:omega={field.format_elem(w)}"
    return X


def check_group(mul, identity=None):
    """Validate a multiplication table; return (identity, inverse array)."""
    mul = np.asarray(mul, dtype=np.int64)
    n = mul.shape[0]
    if mul.shape != (n, n) or mul.min() < 0 or mul.max() >= n:
        raise QuandleError("bad multiplication table shape")
    ids = [e for e in range(n) if np.all(mul[e] == np.arange(n)) and np.all(mul[:, e] == np.arange(n))]
    if not ids:
        raise QuandleError("no identity element")
    e = ids[0]
    if identity is not None and identity != e:
        raise QuandleError("declared identity is not the identity")
    inv = np.argmax(mul == e, axis=1)
    if np.any(mul[np.arange(n), inv] != e):
        raise QuandleError("missing inverses")
    if n <= 256:
        for a in range(n):
            if np.any(mul[mul[a]][:, :] != mul[a][mul]):
                raise QuandleError("multiplication is not associative")
    return e, inv


def group_quandle(mul, rho, labels=None, identity=None) -> Quandle:
    """The quandle g < h = rho(g h^-1) h on a group with automorphism rho."""
    mul = np.asarray(mul, dtype=np.int64)
    rho = np.asarray(rho, dtype=np.int64)
    e, inv = check_group(mul, identity)
    n = mul.shape[0]
    if sorted(rho.tolist()) != list(range(n)):
        raise QuandleError("rho is not a permutation")
    if np.any(rho[mul] != mul[rho[:, None], rho[None, :]]):
        raise QuandleError("rho is not a group automorphism")
    ghinv = mul[:, inv]
    op = mul[rho[ghinv], np.arange(n)[None, :]]
    group = GroupData(mul=mul, inv=inv, identity=int(e), rho=rho)
    return Quandle(op, group, kind="groupaut", labels=labels, check=True)


def _parse_omega(field: FieldSpec, s: str) -> FieldElem:
    s = s.strip()
    if s.startswith("ord"):
        n = int(s[3:].lstrip(":"))
        cands = elements_of_order(field, n)
        if not cands:
            raise QuandleError(f"F_{field.q} has no element of order {n}")
        return field.from_code(cands[0])
    if s == "gen":
        return field.from_code(field.primitive)
    return field.from_code(field.parse_elem(s))


def parse_quandle(s: str) -> Quandle:
    """Parse a quandle spec string.

    ``alexander:3^2/1,0,1:omega=2,0`` (omega may also be ``-1``, ``gen`` or
    ``ord5``), ``groupaut:@file.json`` and ``extended:<alexander spec>``.
    """
    s = s.strip()
    kind, _, rest = s.partition(":")
    if kind == "alexander":
        fpart, _, opart = rest.partition(":")
        if not opart.startswith("omega="):
            raise QuandleError("expected omega=... in alexander spec")
        F = parse_field(fpart)
        return alexander_quandle(F, _parse_omega(F, opart[len("omega="):]))
    if kind == "groupaut":
        if rest.startswith("@"):
            with open(rest[1:]) as fh:
                data = json.load(fh)
        else:
            data = json.loads(rest)
        X = group_quandle(data["mul"], data["rho"], labels=data.get("elements"))
        X.meta["spec"] = s
        return X
    if kind == "extended":
        from .group import extended_quandle_build
        return extended_quandle_build(parse_quandle(rest))
    raise QuandleError(f"unknown quandle kind {kind!r}")
