"""The associated group of a connected Alexander quandle (Clauwens model).

As(X) is modelled on Z x X x Coker(mu) with

    (n, a, k) * (m, b, v) = (n + m, w^m a + b, k + v + [w^m a (x) b])

where mu(x (x) y) = x (x) y - w y (x) x on the F_p-space X (x) X and [.] is the
projection to Coker(mu).  The grade-0 part G_X = X x Coker(mu) carries the
automorphism rho_0(b, k) = (w b, k) (conjugation by e_0) and the covering
p_X(b, k) = (1 - w) b.

Tensors x (x) y use the F_p-basis t^i (x) t^j at index i*h + j.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import rref_mod_p
from .quandle import Quandle, GroupData, QuandleError, is_connected


class NotAlexander(QuandleError):
    pass


class TooLarge(ValueError):
    pass


class CokerMu:
    """Row-reduced image of mu and the projection onto its pivot-free coordinates."""

    def __init__(self, X: Quandle):
        if X.kind != "alexander":
            raise NotAlexander("Coker(mu) is only built for Alexander quandles")
        if not is_connected(X):
            raise QuandleError("the Clauwens model needs a connected quandle")
        F = X.field
        self.X = X
        self.field = F
        self.p = p = F.p
        self.h = h = F.h
        self.omega = X.omega
        self.ambient_dim = h * h
        # T e_j as a digit vector
        basis = [p ** j for j in range(h)]
        Tcols = F.digits[F.mul(self.omega, np.array(basis))]  # (h, h): row j = coeffs of T e_j
        M = np.zeros((h * h, h * h), dtype=np.int64)
        for i in range(h):
            for j in range(h):
                row = np.zeros(h * h, dtype=np.int64)
                row[i * h + j] += 1
                for k in range(h):
                    row[k * h + i] -= Tcols[j, k]
                M[i * h + j] = row % p
        self.mu_matrix = M.T  # columns are images of basis tensors
        R, piv = rref_mod_p(M, p)
        self.image_basis = R
        self.pivots = list(piv)
        self.free = [c for c in range(h * h) if c not in piv]
        self.dim = len(self.free)
        self.size = p ** self.dim
        self.kpowers = np.array([p ** i for i in range(self.dim)], dtype=np.int64)
        self._bracket = None

    def kdigits(self, k):
        """Coordinate vectors of coker codes."""
        k = np.asarray(k, dtype=np.int64)
        return (k[..., None] // self.kpowers) % self.p

    def tensor(self, a, b):
        """Digit vectors of a (x) b for code arrays a, b (broadcast)."""
        F = self.field
        da = F.digits[np.asarray(a, dtype=np.int64)]
        db = F.digits[np.asarray(b, dtype=np.int64)]
        t = (da[..., :, None] * db[..., None, :]) % self.p
        return t.reshape(t.shape[:-2] + (self.h * self.h,))

    def reduce(self, v):
        """Reduce tensor vectors modulo the image; result is zero on pivot slots."""
        v = np.array(v, dtype=np.int64) % self.p
        for row, pc in zip(self.image_basis, self.pivots):
            c = v[..., pc].copy()
            v = (v - c[..., None] * row) % self.p
        return v

    def project(self, v):
        """Coker coordinates (digit vectors of length dim)."""
        return self.reduce(v)[..., self.free]

    def lift(self, kd):
        """Canonical lift of coker digit vectors to X (x) X (zero on pivots)."""
        kd = np.asarray(kd, dtype=np.int64)
        out = np.zeros(kd.shape[:-1] + (self.h * self.h,), dtype=np.int64)
        out[..., self.free] = kd
        return out

    def kcode(self, kd):
        return (np.asarray(kd, dtype=np.int64) * self.kpowers).sum(axis=-1)

    def kadd(self, k1, k2):
        return self.kcode((self.kdigits(k1) + self.kdigits(k2)) % self.p)

    def kneg(self, k):
        return self.kcode((-self.kdigits(k)) % self.p)

    @property
    def bracket(self):
        """bracket[a, b] = code of [a (x) b] in Coker(mu)."""
        if self._bracket is None:
            q = self.field.q
            codes = np.arange(q)
            tv = self.tensor(codes[:, None], codes[None, :])
            self._bracket = self.kcode(self.project(tv))
        return self._bracket

    def format_kappa(self, k: int) -> str:
        return ",".join(str(int(c)) for c in self.kdigits(int(k)))


def coker_mu_build(X: Quandle) -> CokerMu:
    return CokerMu(X)


@dataclass(frozen=True)
class AsXElem:
    """(n, a, kappa) with a a field code and kappa a coker code."""

    n: int
    a: int
    kappa: int


class ClauwensGroup:
    """As(X), its kernel G_X, rho_0 and the covering map, for Alexander X."""

    def __init__(self, X: Quandle):
        self.X = X
        self.coker = CokerMu(X)
        self.field = X.field
        self.omega = X.omega
        self.q = self.field.q
        self.order = self.q * self.coker.size

    # As(X)

    def e(self, x: int) -> AsXElem:
        return AsXElem(1, int(x), 0)

    def identity(self) -> AsXElem:
        return AsXElem(0, 0, 0)

    def _tpow(self, m: int, a: int) -> int:
        F = self.field
        return int(F.mul(F.pow(self.omega, m % (F.q - 1)), a))

    def as_multiply(self, g: AsXElem, h: AsXElem) -> AsXElem:
        F = self.field
        C = self.coker
        ta = self._tpow(h.n, g.a)
        a = int(F.add(ta, h.a))
        k = int(C.kadd(C.kadd(g.kappa, h.kappa), C.bracket[ta, h.a]))
        return AsXElem(g.n + h.n, a, k)

    def as_inverse(self, g: AsXElem) -> AsXElem:
        F = self.field
        C = self.coker
        b = self._tpow(-g.n, g.a)
        k = int(C.kadd(C.kneg(g.kappa), C.bracket[b, b]))
        return AsXElem(-g.n, int(F.neg[b]), k)

    def act(self, x: int, g: AsXElem) -> int:
        """Right action x . (n, b, k) = w^n x + (1 - w) b."""
        F = self.field
        return int(F.add(self._tpow(g.n, x), F.mul(F.sub(1, self.omega), g.a)))

    # G_X with elements encoded as a + q * kappa

    def encode(self, a, k):
        return np.asarray(a, dtype=np.int64) + self.q * np.asarray(k, dtype=np.int64)

    def decode(self, g):
        g = np.asarray(g, dtype=np.int64)
        return g % self.q, g // self.q

    def gx_mul(self, g, h):
        F = self.field
        C = self.coker
        a1, k1 = self.decode(g)
        a2, k2 = self.decode(h)
        a = F.add(a1, a2)
        k = C.kadd(C.kadd(k1, k2), C.bracket[a1, a2])
        return self.encode(a, k)

    def gx_inv(self, g):
        F = self.field
        C = self.coker
        a, k = self.decode(g)
        return self.encode(F.neg[a], C.kadd(C.kneg(k), C.bracket[a, a]))

    def rho_conjugate(self, g):
        a, k = self.decode(g)
        return self.encode(self.field.mul(self.omega, a), k)

    def covering_project(self, g):
        a, _ = self.decode(g)
        F = self.field
        return F.mul(F.sub(1, self.omega), a)

    def format_gx(self, g: int) -> str:
        a, k = self.decode(int(g))
        return f"{self.field.format_elem(int(a))}|{self.coker.format_kappa(int(k))}"

    def parse_gx(self, s: str) -> int:
        ap, _, kp = s.partition("|")
        a = self.field.parse_elem(ap)
        kd = [int(c) % self.coker.p for c in kp.split(",") if c.strip()]
        if len(kd) != self.coker.dim:
            raise ValueError("wrong number of kappa coordinates")
        return int(self.encode(a, self.coker.kcode(np.array(kd, dtype=np.int64))))

    def tables(self):
        """Multiplication table, inverse array and rho_0 on G_X."""
        n = self.order
        codes = np.arange(n)
        mul = self.gx_mul(codes[:, None], codes[None, :])
        return mul, self.gx_inv(codes), self.rho_conjugate(codes)


def extended_quandle_build(X: Quandle) -> Quandle:
    """The group quandle (G_X, rho_0) covering X."""
    G = ClauwensGroup(X)
    if G.order > 2 ** 12:
        raise TooLarge(f"|G_X| = {G.order} exceeds 2^12")
    mul, inv, rho = G.tables()
    n = G.order
    ghinv = mul[:, inv]
    op = mul[rho[ghinv], np.arange(n)[None, :]]
    Xt = Quandle(op, GroupData(mul=mul, inv=inv, identity=0, rho=rho),
                 kind="groupaut", labels=[G.format_gx(g) for g in range(n)],
                 check=n <= 256)
    Xt.meta["spec"] = "extended:" + X.spec_string()
    Xt.clauwens = G
    Xt.base = X
    return Xt
