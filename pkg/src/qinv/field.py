"""Finite fields F_q, q = p^h, with table-driven arithmetic.

Elements are stored as plain ints 0..q-1: the integer sum(c_i * p**i) encodes
the polynomial sum(c_i * t**i) in F_p[t]/(modulus).  Integer order on codes is
the canonical total order on elements (highest coefficient compared first).
The integer constant c embeds as code c mod p.

Most heavy lifting works on numpy arrays of codes; :class:`FieldElem` is a thin
hashable wrapper used at API boundaries.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np


class FieldError(ValueError):
    pass


class NotPrime(FieldError):
    pass


class Reducible(FieldError):
    pass


class DegreeMismatch(FieldError):
    pass


class ZeroElement(FieldError):
    pass


class MultipleSolutions(FieldError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


# --- plain polynomial helpers over F_p (little-endian coefficient lists) ---

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, m, p):
    """Remainder of a modulo monic m over F_p."""
    a = [c % p for c in a]
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i]
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    return _trim(a[:dm]) if dm > 0 else []


def _poly_mulmod(a, b, m, p):
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    return _poly_mod(prod, m, p)


def _monic_polys(p, deg):
    for low in itertools.product(range(p), repeat=deg):
        yield list(low) + [1]


def is_irreducible(modulus, p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    m = [c % p for c in modulus]
    deg = len(m) - 1
    if deg < 1 or m[-1] != 1:
        return False
    for d in range(1, deg // 2 + 1):
        for f in _monic_polys(p, d):
            if not _poly_mod(m, f, p):
                return False
    return True


@lru_cache(maxsize=None)
def canonical_modulus(p: int, h: int) -> tuple:
    """Least monic irreducible of degree h, comparing the high coefficients first."""
    best = None
    for code in range(p ** h):
        low = [(code // p ** i) % p for i in range(h)]
        if is_irreducible(low + [1], p):
            best = tuple(low + [1])
            break
    if best is None:  # pragma: no cover - irreducibles always exist
        raise Reducible(f"no irreducible of degree {h} over F_{p}")
    return best


class FieldSpec:
    """The field F_p[t]/(modulus).  Immutable; build with :func:`create_field`."""

    def __init__(self, p: int, h: int, modulus):
        self.p = p
        self.h = h
        self.q = p ** h
        self.modulus = tuple(int(c) % p for c in modulus)
        q = self.q
        self.powers = np.array([p ** i for i in range(h)], dtype=np.int64)
        # digits[x, i] = i-th coefficient of x
        codes = np.arange(q, dtype=np.int64)
        self.digits = (codes[:, None] // self.powers[None, :]) % p
        self.neg = self._from_digits((-self.digits) % p)
        self.add_table = None
        if q <= 2048:
            s = (self.digits[:, None, :] + self.digits[None, :, :]) % p
            self.add_table = (s * self.powers).sum(axis=2).astype(np.int64)
        self._build_log_exp()

    # construction helpers

    def _from_digits(self, d):
        return (np.asarray(d, dtype=np.int64) * self.powers).sum(axis=-1)

    def _poly(self, code):
        return _trim([(code // self.p ** i) % self.p for i in range(self.h)])

    def _code(self, poly):
        poly = list(poly) + [0] * (self.h - len(poly))
        return sum((c % self.p) * self.p ** i for i, c in enumerate(poly[: self.h]))

    def _build_log_exp(self):
        q, p = self.q, self.p
        n = q - 1
        exp = np.zeros(n, dtype=np.int64)
        for g in range(1, q):
            gp = self._poly(g)
            cur = [1]
            ok = True
            for k in range(n):
                c = self._code(cur)
                if k > 0 and c == 1:
                    ok = False
                    break
                exp[k] = c
                cur = _poly_mulmod(cur, gp, list(self.modulus), p)
            if ok and self._code(cur) == 1:
                self.primitive = g
                break
        else:  # pragma: no cover
            raise Reducible("multiplicative group is not cyclic; modulus reducible")
        log = np.full(q, -1, dtype=np.int64)
        log[exp] = np.arange(n)
        self.exp = exp
        self.log = log
        inv = np.zeros(q, dtype=np.int64)
        inv[1:] = exp[(-log[1:]) % n]
        self.inv_table = inv

    # vectorized arithmetic on codes

    def add(self, a, b):
        if self.add_table is not None:
            return self.add_table[a, b]
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        s = (self.digits[a] + self.digits[b]) % self.p
        return (s * self.powers).sum(axis=-1)

    def sub(self, a, b):
        return self.add(a, self.neg[b])

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        la = self.log[a]
        lb = self.log[b]
        r = self.exp[(la + lb) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, r)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroElement("0 has no inverse")
        return self.inv_table[a]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        """a**e for integer e >= 0 (0**0 = 1); negative e needs a != 0."""
        a = np.asarray(a, dtype=np.int64)
        e = np.asarray(e, dtype=np.int64)
        la = self.log[a]
        r = self.exp[(la * e) % (self.q - 1)]
        if np.any((a == 0) & (e < 0)):
            raise ZeroElement("0 has no inverse")
        return np.where(a == 0, np.where(e == 0, 1, 0), r)

    def scal(self, n: int, a):
        """Integer multiple n*a."""
        d = (self.digits[np.asarray(a, dtype=np.int64)] * (n % self.p)) % self.p
        return (d * self.powers).sum(axis=-1)

    def sum(self, arr, axis=-1):
        """Field sum along an axis (digit-wise mod p)."""
        arr = np.asarray(arr, dtype=np.int64)
        d = self.digits[arr].sum(axis=axis % arr.ndim) % self.p
        return (d * self.powers).sum(axis=-1)

    def const(self, c: int) -> int:
        return int(c) % self.p

    # scalar conveniences

    def elem(self, x) -> "FieldElem":
        return FieldElem(self, self.code_of(x))

    def code_of(self, x) -> int:
        """Accept a FieldElem, an int (embedded constant) or a coefficient sequence."""
        if isinstance(x, FieldElem):
            if x.field != self:
                raise FieldError("element from another field")
            return x.code
        if isinstance(x, (int, np.integer)):
            return int(x) % self.p
        return self._code([int(c) for c in x])

    def from_code(self, code: int) -> "FieldElem":
        return FieldElem(self, int(code))

    def elements(self):
        return [FieldElem(self, c) for c in range(self.q)]

    def coeffs(self, code: int) -> tuple:
        return tuple(int(c) for c in self.digits[int(code)])

    def format_elem(self, code: int) -> str:
        return ",".join(str(c) for c in self.coeffs(code))

    def parse_elem(self, s: str) -> int:
        parts = [int(x) for x in s.strip().split(",") if x.strip() != ""]
        if len(parts) > self.h:
            raise DegreeMismatch(f"element {s!r} has more than {self.h} coefficients")
        return self._code(parts)

    def order_of(self, code: int) -> int:
        if code == 0:
            raise ZeroElement("0 has no multiplicative order")
        n = self.q - 1
        return n // math.gcd(int(self.log[code]), n)

    def spec_string(self) -> str:
        return f"{self.p}^{self.h}/" + ",".join(str(c) for c in self.modulus)

    def key(self):
        return (self.p, self.h, self.modulus)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"FieldSpec({self.spec_string()})"


@lru_cache(maxsize=None)
def _cached_field(p, h, modulus):
    return FieldSpec(p, h, modulus)


def create_field(p: int, h: int = 1, modulus=None) -> FieldSpec:
    """Build F_{p^h}.  Without a modulus the canonical irreducible is used."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if h < 1:
        raise DegreeMismatch("degree must be positive")
    if p ** h > 2 ** 16:
        raise FieldError("fields with q > 2^16 are not supported")
    if modulus is None:
        modulus = canonical_modulus(p, h)
    else:
        modulus = tuple(int(c) % p for c in modulus)
        if len(_trim(modulus)) - 1 != h:
            raise DegreeMismatch(f"modulus degree differs from {h}")
        modulus = tuple(_trim(modulus))
        if modulus[-1] != 1:
            raise DegreeMismatch("modulus must be monic")
        if not is_irreducible(modulus, p):
            raise Reducible(f"modulus {modulus} factors over F_{p}")
    return _cached_field(p, h, tuple(modulus))


def parse_field(s: str) -> FieldSpec:
    """Parse "p^h" or "p^h/c0,c1,...,ch" (coefficients little-endian)."""
    s = s.strip()
    head, _, mod = s.partition("/")
    if "^" in head:
        p, h = head.split("^")
    else:
        p, h = head, "1"
    modulus = [int(c) for c in mod.split(",")] if mod else None
    return create_field(int(p), int(h), modulus)


class FieldElem:
    """Hashable field element with arithmetic operators."""

    __slots__ = ("field", "code")

    def __init__(self, field: FieldSpec, code: int):
        self.field = field
        self.code = int(code)

    def _other(self, o):
        return self.field.code_of(o)

    def __add__(self, o):
        return FieldElem(self.field, self.field.add(self.code, self._other(o)))

    __radd__ = __add__

    def __sub__(self, o):
        return FieldElem(self.field, self.field.sub(self.code, self._other(o)))

    def __rsub__(self, o):
        return FieldElem(self.field, self.field.sub(self._other(o), self.code))

    def __neg__(self):
        return FieldElem(self.field, self.field.neg[self.code])

    def __mul__(self, o):
        return FieldElem(self.field, self.field.mul(self.code, self._other(o)))

    __rmul__ = __mul__

    def __truediv__(self, o):
        return FieldElem(self.field, self.field.div(self.code, self._other(o)))

    def __rtruediv__(self, o):
        return FieldElem(self.field, self.field.div(self._other(o), self.code))

    def __pow__(self, e: int):
        return FieldElem(self.field, self.field.pow(self.code, int(e)))

    def __eq__(self, o):
        if isinstance(o, FieldElem):
            return self.field == o.field and self.code == o.code
        if isinstance(o, (int, np.integer)):
            return self.code == self.field.code_of(o)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.key(), self.code))

    def __lt__(self, o):
        return self.code < o.code

    def __bool__(self):
        return self.code != 0

    def __int__(self):
        return self.code

    @property
    def coeffs(self):
        return self.field.coeffs(self.code)

    def __str__(self):
        return self.field.format_elem(self.code)

    def __repr__(self):
        return f"FieldElem({self}; {self.field.spec_string()})"


def mul_order(x: FieldElem) -> int:
    return x.field.order_of(x.code)


def elements_of_order(field: FieldSpec, n: int):
    """All codes of multiplicative order exactly n, ascending."""
    return [c for c in range(1, field.q) if field.order_of(c) == n]


def find_zeta(omega: FieldElem, m: int, n: int):
    """The primitive n-th root of unity zeta with zeta^m = omega^m, or None."""
    if math.gcd(m, n) != 1:
        raise ValueError("find_zeta needs gcd(m, n) = 1")
    if omega.code == 0:
        raise ZeroElement("omega must be nonzero")
    F = omega.field
    target = F.pow(omega.code, m)
    hits = []
    for x in range(1, F.q):
        if F.order_of(x) == n and int(F.pow(x, m)) == int(target):
            hits.append(x)
    if len(hits) > 1:
        raise MultipleSolutions(f"{len(hits)} candidates for zeta")
    return FieldElem(F, hits[0]) if hits else None
