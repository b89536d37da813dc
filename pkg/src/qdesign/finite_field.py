"""Arithmetic in GF(p^k).

Elements are plain integers ``0 .. q-1``.  The base-p digits of an element
are the coefficients of its polynomial representative, constant term in the
least significant digit, so in GF(4) = GF(2)[x]/(x^2+x+1) the integer 2 is
``x`` and 3 is ``x + 1``.  :class:`FieldElement` wraps an integer together
with its field for operator-style arithmetic; the :class:`FiniteField`
methods work directly on integers (and on integer arrays when the q <= 4096
lookup tables are present).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import QDesignError

MAX_ORDER = 2**16
TABLE_ORDER = 4096


class NotPrime(QDesignError):
    pass


class NotPrimePower(QDesignError):
    pass


class OrderTooLarge(QDesignError):
    pass


class FieldMismatch(QDesignError):
    pass


class DivisionByZero(QDesignError, ZeroDivisionError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, k)`` with ``q == p**k``, or raise :class:`NotPrimePower`."""
    if q < 2:
        raise NotPrimePower(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    k, r = 0, q
    while r % p == 0:
        r //= p
        k += 1
    if r != 1:
        raise NotPrimePower(f"{q} is not a prime power")
    return p, k


# Polynomials over GF(p) are coefficient lists, constant term first.

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm:
        shift = len(a) - 1 - dm
        factor = a[-1] * inv_lead % p
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - factor * c) % p
        _trim(a)
    return a


def _is_irreducible(m: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg(m)//2."""
    deg = len(m) - 1
    for d in range(1, deg // 2 + 1):
        for low in product(range(p), repeat=d):
            if not _poly_mod(list(m), list(low) + [1], p):
                return False
    return True


def smallest_irreducible(p: int, k: int) -> list[int]:
    """Smallest monic irreducible of degree k over GF(p).

    Candidates are ordered by the integer whose base-p digits are the
    non-leading coefficients (constant term least significant).
    """
    if k == 1:
        return [0, 1]
    for code in range(p**k):
        low = [(code // p**i) % p for i in range(k)]
        if low[0] == 0:
            continue
        m = low + [1]
        if _is_irreducible(m, p):
            return m
    raise AssertionError("an irreducible polynomial of every degree exists")


class FiniteField:
    """The field GF(p^k), immutable after construction."""

    def __init__(self, p: int, k: int = 1, max_order: int = MAX_ORDER):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if k < 1:
            raise QDesignError(f"extension degree must be >= 1, got {k}")
        if p**k > max_order:
            raise OrderTooLarge(f"p^k = {p**k} exceeds the cap {max_order}")
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = tuple(smallest_irreducible(p, k))
        self._powers = [p**i for i in range(k)]
        self.add_table = self.mul_table = self.inv_table = None
        self.trace_table = None
        if self.q <= TABLE_ORDER:
            self._build_tables()

    @classmethod
    def of_order(cls, q: int) -> "FiniteField":
        p, k = prime_power(q)
        return cls(p, k)

    def __repr__(self) -> str:
        return f"FiniteField(p={self.p}, k={self.k})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteField)
            and (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.modulus))

    def __len__(self) -> int:
        return self.q

    # -- encoding -------------------------------------------------------
    def digits(self, a: int) -> list[int]:
        return [(a // w) % self.p for w in self._powers]

    def encode(self, coeffs) -> int:
        coeffs = list(coeffs) + [0] * (self.k - len(coeffs))
        return sum((c % self.p) * w for c, w in zip(coeffs, self._powers))

    def _check(self, a):
        if not 0 <= a < self.q:
            raise QDesignError(f"{a} is not an element of GF({self.q})")

    # -- slow-path polynomial arithmetic ---------------------------------
    def _add_slow(self, a: int, b: int) -> int:
        return self.encode([x + y for x, y in zip(self.digits(a), self.digits(b))])

    def _neg_slow(self, a: int) -> int:
        return self.encode([-x for x in self.digits(a)])

    def _mul_slow(self, a: int, b: int) -> int:
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.k - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] += x * y
        return self.encode(_poly_mod(prod, list(self.modulus), self.p))

    def _pow_slow(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self._mul_slow(result, base)
            base = self._mul_slow(base, base)
            e >>= 1
        return result

    def _trace_slow(self, a: int) -> int:
        total, x = 0, a
        for _ in range(self.k):
            total = self._add_slow(total, x)
            x = self._pow_slow(x, self.p)
        return total

    def _build_tables(self):
        q, p = self.q, self.p
        elems = np.arange(q, dtype=np.int32)
        add = np.zeros((q, q), dtype=np.int32)
        neg = np.zeros(q, dtype=np.int32)
        for w in self._powers:
            d = (elems // w) % p
            add += ((d[:, None] + d[None, :]) % p) * w
            neg += ((-d) % p) * w
        self.add_table, self.neg_table = add, neg
        # Multiplication via discrete logs of a primitive element.
        prim = self._primitive_element()
        exp = np.zeros(2 * (q - 1), dtype=np.int32)
        log = np.zeros(q, dtype=np.int32)
        x = 1
        for i in range(q - 1):
            exp[i] = exp[i + q - 1] = x
            log[x] = i
            x = self._mul_slow(x, prim)
        mul = np.zeros((q, q), dtype=np.int32)
        mul[1:, 1:] = exp[log[1:, None] + log[None, 1:]]
        self.mul_table = mul
        inv = np.zeros(q, dtype=np.int32)
        inv[1:] = exp[(q - 1 - log[1:]) % (q - 1)]
        self.inv_table = inv
        # Frobenius orbit sums, vectorized over all elements.
        total = np.zeros(q, dtype=np.int32)
        frob = elems.copy()
        for _ in range(self.k):
            total = add[total, frob]
            power = np.ones(q, dtype=np.int32)
            for _ in range(p):
                power = mul[power, frob]
            frob = power
        self.trace_table = total

    def _primitive_element(self) -> int:
        n = self.q - 1
        factors = {d for d in range(2, n + 1) if n % d == 0 and is_prime(d)}
        for g in range(1, self.q):
            if all(self._pow_slow(g, n // f) != 1 for f in factors):
                return g
        raise AssertionError("multiplicative group is cyclic")

    # -- public integer-level arithmetic --------------------------------
    def add(self, a, b):
        if self.add_table is not None:
            r = self.add_table[a, b]
            return int(r) if np.ndim(r) == 0 else r
        return self._add_slow(a, b)

    def neg(self, a):
        if self.add_table is not None:
            r = self.neg_table[a]
            return int(r) if np.ndim(r) == 0 else r
        return self._neg_slow(a)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.mul_table is not None:
            r = self.mul_table[a, b]
            return int(r) if np.ndim(r) == 0 else r
        return self._mul_slow(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero(f"0 has no inverse in GF({self.q})")
        if self.inv_table is not None:
            return int(self.inv_table[a])
        return self._pow_slow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self._pow_slow(self.inv(a), -e)
        return self._pow_slow(a, e)

    def trace(self, a):
        """Absolute trace ``a + a^p + ... + a^(p^(k-1))``, an element of GF(p)."""
        if self.trace_table is None:
            if np.ndim(a) == 0:
                return self._trace_slow(int(a))
            return np.vectorize(self._trace_slow, otypes=[np.int64])(a)
        r = self.trace_table[a]
        return int(r) if np.ndim(r) == 0 else r

    def element(self, value: int) -> "FieldElement":
        self._check(value)
        return FieldElement(value, self)

    def elements(self) -> list["FieldElement"]:
        return [FieldElement(a, self) for a in range(self.q)]

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "modulus": list(self.modulus)}


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: FiniteField

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
            return other.value
        if isinstance(other, int):
            return self.field.encode([other])
        raise TypeError(f"cannot combine a field element with {type(other).__name__}")

    def _wrap(self, v: int) -> "FieldElement":
        return FieldElement(int(v), self.field)

    def __add__(self, other):
        return self._wrap(self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return self._wrap(self.field.sub(self._other(other), self.value))

    def __mul__(self, other):
        return self._wrap(self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(self.field.div(self.value, self._other(other)))

    def __rtruediv__(self, other):
        return self._wrap(self.field.div(self._other(other), self.value))

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def __pow__(self, e: int):
        return self._wrap(self.field.pow(self.value, e))

    def inverse(self) -> "FieldElement":
        return self._wrap(self.field.inv(self.value))

    def trace(self) -> "FieldElement":
        return self._wrap(self.field.trace(self.value))

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"GF({self.field.q})({self.value})"


def field_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    ops = {"add": a.__add__, "sub": a.__sub__, "mul": a.__mul__, "div": a.__truediv__}
    if op not in ops:
        raise QDesignError(f"unknown operation {op!r}")
    if a.field != b.field:
        raise FieldMismatch(f"{a.field!r} vs {b.field!r}")
    return ops[op](b)


def absolute_trace(a: FieldElement) -> FieldElement:
    return a.trace()
