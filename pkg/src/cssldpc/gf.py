"""Exact arithmetic in small finite fields F_q, q = p^e.

Elements are canonical integers in [0, q): the base-p digit vector of the
integer, least significant digit first, is read as the coefficient vector of
a polynomial in the quotient ring F_p[x]/(modulus).  For e = 1 this reduces
to plain integers mod p.  Addition, multiplication and inverses are table
lookups; the tables are built once at field construction.

The module also provides multiplicative subgroups M <= F^x of a given order
and the quotient map onto F^x / M, which drive the base-matrix certificates.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

_TABLE_LIMIT = 4096  # largest q for which full q x q tables are precomputed


class FieldConstructionError(ValueError):
    """Invalid field parameters (p not prime, reducible modulus, ...)."""


class SubgroupError(ValueError):
    """Requested subgroup order does not divide q - 1."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def poly_from_int(x: int, p: int, e: int) -> tuple[int, ...]:
    """Base-p digits of x, least significant first, padded to length e."""
    digits = []
    for _ in range(e):
        digits.append(x % p)
        x //= p
    return tuple(digits)


def int_from_poly(digits: Sequence[int], p: int) -> int:
    v = 0
    for c in reversed(digits):
        v = v * p + c
    return v


def _poly_eval(coeffs: Sequence[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def _divides(coeffs: Sequence[int], divisor: Sequence[int], p: int) -> bool:
    """Exact polynomial division test over F_p; divisor monic."""
    rem = list(coeffs)
    d = len(divisor) - 1
    for i in range(len(rem) - 1, d - 1, -1):
        f = rem[i]
        if f == 0:
            continue
        rem[i] = 0
        for j in range(d):
            rem[i - d + j] = (rem[i - d + j] - f * divisor[j]) % p
    return all(c == 0 for c in rem)


def is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    """Irreducibility of a monic polynomial of degree e <= 4 over F_p.

    Degrees 2 and 3 are settled by an exhaustive root check; degree 4
    additionally rules out monic irreducible quadratic factors by trial
    division.
    """
    e = len(coeffs) - 1
    if coeffs[-1] != 1:
        raise ValueError("modulus must be monic")
    if e == 1:
        return True
    if e > 4:
        raise FieldConstructionError(
            f"irreducibility testing supports degree <= 4, got {e}"
        )
    if any(_poly_eval(coeffs, r, p) == 0 for r in range(p)):
        return False
    if e <= 3:
        return True
    for b0 in range(p):
        for b1 in range(p):
            quad = (b0, b1, 1)
            if is_irreducible(quad, p) and _divides(coeffs, quad, p):
                return False
    return True


@lru_cache(maxsize=None)
def default_modulus(p: int, e: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree e over F_p.

    Candidates are ordered by the base-p integer encoding of their lower
    coefficients, so the default is deterministic across runs.  Gives
    x^4 + x + 1 for (2, 4) and x^2 + 1 for (3, 2).
    """
    if e == 1:
        return (0, 1)
    for low in range(p**e):
        coeffs = poly_from_int(low, p, e) + (1,)
        if is_irreducible(coeffs, p):
            return coeffs
    raise FieldConstructionError(f"no irreducible polynomial found for ({p}, {e})")


class Field:
    """A finite field F_q with precomputed operation tables.

    Immutable after construction; safe to share across workers.
    """

    def __init__(self, p: int, e: int = 1, modulus: Optional[Sequence[int]] = None):
        if not is_prime(p):
            raise FieldConstructionError(f"{p} is not prime")
        if e < 1:
            raise FieldConstructionError("degree must be >= 1")
        q = p**e
        if q > _TABLE_LIMIT:
            raise FieldConstructionError(f"field size {q} exceeds table limit {_TABLE_LIMIT}")
        if modulus is None:
            modulus = default_modulus(p, e)
        modulus = tuple(int(c) % p for c in modulus[:-1]) + (int(modulus[-1]),)
        if len(modulus) != e + 1:
            raise FieldConstructionError("modulus degree must equal the field degree")
        if not is_irreducible(modulus, p):
            raise FieldConstructionError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.e = e
        self.q = q
        self.modulus = modulus
        self._build_tables()
        self.generator = self._find_generator()
        self._build_log_tables()

    # -- construction helpers ------------------------------------------------

    def _build_tables(self) -> None:
        p, e, q = self.p, self.e, self.q
        digits = np.array([poly_from_int(x, p, e) for x in range(q)], dtype=np.int64)
        weights = np.array([p**i for i in range(e)], dtype=np.int64)
        self._add = ((digits[:, None, :] + digits[None, :, :]) % p @ weights).astype(np.int32)
        self._neg = ((-digits) % p @ weights).astype(np.int32)
        mul = np.zeros((q, q), dtype=np.int32)
        for a in range(q):
            for b in range(a, q):
                mul[a, b] = mul[b, a] = self._poly_mul(a, b)
        self._mul = mul
        inv = np.zeros(q, dtype=np.int32)
        for a in range(1, q):
            inv[a] = int(np.nonzero(mul[a] == 1)[0][0])
        self._inv = inv

    def _poly_mul(self, a: int, b: int) -> int:
        p, e = self.p, self.e
        da = poly_from_int(a, p, e)
        db = poly_from_int(b, p, e)
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(da):
            if x == 0:
                continue
            for j, y in enumerate(db):
                prod[i + j] = (prod[i + j] + x * y) % p
        for i in range(len(prod) - 1, e - 1, -1):
            f = prod[i]
            if f == 0:
                continue
            prod[i] = 0
            for j in range(e):
                prod[i - e + j] = (prod[i - e + j] - f * self.modulus[j]) % p
        return int_from_poly(prod[:e], p)

    def _find_generator(self) -> int:
        # Smallest element of F^x of multiplicative order q - 1.
        for g in range(1, self.q):
            x, order = g, 1
            while x != 1:
                x = int(self._mul[x, g])
                order += 1
            if order == self.q - 1:
                return g
        raise FieldConstructionError("no generator found (broken tables)")

    def _build_log_tables(self) -> None:
        q = self.q
        self._exp = np.zeros(q - 1, dtype=np.int32)
        self._log = np.full(q, -1, dtype=np.int64)
        x = 1
        for k in range(q - 1):
            self._exp[k] = x
            self._log[x] = k
            x = int(self._mul[x, self.generator])

    # -- arithmetic ----------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return int(self._add[a, b])

    def neg(self, a: int) -> int:
        return int(self._neg[a])

    def sub(self, a: int, b: int) -> int:
        return int(self._add[a, self._neg[b]])

    def mul(self, a: int, b: int) -> int:
        return int(self._mul[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return int(self._inv[a])

    def log(self, a: int) -> int:
        """Discrete log base the canonical generator (a != 0)."""
        if a == 0:
            raise ZeroDivisionError("zero has no discrete logarithm")
        return int(self._log[a])

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            return 0 if k > 0 else 1
        return int(self._exp[(self.log(a) * k) % (self.q - 1)])

    @property
    def elements(self) -> range:
        return range(self.q)

    @property
    def nonzero(self) -> range:
        return range(1, self.q)

    # -- serialization -------------------------------------------------------

    def descriptor(self) -> dict:
        """Field descriptor used in the base-coefficient file."""
        return {"p": self.p, "e": self.e, "modulus": list(self.modulus)}

    @classmethod
    def from_descriptor(cls, desc: dict) -> "Field":
        return cls(desc["p"], desc["e"], desc.get("modulus"))

    def __repr__(self) -> str:
        if self.e == 1:
            return f"F({self.p})"
        return f"F({self.p}^{self.e}, mod={list(self.modulus)})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Field)
            and (self.p, self.e, self.modulus) == (other.p, other.e, other.modulus)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.modulus))


@dataclass(frozen=True)
class Subgroup:
    """The unique multiplicative subgroup M <= F^x of order m.

    ``elements`` is sorted by canonical integer encoding; ``coset_table``
    maps each nonzero x to the index of its coset xM in F^x / M (entry 0 is
    -1: zero has no coset).
    """

    field: Field
    m: int
    elements: tuple[int, ...]
    coset_table: np.ndarray = dc_field(repr=False, compare=False, default=None)

    @property
    def n_cosets(self) -> int:
        return (self.field.q - 1) // self.m

    def coset_id(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("zero element has no coset")
        return int(self.coset_table[x])

    def coset_elements(self, x: int) -> frozenset[int]:
        return frozenset(self.field.mul(x, h) for h in self.elements)


def make_field(p: int, e: int = 1, modulus: Optional[Sequence[int]] = None) -> Field:
    """Build F_{p^e}; the default modulus is the deterministic lex-least one."""
    return Field(p, e, modulus)


def subgroup_of_order(field: Field, m: int) -> Subgroup:
    """The unique order-m subgroup, as powers of g^((q-1)/m) for generator g."""
    q = field.q
    if m < 1 or (q - 1) % m != 0:
        raise SubgroupError(f"order {m} does not divide q - 1 = {q - 1}")
    h = field.pow(field.generator, (q - 1) // m)
    elems = {1}
    x = h
    while x != 1:
        elems.add(x)
        x = field.mul(x, h)
    if len(elems) != m:
        raise SubgroupError("generator order computation failed")
    # coset of x = g^t is determined by t mod (q-1)/m
    n_cosets = (q - 1) // m
    table = np.full(q, -1, dtype=np.int64)
    for x in range(1, q):
        table[x] = field.log(x) % n_cosets
    return Subgroup(field=field, m=m, elements=tuple(sorted(elems)), coset_table=table)


def coset_id(subgroup: Subgroup, x: int) -> int:
    """Quotient map F^x -> F^x / M as a coset index; errors on x = 0."""
    return subgroup.coset_id(x)
