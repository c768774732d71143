"""GF(p^n) arithmetic with table lookups, Frobenius powers and the fixed subfield.

Elements are represented as integers whose base-p digits are the
coefficients of a polynomial over GF(p), constant term least significant.
With this encoding the natural integer order is the lexicographic order on
coefficient vectors with the constant term last in the sort key, so 0 is
index 0 and 1 is index 1.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

FieldElement = int

# Conway-style irreducible polynomials, coefficients constant term first.
# Degree one uses the modulus x for every prime.
DEFAULT_MODULI: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (2, 7): (1, 1, 0, 0, 0, 0, 0, 1),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (3, 5): (1, 2, 0, 0, 0, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (7, 2): (3, 6, 1),
    (11, 2): (2, 7, 1),
    (13, 2): (2, 12, 1),
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, int(n ** 0.5) + 1):
        if n % d == 0:
            return False
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, n) with q = p^n, or raise ValueError."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    n, rest = 0, q
    while rest % p == 0:
        rest //= p
        n += 1
    if rest != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, n


def _trim(poly: Iterable[int]) -> list[int]:
    poly = list(poly)
    while poly and poly[-1] == 0:
        poly.pop()
    return poly


def _poly_rem(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    """Remainder of a modulo b over GF(p)."""
    rem = _trim(c % p for c in a)
    divisor = _trim(c % p for c in b)
    lead_inv = pow(divisor[-1], p - 2, p)
    while len(rem) >= len(divisor):
        shift = len(rem) - len(divisor)
        factor = rem[-1] * lead_inv % p
        for i, c in enumerate(divisor):
            rem[shift + i] = (rem[shift + i] - factor * c) % p
        rem = _trim(rem)
    return rem


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= n/2."""
    poly = _trim(c % p for c in poly)
    degree = len(poly) - 1
    if degree < 1:
        return False
    for d in range(1, degree // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            if not _poly_rem(poly, list(tail) + [1], p):
                return False
    return True


def format_polynomial(coeffs: Sequence[int], var: str = "x") -> str:
    terms = []
    for power in range(len(coeffs) - 1, -1, -1):
        c = coeffs[power]
        if c == 0:
            continue
        if power == 0:
            terms.append(str(c))
            continue
        mono = var if power == 1 else f"{var}^{power}"
        terms.append(mono if c == 1 else f"{c}{mono}")
    return "+".join(terms) if terms else "0"


class FieldSpec:
    """GF(p^n) realized as GF(p)[x] modulo an irreducible polynomial.

    Instances are immutable after construction. Scalar operations read
    from nested lists; the numpy tables are shared with the linear
    algebra helpers for vectorized work.
    """

    def __init__(self, p: int, n: int, modulus: Sequence[int]):
        if not is_prime(p):
            raise ValueError(f"p={p} is not prime")
        if n < 1:
            raise ValueError(f"extension degree must be >= 1, got {n}")
        poly = _trim(int(c) % p for c in modulus)
        if len(poly) - 1 != n:
            raise ValueError(f"modulus has degree {len(poly) - 1}, expected {n}")
        lead_inv = pow(poly[-1], p - 2, p)
        poly = [c * lead_inv % p for c in poly]
        if not is_irreducible(poly, p):
            raise ValueError(f"reducible modulus {format_polynomial(poly)} over GF({p})")

        self.p = p
        self.n = n
        self.q = p ** n
        self.modulus = tuple(poly)

        self._weights = p ** np.arange(n, dtype=np.int64)
        self._coeffs = (np.arange(self.q, dtype=np.int64)[:, None] // self._weights[None, :]) % p
        self.add_table = self._encode((self._coeffs[:, None, :] + self._coeffs[None, :, :]) % p)
        self.neg_table = self._encode((-self._coeffs) % p)
        self.sub_table = self.add_table[:, self.neg_table]
        self.mul_table = self._build_mul_table()
        self.inv_table = np.zeros(self.q, dtype=np.int64)
        self.inv_table[1:] = np.argmax(self.mul_table[1:] == 1, axis=1)

        self._add = self.add_table.tolist()
        self._sub = self.sub_table.tolist()
        self._mul = self.mul_table.tolist()
        self._neg = self.neg_table.tolist()
        self._inv = self.inv_table.tolist()

        logger.debug(f"Constructed GF({self.q}) with modulus {format_polynomial(self.modulus)}")

    def _encode(self, coeffs: np.ndarray) -> np.ndarray:
        return coeffs @ self._weights

    def _build_mul_table(self) -> np.ndarray:
        p, n, q = self.p, self.n, self.q
        C = self._coeffs
        prod = np.zeros((q, q, 2 * n - 1), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                prod[:, :, i + j] += np.outer(C[:, i], C[:, j])
        prod %= p
        f = self.modulus
        # x^n = -(f_0 + ... + f_{n-1} x^{n-1})
        for k in range(2 * n - 2, n - 1, -1):
            lead = prod[:, :, k].copy()
            prod[:, :, k] = 0
            for i in range(n):
                prod[:, :, k - n + i] = (prod[:, :, k - n + i] - lead * f[i]) % p
        return self._encode(prod[:, :, :n])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldSpec):
            return NotImplemented
        return (self.p, self.n, self.modulus) == (other.p, other.n, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.n, self.modulus))

    def __repr__(self) -> str:
        return f"FieldSpec(GF({self.q}), modulus={format_polynomial(self.modulus)})"

    # ------------------------------------------------------------------
    # Scalar arithmetic
    # ------------------------------------------------------------------
    def add(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return self._add[a][b]

    def sub(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return self._sub[a][b]

    def neg(self, a: FieldElement) -> FieldElement:
        return self._neg[a]

    def mul(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return self._mul[a][b]

    def inv(self, a: FieldElement) -> FieldElement:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in GF(%d)" % self.q)
        return self._inv[a]

    def div(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return self._mul[a][self.inv(b)]

    def pow(self, a: FieldElement, e: int) -> FieldElement:
        """Square-and-multiply."""
        result, base = 1, a
        while e > 0:
            if e & 1:
                result = self._mul[result][base]
            base = self._mul[base][base]
            e >>= 1
        return result

    # ------------------------------------------------------------------
    # Element bookkeeping
    # ------------------------------------------------------------------
    def elements(self) -> list[FieldElement]:
        return list(range(self.q))

    def nonzero(self) -> list[FieldElement]:
        return list(range(1, self.q))

    def coeffs(self, a: FieldElement) -> tuple[int, ...]:
        return tuple(int(c) for c in self._coeffs[a])

    def element(self, coeffs: Sequence[int]) -> FieldElement:
        if len(coeffs) != self.n or any(not 0 <= c < self.p for c in coeffs):
            raise ValueError(f"invalid coefficient vector {list(coeffs)} for GF({self.q})")
        return int(sum(int(c) * int(w) for c, w in zip(coeffs, self._weights)))

    def basis(self) -> list[FieldElement]:
        """The GF(p)-basis 1, x, ..., x^(n-1)."""
        return [self.p ** i for i in range(self.n)]

    def primitive_element(self) -> FieldElement:
        """Smallest generator of the multiplicative group."""
        order = self.q - 1
        if order == 1:
            return 1
        factors = {d for d in range(2, order + 1) if order % d == 0 and is_prime(d)}
        for a in range(2, self.q):
            if all(self.pow(a, order // r) != 1 for r in factors):
                return a
        raise RuntimeError(f"no primitive element found in GF({self.q})")

    def format(self, a: FieldElement) -> str:
        return format_polynomial(self.coeffs(a))

    def to_dict(self) -> dict:
        return {'p': self.p, 'n': self.n, 'modulus': list(self.modulus)}


def field_new(p: int, n: int, modulus: Optional[Sequence[int]] = None) -> FieldSpec:
    """Validated GF(p^n); the built-in table supplies the modulus when omitted."""
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if modulus is None:
        if n == 1:
            modulus = (0, 1)
        elif (p, n) in DEFAULT_MODULI:
            modulus = DEFAULT_MODULI[(p, n)]
        else:
            raise ValueError(f"no default modulus for GF({p}^{n}); pass one explicitly")
    return FieldSpec(p, n, modulus)


def field_from_order(q: int, modulus: Optional[Sequence[int]] = None) -> FieldSpec:
    p, n = prime_power(q)
    return field_new(p, n, modulus)


def field_mul(spec: FieldSpec, a: FieldElement, b: FieldElement) -> FieldElement:
    return spec.mul(a, b)


def field_inv(spec: FieldSpec, a: FieldElement) -> FieldElement:
    return spec.inv(a)


def enumerate_field(spec: FieldSpec) -> list[FieldElement]:
    return spec.elements()


@dataclass(frozen=True)
class Automorphism:
    """The Frobenius power sigma: x -> x^m of GF(q), fixed field GF(m)."""
    q: int
    m: int
    degree: int
    table: tuple[int, ...] = dc_field(repr=False, compare=False)

    def __call__(self, a: FieldElement) -> FieldElement:
        return self.table[a]

    @property
    def is_identity(self) -> bool:
        return self.degree == 1

    @property
    def fixed_field_order(self) -> int:
        return self.m

    def fixed_points(self) -> list[FieldElement]:
        return [a for a, image in enumerate(self.table) if image == a]

    def iterate(self, a: FieldElement, times: int) -> FieldElement:
        for _ in range(times):
            a = self.table[a]
        return a


def automorphism_new(spec: FieldSpec, m: int) -> Automorphism:
    """sigma: x -> x^m; m must be a power of p with q a power of m."""
    e, rest = 0, m
    while rest > 1 and rest % spec.p == 0:
        rest //= spec.p
        e += 1
    if rest != 1 or e == 0:
        raise ValueError(f"m={m} is not a power of p={spec.p}")
    if spec.n % e != 0:
        raise ValueError(f"q={spec.q} is not a power of m={m}")
    table = tuple(spec.pow(a, m) for a in range(spec.q))
    if len(set(table)) != spec.q:
        raise ValueError(f"x -> x^{m} is not a bijection of GF({spec.q})")
    aut = Automorphism(q=spec.q, m=m, degree=spec.n // e, table=table)
    fixed = aut.fixed_points()
    if len(fixed) != m:
        raise ValueError(f"Fix(sigma) has {len(fixed)} elements, expected {m}")
    return aut


def frobenius(spec: FieldSpec, aut: Automorphism, a: FieldElement) -> FieldElement:
    return spec.pow(a, aut.m)


def norm_to_fixed(spec: FieldSpec, aut: Automorphism, a: FieldElement) -> FieldElement:
    """N(a) = a * a^sigma, defined when sigma^2 = id."""
    if aut.degree > 2:
        raise ValueError(f"norm to Fix(sigma) needs sigma^2 = id, got q = m^{aut.degree}")
    value = spec.mul(a, aut(a))
    assert aut(value) == value, "norm left the fixed field"
    return value
