"""Twisted dual numbers R = K(eps; sigma) over a finite field."""
from __future__ import annotations

import logging
from typing import Iterator, NamedTuple, Sequence

from .field import Automorphism, FieldElement, FieldSpec, automorphism_new

logger = logging.getLogger(__name__)

# Enumeration-based self checks run only up to this field order
SELF_CHECK_MAX_Q = 16


class NonUnitError(ZeroDivisionError):
    """Raised when an element of the ideal I is inverted or decomposed."""


class RingElement(NamedTuple):
    """a + b*eps with a, b in K."""
    a: FieldElement
    b: FieldElement


class RingSpec:
    """The local ring K + K*eps with eps^2 = 0 and eps*x = x^sigma*eps.

    Elements are indexed densely by a*q + b, which orders R
    lexicographically on (a, b) and puts 0 at index 0.
    """

    def __init__(self, field: FieldSpec, aut: Automorphism):
        if aut.q != field.q:
            raise ValueError(f"automorphism of GF({aut.q}) used with GF({field.q})")
        self.field = field
        self.aut = aut
        self.q = field.q
        self.m = aut.m
        self.zero = RingElement(0, 0)
        self.one = RingElement(1, 0)
        self.epsilon = RingElement(0, 1)

        if self.q <= SELF_CHECK_MAX_Q:
            self._check_counts()
        logger.debug(f"Constructed ring {self.describe()}")

    def _check_counts(self) -> None:
        q = self.q
        assert len(self.elements()) == q * q
        assert len(self.ideal()) == q
        assert len(self.units()) == q * (q - 1)

    def describe(self) -> str:
        sigma = "id" if self.aut.is_identity else f"x^{self.m}"
        return f"GF({self.q})(eps; {sigma})"

    @property
    def is_commutative(self) -> bool:
        return self.aut.is_identity

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RingSpec):
            return NotImplemented
        return self.field == other.field and self.m == other.m

    def __hash__(self) -> int:
        return hash((self.field, self.m))

    # ------------------------------------------------------------------
    # Enumeration
    # ------------------------------------------------------------------
    def element_index(self, x: RingElement) -> int:
        return x.a * self.q + x.b

    def element_at(self, index: int) -> RingElement:
        return RingElement(*divmod(index, self.q))

    def elements(self) -> list[RingElement]:
        q = self.q
        return [RingElement(a, b) for a in range(q) for b in range(q)]

    def units(self) -> list[RingElement]:
        q = self.q
        return [RingElement(a, b) for a in range(1, q) for b in range(q)]

    def ideal(self) -> list[RingElement]:
        """I = K*eps, the non-units."""
        return [RingElement(0, b) for b in range(self.q)]

    def unit_subgroup(self) -> list[RingElement]:
        """U = 1 + K*eps."""
        return [RingElement(1, b) for b in range(self.q)]

    def scalar_units(self) -> list[RingElement]:
        """K* embedded in R*."""
        return [RingElement(a, 0) for a in range(1, self.q)]

    def scalar(self, a: FieldElement) -> RingElement:
        return RingElement(a, 0)

    def is_unit(self, x: RingElement) -> bool:
        return x.a != 0

    def in_ideal(self, x: RingElement) -> bool:
        return x.a == 0

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------
    def add(self, x: RingElement, y: RingElement) -> RingElement:
        F = self.field
        return RingElement(F.add(x.a, y.a), F.add(x.b, y.b))

    def neg(self, x: RingElement) -> RingElement:
        F = self.field
        return RingElement(F.neg(x.a), F.neg(x.b))

    def sub(self, x: RingElement, y: RingElement) -> RingElement:
        F = self.field
        return RingElement(F.sub(x.a, y.a), F.sub(x.b, y.b))

    def mul(self, x: RingElement, y: RingElement) -> RingElement:
        # (a + b eps)(c + d eps) = ac + (ad + b c^sigma) eps
        F = self.field
        a, b = x
        c, d = y
        return RingElement(F.mul(a, c), F.add(F.mul(a, d), F.mul(b, self.aut(c))))

    def inv(self, u: RingElement) -> RingElement:
        """u^-1 = a^-1 - a^-1 b (a^sigma)^-1 eps."""
        if u.a == 0:
            raise NonUnitError(f"non-unit {self.format(u)} has no inverse")
        F = self.field
        a_inv = F.inv(u.a)
        b = F.neg(F.mul(F.mul(a_inv, u.b), F.inv(self.aut(u.a))))
        result = RingElement(a_inv, b)
        assert self.mul(u, result) == self.one and self.mul(result, u) == self.one
        return result

    def conjugate(self, u: RingElement, x: RingElement) -> RingElement:
        """u^-1 x u."""
        return self.mul(self.mul(self.inv(u), x), u)

    # ------------------------------------------------------------------
    # Formatting / JSON
    # ------------------------------------------------------------------
    def format(self, x: RingElement) -> str:
        F = self.field
        if x.b == 0:
            return F.format(x.a)
        eps = "eps" if x.b == 1 else f"({F.format(x.b)})eps"
        if x.a == 0:
            return eps
        return f"{F.format(x.a)}+{eps}"

    def to_json(self, x: RingElement) -> list[list[int]]:
        return [list(self.field.coeffs(x.a)), list(self.field.coeffs(x.b))]

    def from_json(self, data: Sequence[Sequence[int]]) -> RingElement:
        if len(data) != 2:
            raise ValueError(f"ring element needs two coefficient vectors, got {data!r}")
        return RingElement(self.field.element(data[0]), self.field.element(data[1]))


def ring_new(field: FieldSpec, m: int) -> RingSpec:
    return RingSpec(field, automorphism_new(field, m))


def ring_mul(spec: RingSpec, x: RingElement, y: RingElement) -> RingElement:
    return spec.mul(x, y)


def ring_inv(spec: RingSpec, u: RingElement) -> RingElement:
    return spec.inv(u)


def decompose_unit(spec: RingSpec, u: RingElement) -> tuple[FieldElement, RingElement]:
    """Write u = k * w with k in K* and w in U = 1 + K*eps."""
    if u.a == 0:
        raise NonUnitError(f"non-unit {spec.format(u)} cannot be decomposed")
    F = spec.field
    k = u.a
    w = RingElement(1, F.mul(F.inv(k), u.b))
    assert spec.mul(spec.scalar(k), w) == u
    return k, w


def iter_conjugates(spec: RingSpec, n: RingElement) -> Iterator[RingElement]:
    """n^-1 k n for k in K*."""
    n_inv = spec.inv(n)
    for k in spec.scalar_units():
        yield spec.mul(spec.mul(n_inv, k), n)


def normalizer_of_Kstar(spec: RingSpec) -> set[RingElement]:
    """N = {n in R* : n^-1 K* n = K*}, found exhaustively."""
    normalizer = {
        n for n in spec.units()
        if all(c.b == 0 for c in iter_conjugates(spec, n))
    }
    expected = set(spec.units()) if spec.aut.is_identity else set(spec.scalar_units())
    assert normalizer == expected, "normalizer of K* disagrees with R* / K*"
    logger.debug(f"Normalizer of K* in {spec.describe()} has {len(normalizer)} elements")
    return normalizer
