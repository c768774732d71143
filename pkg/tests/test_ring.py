from __future__ import annotations

from pathlib import Path
import itertools
import sys

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from src.algebra.field import field_from_order
from src.algebra.ring import (
    NonUnitError,
    RingElement,
    decompose_unit,
    normalizer_of_Kstar,
    ring_inv,
    ring_mul,
    ring_new,
)

W, W1 = 2, 3
EPS = RingElement(0, 1)

RING_PARAMS = [(2, 2), (4, 2), (4, 4), (8, 2), (9, 3), (9, 9)]


def make_ring(q: int, m: int):
    return ring_new(field_from_order(q), m)


@pytest.fixture(scope="module")
def r42():
    return make_ring(4, 2)


def test_products(r42) -> None:
    assert ring_mul(r42, EPS, EPS) == RingElement(0, 0)
    assert ring_mul(r42, RingElement(W, 1), RingElement(W, 1)) == RingElement(W1, 1)
    x = RingElement(W1, W)
    assert ring_mul(r42, r42.one, x) == x


def test_inverses(r42) -> None:
    assert ring_inv(r42, r42.one) == r42.one
    u = RingElement(W, 1)
    assert ring_inv(r42, u) == RingElement(W1, 1)
    assert ring_mul(r42, u, RingElement(W1, 1)) == r42.one
    with pytest.raises(NonUnitError, match="non-unit"):
        ring_inv(r42, EPS)


def test_non_unit_error_is_zero_division(r42) -> None:
    with pytest.raises(ZeroDivisionError):
        ring_inv(r42, r42.zero)


def test_decompose_unit(r42) -> None:
    assert decompose_unit(r42, RingElement(W, 1)) == (W, RingElement(1, W1))
    assert decompose_unit(r42, r42.one) == (1, r42.one)
    assert decompose_unit(r42, RingElement(W, 0)) == (W, r42.one)
    with pytest.raises(NonUnitError):
        decompose_unit(r42, EPS)


def test_normalizer_examples() -> None:
    assert normalizer_of_Kstar(make_ring(4, 2)) == {RingElement(a, 0) for a in (1, W, W1)}
    assert len(normalizer_of_Kstar(make_ring(4, 4))) == 12
    assert len(normalizer_of_Kstar(make_ring(9, 3))) == 8


def test_json_round_trip(r42) -> None:
    x = RingElement(W1, W)
    assert r42.to_json(x) == [[1, 1], [0, 1]]
    assert r42.from_json(r42.to_json(x)) == x


@pytest.mark.parametrize("q,m", RING_PARAMS)
def test_counts(q: int, m: int) -> None:
    R = make_ring(q, m)
    assert len(R.elements()) == q * q
    assert len(R.ideal()) == q
    assert len(R.units()) == q * (q - 1)


@pytest.mark.parametrize("q,m", RING_PARAMS)
def test_epsilon_commutation(q: int, m: int) -> None:
    R = make_ring(q, m)
    for x in R.field.elements():
        assert R.mul(R.epsilon, R.scalar(x)) == R.mul(R.scalar(R.aut(x)), R.epsilon)


@pytest.mark.parametrize("q,m", RING_PARAMS)
def test_semidirect_decomposition(q: int, m: int) -> None:
    R = make_ring(q, m)
    units = set(R.units())
    U = set(R.unit_subgroup())
    Kstar = set(R.scalar_units())
    assert Kstar & U == {R.one}
    assert {R.mul(k, w) for k in Kstar for w in U} == units
    for u in units:
        k, w = decompose_unit(R, u)
        assert R.scalar(k) in Kstar and w in U
        for w2 in U:
            assert R.conjugate(u, w2) in U


@pytest.mark.parametrize("q,m", RING_PARAMS)
def test_ring_laws(q: int, m: int) -> None:
    R = make_ring(q, m)
    elements = R.elements()
    for x, y, z in itertools.product(elements, repeat=3):
        assert R.mul(R.mul(x, y), z) == R.mul(x, R.mul(y, z))
    commutative = all(R.mul(x, y) == R.mul(y, x) for x, y in itertools.product(elements, repeat=2))
    assert commutative == R.aut.is_identity == R.is_commutative
    ideal = R.ideal()
    assert all(R.mul(x, y) == R.zero for x, y in itertools.product(ideal, repeat=2))
    assert set(ideal) == {R.mul(R.scalar(c), R.epsilon) for c in R.field.elements()}
    for u in R.units():
        inv = R.inv(u)
        assert R.mul(u, inv) == R.one == R.mul(inv, u)


def test_left_and_right_distributivity() -> None:
    R = make_ring(4, 2)
    for x, y, z in itertools.product(R.elements(), repeat=3):
        assert R.mul(x, R.add(y, z)) == R.add(R.mul(x, y), R.mul(x, z))
        assert R.mul(R.add(x, y), z) == R.add(R.mul(x, z), R.mul(y, z))
