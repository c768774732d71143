"""The projective line over R = K(eps; sigma) and the action of GL2(R)."""
from __future__ import annotations

import itertools
import logging
from enum import IntEnum
from typing import Iterator, NamedTuple, Optional

import numpy as np

from ..algebra.ring import RingElement, RingSpec

logger = logging.getLogger(__name__)


class ParallelPointsError(ValueError):
    """Points that must be pairwise non-parallel are not."""


class NotAPointError(ValueError):
    """A pair (a, b) with both entries in the ideal I."""


class PointKind(IntEnum):
    AFFINE = 0   # R(x, 1)
    IDEAL = 1    # R(1, z), z in I


class ProjPoint(NamedTuple):
    kind: PointKind
    coord: RingElement


class Matrix2R(NamedTuple):
    """[[a, b], [c, d]] over R, acting on row vectors from the right."""
    a: RingElement
    b: RingElement
    c: RingElement
    d: RingElement


class ProjectiveLine:
    """Points of P(R) in canonical form, indexed densely.

    AFFINE(x) sits at the ring index of x, IDEAL(c*eps) at q^2 + c. The
    point at infinity is IDEAL(0), the points 0 and 1 are AFFINE(0) and
    AFFINE(1).
    """

    def __init__(self, ring: RingSpec):
        self.ring = ring
        q = ring.q
        self.q = q
        self.v = q * q + q
        self.s = q

        self.points: list[ProjPoint] = (
            [ProjPoint(PointKind.AFFINE, x) for x in ring.elements()]
            + [ProjPoint(PointKind.IDEAL, z) for z in ring.ideal()]
        )
        self.index_of: dict[ProjPoint, int] = {p: i for i, p in enumerate(self.points)}

        self.infinity = ProjPoint(PointKind.IDEAL, ring.zero)
        self.zero = ProjPoint(PointKind.AFFINE, ring.zero)
        self.one = ProjPoint(PointKind.AFFINE, ring.one)
        self.infinity_index = self.index_of[self.infinity]
        self.zero_index = self.index_of[self.zero]
        self.one_index = self.index_of[self.one]

        # Parallel class of AFFINE(x) is the scalar part of x; ideal points form class q.
        self.class_of = np.array(
            [p.coord.a if p.kind == PointKind.AFFINE else q for p in self.points],
            dtype=np.int64,
        )
        self.parallel_classes: list[list[int]] = [
            [int(i) for i in np.nonzero(self.class_of == c)[0]] for c in range(q + 1)
        ]
        self._ring_tables: Optional[tuple[np.ndarray, np.ndarray]] = None
        logger.debug(f"Projective line over {ring.describe()}: v={self.v}, s={self.s}")

    def __len__(self) -> int:
        return self.v

    # ------------------------------------------------------------------
    # Points
    # ------------------------------------------------------------------
    def representative(self, p: ProjPoint) -> tuple[RingElement, RingElement]:
        if p.kind == PointKind.AFFINE:
            return p.coord, self.ring.one
        return self.ring.one, p.coord

    def canonicalize(self, a: RingElement, b: RingElement) -> ProjPoint:
        R = self.ring
        if R.is_unit(b):
            return ProjPoint(PointKind.AFFINE, R.mul(R.inv(b), a))
        if R.is_unit(a):
            return ProjPoint(PointKind.IDEAL, R.mul(R.inv(a), b))
        raise NotAPointError(f"({R.format(a)}, {R.format(b)}) has no unit entry")

    def is_parallel(self, p: ProjPoint, r: ProjPoint) -> bool:
        if p.kind != r.kind:
            return False
        if p.kind == PointKind.IDEAL:
            return True
        return p.coord.a == r.coord.a

    def is_parallel_index(self, i: int, j: int) -> bool:
        return self.class_of[i] == self.class_of[j]

    def is_parallel_det(self, p: ProjPoint, r: ProjPoint) -> bool:
        """Parallel iff the matrix with rows p and r is not invertible."""
        a, b = self.representative(p)
        c, d = self.representative(r)
        return not self.is_invertible(Matrix2R(a, b, c, d))

    def check_pairwise_nonparallel(self, *points: ProjPoint) -> None:
        for p, r in itertools.combinations(points, 2):
            if self.is_parallel(p, r):
                raise ParallelPointsError(
                    f"{self.format_point(p)} and {self.format_point(r)} are parallel"
                )

    # ------------------------------------------------------------------
    # Matrices
    # ------------------------------------------------------------------
    def matrix(self, a, b, c, d) -> Matrix2R:
        """Build a matrix from ring elements or (a, b) pairs."""
        return Matrix2R(*(RingElement(*x) for x in (a, b, c, d)))

    def identity(self) -> Matrix2R:
        R = self.ring
        return Matrix2R(R.one, R.zero, R.zero, R.one)

    def diag(self, x: RingElement, y: RingElement) -> Matrix2R:
        return Matrix2R(x, self.ring.zero, self.ring.zero, y)

    def upper(self, r: RingElement) -> Matrix2R:
        R = self.ring
        return Matrix2R(R.one, r, R.zero, R.one)

    def lower(self, r: RingElement) -> Matrix2R:
        R = self.ring
        return Matrix2R(R.one, R.zero, r, R.one)

    def swap(self) -> Matrix2R:
        R = self.ring
        return Matrix2R(R.zero, R.one, R.one, R.zero)

    def is_invertible(self, g: Matrix2R) -> bool:
        """Invertible over the local ring iff invertible modulo I."""
        F = self.ring.field
        det = F.sub(F.mul(g.a.a, g.d.a), F.mul(g.b.a, g.c.a))
        return det != 0

    def matmul(self, g: Matrix2R, h: Matrix2R) -> Matrix2R:
        R = self.ring
        return Matrix2R(
            R.add(R.mul(g.a, h.a), R.mul(g.b, h.c)),
            R.add(R.mul(g.a, h.b), R.mul(g.b, h.d)),
            R.add(R.mul(g.c, h.a), R.mul(g.d, h.c)),
            R.add(R.mul(g.c, h.b), R.mul(g.d, h.d)),
        )

    def inverse(self, g: Matrix2R) -> Matrix2R:
        if not self.is_invertible(g):
            raise ValueError("matrix is not invertible over R")
        R = self.ring
        if not R.is_unit(g.a):
            # c is a unit; invert the row-swapped matrix and swap columns back
            h = self.inverse(Matrix2R(g.c, g.d, g.a, g.b))
            result = Matrix2R(h.b, h.a, h.d, h.c)
        else:
            a_inv = R.inv(g.a)
            schur = R.sub(g.d, R.mul(R.mul(g.c, a_inv), g.b))
            s_inv = R.inv(schur)
            top_right = R.neg(R.mul(R.mul(a_inv, g.b), s_inv))
            bottom_left = R.neg(R.mul(R.mul(s_inv, g.c), a_inv))
            top_left = R.add(a_inv, R.mul(R.mul(R.mul(a_inv, g.b), s_inv), R.mul(g.c, a_inv)))
            result = Matrix2R(top_left, top_right, bottom_left, s_inv)
        identity = self.identity()
        assert self.matmul(g, result) == identity and self.matmul(result, g) == identity
        return result

    def all_matrices(self) -> Iterator[Matrix2R]:
        elements = self.ring.elements()
        for entries in itertools.product(elements, repeat=4):
            yield Matrix2R(*entries)

    def _tables(self) -> tuple[np.ndarray, np.ndarray]:
        if self._ring_tables is None:
            R = self.ring
            n = self.q * self.q
            elements = R.elements()
            mul = np.array([[R.element_index(R.mul(x, y)) for y in elements] for x in elements],
                           dtype=np.int64).reshape(n, n)
            add = np.array([[R.element_index(R.add(x, y)) for y in elements] for x in elements],
                           dtype=np.int64).reshape(n, n)
            self._ring_tables = (mul, add)
        return self._ring_tables

    def has_inverse_exhaustive(self, g: Matrix2R, max_q: int = 4) -> bool:
        """Search R^2 for the rows of a left and the columns of a right inverse."""
        if self.q > max_q:
            raise ValueError(f"exhaustive inverse search refused for q={self.q} > {max_q}")
        mul, add = self._tables()
        idx = self.ring.element_index
        a, b, c, d = (idx(x) for x in g)
        one, zero = idx(self.ring.one), idx(self.ring.zero)

        # right inverse column (x, y): a x + b y = e1, c x + d y = e2
        top = add[mul[a][:, None], mul[b][None, :]]
        bottom = add[mul[c][:, None], mul[d][None, :]]
        right = (
            np.any((top == one) & (bottom == zero))
            and np.any((top == zero) & (bottom == one))
        )
        # left inverse row (x, y): x a + y c = e1, x b + y d = e2
        first = add[mul[:, a][:, None], mul[:, c][None, :]]
        second = add[mul[:, b][:, None], mul[:, d][None, :]]
        left = (
            np.any((first == one) & (second == zero))
            and np.any((first == zero) & (second == one))
        )
        return bool(right and left)

    # ------------------------------------------------------------------
    # Action
    # ------------------------------------------------------------------
    def act(self, g: Matrix2R, p: ProjPoint) -> ProjPoint:
        """(a, b) -> (a, b) g, then canonicalize."""
        if not self.is_invertible(g):
            raise ValueError("only invertible matrices act on P(R)")
        R = self.ring
        a, b = self.representative(p)
        return self.canonicalize(
            R.add(R.mul(a, g.a), R.mul(b, g.c)),
            R.add(R.mul(a, g.b), R.mul(b, g.d)),
        )

    def act_index(self, g: Matrix2R, i: int) -> int:
        return self.index_of[self.act(g, self.points[i])]

    def permutation(self, g: Matrix2R) -> np.ndarray:
        """perm[i] = index of the image of point i."""
        return np.array([self.act_index(g, i) for i in range(self.v)], dtype=np.int64)

    def map_standard_triple(self, p1: ProjPoint, p2: ProjPoint, p3: ProjPoint) -> Matrix2R:
        """g with inf -> p1, 0 -> p2, 1 -> p3."""
        self.check_pairwise_nonparallel(p1, p2, p3)
        R = self.ring
        a1, b1 = self.representative(p1)
        a2, b2 = self.representative(p2)
        a3, b3 = self.representative(p3)
        m_inv = self.inverse(Matrix2R(a1, b1, a2, b2))
        lam = R.add(R.mul(a3, m_inv.a), R.mul(b3, m_inv.c))
        mu = R.add(R.mul(a3, m_inv.b), R.mul(b3, m_inv.d))
        if not (R.is_unit(lam) and R.is_unit(mu)):
            raise ParallelPointsError("third point is parallel to one of the first two")
        g = Matrix2R(R.mul(lam, a1), R.mul(lam, b1), R.mul(mu, a2), R.mul(mu, b2))
        assert self.act(g, self.infinity) == p1
        assert self.act(g, self.zero) == p2
        assert self.act(g, self.one) == p3
        return g

    # ------------------------------------------------------------------
    # Formatting
    # ------------------------------------------------------------------
    def format_point(self, p: ProjPoint) -> str:
        fmt = self.ring.format
        if p.kind == PointKind.AFFINE:
            return f"R({fmt(p.coord)},1)"
        return f"R(1,{fmt(p.coord)})"

    def point_to_json(self, p: ProjPoint) -> dict:
        return {'kind': p.kind.name.lower(), 'coord': self.ring.to_json(p.coord)}

    def legend(self) -> list[dict]:
        return [self.point_to_json(p) for p in self.points]


def enumerate_points(ring: RingSpec) -> list[ProjPoint]:
    return list(ProjectiveLine(ring).points)
