"""Linear algebra over GF(q) on top of the field's numpy tables.

Vectors and matrices are int64 arrays whose entries are field element
indices. Every operation goes through the lookup tables, so the same code
serves prime and extension fields in any characteristic.
"""
from __future__ import annotations

import logging
from typing import Iterable, Sequence

import numpy as np

from ..algebra.field import FieldSpec

logger = logging.getLogger(__name__)


class FieldLinalg:
    """Row reduction, null spaces and subspace enumeration over one field."""

    def __init__(self, field: FieldSpec):
        self.field = field
        self.q = field.q
        self.add = field.add_table
        self.sub = field.sub_table
        self.mul = field.mul_table
        self.neg = field.neg_table
        self.inv = field.inv_table

    def array(self, rows: Iterable[Sequence[int]] | np.ndarray) -> np.ndarray:
        M = np.array(rows, dtype=np.int64)
        return M.reshape(1, -1) if M.ndim == 1 else M

    def matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        products = self.mul[A[:, :, None], B[None, :, :]]
        acc = products[:, 0, :]
        for j in range(1, A.shape[1]):
            acc = self.add[acc, products[:, j, :]]
        return acc

    def scale(self, c: int, v: np.ndarray) -> np.ndarray:
        return self.mul[c, np.asarray(v)]

    def rref(self, M: np.ndarray) -> tuple[np.ndarray, list[int]]:
        """Reduced row echelon form and pivot columns."""
        R = self.array(M).copy()
        rows, cols = R.shape
        pivots: list[int] = []
        r = 0
        for col in range(cols):
            if r == rows:
                break
            candidates = np.nonzero(R[r:, col])[0]
            if candidates.size == 0:
                continue
            pivot = r + int(candidates[0])
            if pivot != r:
                R[[r, pivot]] = R[[pivot, r]]
            R[r] = self.mul[self.inv[R[r, col]], R[r]]
            factors = R[:, col].copy()
            factors[r] = 0
            R = self.sub[R, self.mul[factors[:, None], R[r][None, :]]]
            pivots.append(col)
            r += 1
        return R, pivots

    def rank(self, M: np.ndarray) -> int:
        if len(M) == 0:
            return 0
        return len(self.rref(M)[1])

    def row_space(self, M: np.ndarray) -> np.ndarray:
        """Reduced basis of the row space."""
        R, pivots = self.rref(M)
        return R[:len(pivots)]

    def nullspace(self, M: np.ndarray) -> np.ndarray:
        """Basis (as rows) of {x : M x^T = 0}."""
        R, pivots = self.rref(M)
        cols = R.shape[1]
        free = [c for c in range(cols) if c not in pivots]
        basis = np.zeros((len(free), cols), dtype=np.int64)
        for i, f in enumerate(free):
            basis[i, f] = 1
            for row, p in enumerate(pivots):
                basis[i, p] = self.neg[R[row, f]]
        return basis

    def inverse(self, M: np.ndarray) -> np.ndarray:
        M = self.array(M)
        n = M.shape[0]
        if M.shape != (n, n):
            raise ValueError(f"matrix of shape {M.shape} is not square")
        R, pivots = self.rref(np.hstack([M, np.eye(n, dtype=np.int64)]))
        if pivots[:n] != list(range(n)):
            raise ZeroDivisionError("singular matrix")
        return R[:, n:]

    def contains(self, basis: np.ndarray, v: Sequence[int]) -> bool:
        """Whether v lies in the row space of basis."""
        rank = self.rank(basis)
        return self.rank(np.vstack([basis, np.asarray(v, dtype=np.int64)])) == rank

    def normalize(self, v: Sequence[int]) -> tuple[int, ...]:
        """Scale so the first nonzero coordinate is 1."""
        v = np.asarray(v, dtype=np.int64)
        nonzero = np.nonzero(v)[0]
        if nonzero.size == 0:
            raise ValueError("the zero vector is not a projective point")
        return tuple(int(x) for x in self.mul[self.inv[v[nonzero[0]]], v])

    def normalize_rows(self, M: np.ndarray) -> np.ndarray:
        """Row-wise normalize; zero rows stay zero."""
        M = self.array(M)
        leading = M[np.arange(len(M)), np.argmax(M != 0, axis=1)]
        return self.mul[self.inv[leading][:, None], M]

    def all_vectors(self, k: int) -> np.ndarray:
        """All q^k coefficient vectors, first coordinate most significant."""
        powers = self.q ** np.arange(k - 1, -1, -1, dtype=np.int64)
        return (np.arange(self.q ** k, dtype=np.int64)[:, None] // powers[None, :]) % self.q

    def projective_points(self, n: int) -> np.ndarray:
        """Normalized representatives of the points of PG(n-1, q)."""
        V = self.all_vectors(n)[1:]
        leading = V[np.arange(len(V)), np.argmax(V != 0, axis=1)]
        return V[leading == 1]

    def span_points(self, basis: np.ndarray) -> set[tuple[int, ...]]:
        """Projective points of the subspace spanned by the rows of basis."""
        B = self.row_space(basis)
        if len(B) == 0:
            return set()
        combos = self.matmul(self.projective_points(len(B)), B)
        return {tuple(row) for row in self.normalize_rows(combos).tolist()}

    def line_points(self, u: Sequence[int], v: Sequence[int]) -> set[tuple[int, ...]]:
        return self.span_points(self.array([u, v]))
