"""The divisible design (P, B, ||) held as index vectors and bitmasks."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from ..algebra.ring import RingSpec
from ..geometry.projline import ProjectiveLine

logger = logging.getLogger(__name__)

Block = tuple[int, ...]


def transversal_lambda3(b: int, s: int) -> Fraction:
    """The transversal case of Spera's formula: lambda_3 = b / s^3."""
    return Fraction(b, s ** 3)


@dataclass(frozen=True)
class DesignParameters:
    v: int
    s: int
    k: int
    b: int

    @property
    def classes(self) -> int:
        return self.v // self.s

    @property
    def lambda3(self) -> Fraction:
        return transversal_lambda3(self.b, self.s)

    @property
    def is_transversal(self) -> bool:
        return self.k * self.s == self.v


@dataclass
class Design:
    """Blocks are sorted point-index tuples, kept in sorted order.

    Incidence bitmask views are built lazily and shared read-only.
    """
    line: ProjectiveLine
    blocks: list[Block]
    parallel_classes: list[list[int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.blocks = sorted(tuple(sorted(block)) for block in self.blocks)
        if not self.parallel_classes:
            self.parallel_classes = [list(c) for c in self.line.parallel_classes]

    @property
    def ring(self) -> RingSpec:
        return self.line.ring

    @property
    def q(self) -> int:
        return self.line.q

    @property
    def m(self) -> int:
        return self.ring.m

    @property
    def params(self) -> DesignParameters:
        k = len(self.blocks[0]) if self.blocks else 0
        return DesignParameters(v=self.line.v, s=self.line.s, k=k, b=len(self.blocks))

    def incidence_matrix(self) -> np.ndarray:
        """v x b 0/1 matrix, rows by point index, columns by block order."""
        M = np.zeros((self.line.v, len(self.blocks)), dtype=np.uint8)
        if self.blocks:
            cols = np.repeat(np.arange(len(self.blocks)), [len(b) for b in self.blocks])
            rows = np.concatenate([np.asarray(b, dtype=np.int64) for b in self.blocks])
            M[rows, cols] = 1
        return M

    @cached_property
    def point_masks(self) -> list[int]:
        """Bit j of point_masks[i] is set iff point i lies on block j."""
        packed = np.packbits(self.incidence_matrix(), axis=1, bitorder='little')
        return [int.from_bytes(row.tobytes(), 'little') for row in packed]

    @cached_property
    def all_blocks_mask(self) -> int:
        return (1 << len(self.blocks)) - 1

    def mask_of(self, points: Iterable[int]) -> int:
        mask = self.all_blocks_mask
        masks = self.point_masks
        for p in points:
            mask &= masks[p]
        return mask

    def count_blocks_containing(self, points: Iterable[int]) -> int:
        return self.mask_of(points).bit_count()

    def blocks_containing(self, points: Iterable[int]) -> list[Block]:
        mask = self.mask_of(points)
        found = []
        while mask:
            low = mask & -mask
            found.append(self.blocks[low.bit_length() - 1])
            mask ^= low
        return found

    def class_of(self, point: int) -> int:
        return int(self.line.class_of[point])

    def nonparallel(self, points: Sequence[int]) -> bool:
        classes = [self.class_of(p) for p in points]
        return len(set(classes)) == len(classes)
