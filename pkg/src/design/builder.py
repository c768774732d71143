"""Block set B = B0^G by breadth-first closure under generators of GL2(R)."""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Iterator, Optional, Sequence

import numpy as np

from ..algebra.ring import RingElement, RingSpec
from ..config import config
from ..geometry.projline import Matrix2R, PointKind, ProjectiveLine, ProjPoint
from .structure import Block, Design

logger = logging.getLogger(__name__)

# Frontier chunks smaller than this are expanded in the calling thread
MIN_CHUNK = 256


def base_block(line: ProjectiveLine) -> Block:
    """P(K) = {R(x, 1) : x in K} together with the point at infinity."""
    ring = line.ring
    points = [line.index_of[ProjPoint(PointKind.AFFINE, ring.scalar(x))] for x in ring.field.elements()]
    points.append(line.infinity_index)
    block = tuple(sorted(points))
    assert len({line.class_of[p] for p in block}) == len(block), "base block has parallel points"
    return block


def group_generators(line: ProjectiveLine) -> list[Matrix2R]:
    """Transvections, diag(g, 1) for a primitive g, and diag(1 + c eps, 1) over a GF(p)-basis."""
    ring = line.ring
    field = ring.field
    gens = [
        line.upper(ring.one),
        line.upper(ring.epsilon),
        line.lower(ring.one),
        line.lower(ring.epsilon),
    ]
    if field.q > 2:
        gens.append(line.diag(ring.scalar(field.primitive_element()), ring.one))
    for c in field.basis():
        gens.append(line.diag(RingElement(1, c), ring.one))
    assert all(line.is_invertible(g) for g in gens)
    return gens


def _expand(perms: np.ndarray, chunk: Sequence[Block]) -> set[Block]:
    blocks = np.asarray(chunk, dtype=np.int64)
    images = np.sort(perms[:, blocks], axis=2).reshape(-1, blocks.shape[1])
    return set(map(tuple, images.tolist()))


def orbit_blocks(
    line: ProjectiveLine,
    base: Block,
    gens: Sequence[Matrix2R],
    threads: Optional[int] = None,
) -> list[Block]:
    """Closure of {base} under the point permutations induced by gens.

    The frontier of each level is split across a thread pool; the result is
    sorted, so it does not depend on scheduling.
    """
    threads = threads or config.threads
    perms = np.stack([line.permutation(g) for g in gens])
    known: set[Block] = {tuple(base)}
    frontier: list[Block] = [tuple(base)]
    level = 0
    start = time.perf_counter()

    with ThreadPoolExecutor(max_workers=threads) as pool:
        while frontier:
            if threads > 1 and len(frontier) >= 2 * MIN_CHUNK:
                n_chunks = min(threads, len(frontier) // MIN_CHUNK)
                chunks = [list(map(tuple, c.tolist())) for c in np.array_split(np.asarray(frontier), n_chunks)]
                images: set[Block] = set()
                for part in pool.map(lambda c: _expand(perms, c), chunks):
                    images |= part
            else:
                images = _expand(perms, frontier)
            new = images - known
            known |= new
            frontier = sorted(new)
            level += 1
            logger.debug(f"Orbit level {level}: {len(new)} new blocks, {len(known)} total")

    logger.info(
        f"Orbit of base block under {len(gens)} generators: {len(known)} blocks "
        f"({level} levels, {time.perf_counter() - start:.2f}s, {threads} threads)"
    )
    return sorted(known)


def count_invertible_matrices(line: ProjectiveLine) -> int:
    return sum(1 for g in line.all_matrices() if line.is_invertible(g))


def iter_invertible_matrices(line: ProjectiveLine) -> Iterator[Matrix2R]:
    for g in line.all_matrices():
        if line.is_invertible(g):
            yield g


def exhaustive_blocks_oracle(line: ProjectiveLine, max_q: Optional[int] = None) -> list[Block]:
    """Apply every invertible 2x2 matrix over R to B0."""
    max_q = max_q if max_q is not None else int(config.get('oracle.max_q', 4))
    if line.q > max_q:
        raise ValueError(f"exhaustive oracle refused for q={line.q} > {max_q}")
    base = base_block(line)
    base_points = [line.points[i] for i in base]
    blocks: set[Block] = set()
    invertible = 0
    for g in iter_invertible_matrices(line):
        invertible += 1
        blocks.add(tuple(sorted(line.index_of[line.act(g, p)] for p in base_points)))
    logger.info(f"Exhaustive oracle: {invertible} invertible matrices, {len(blocks)} blocks")
    return sorted(blocks)


def expected_block_count(ring: RingSpec) -> int:
    return ring.q ** 3 if ring.aut.is_identity else ring.q ** 4


def build_design(ring: RingSpec, threads: Optional[int] = None) -> Design:
    line = ProjectiveLine(ring)
    blocks = orbit_blocks(line, base_block(line), group_generators(line), threads=threads)
    expected = expected_block_count(ring)
    if len(blocks) != expected:
        logger.warning(f"Orbit of {ring.describe()} has {len(blocks)} blocks, expected {expected}")
    design = Design(line=line, blocks=blocks)
    p = design.params
    logger.info(f"Built design over {ring.describe()}: v={p.v} s={p.s} k={p.k} b={p.b}")
    return design
