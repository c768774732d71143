"""Blocks through a triple, traces, and the fourth-point trichotomy."""
from __future__ import annotations

import itertools
import logging
from collections import Counter
from typing import Iterator, Optional

import numpy as np

from ..algebra.ring import RingElement
from ..geometry.projline import (
    Matrix2R,
    ParallelPointsError,
    PointKind,
    ProjectiveLine,
    ProjPoint,
)
from ..utils.report import CheckReport
from .builder import base_block
from .structure import Block, Design

logger = logging.getLogger(__name__)

Triple = tuple[int, int, int]


def u_hat(line: ProjectiveLine, b: int) -> Matrix2R:
    """diag(1 + b eps, 1 + b eps)."""
    u = RingElement(1, b)
    return line.diag(u, u)


def subline_points(line: ProjectiveLine) -> Block:
    """P(F): R(f, 1) for f in Fix(sigma), and the point at infinity."""
    ring = line.ring
    points = [line.index_of[ProjPoint(PointKind.AFFINE, ring.scalar(f))] for f in ring.aut.fixed_points()]
    points.append(line.infinity_index)
    return tuple(sorted(points))


def _points(design: Design, *indices: int) -> list[ProjPoint]:
    return [design.line.points[i] for i in indices]


def _check_triple(design: Design, p1: int, p2: int, p3: int) -> None:
    if not design.nonparallel((p1, p2, p3)):
        raise ParallelPointsError(f"points {p1}, {p2}, {p3} are not pairwise non-parallel")


def _image_block(line: ProjectiveLine, h: Matrix2R, block: Block) -> Block:
    return tuple(sorted(line.act_index(h, i) for i in block))


def blocks_through_triple(design: Design, p1: int, p2: int, p3: int) -> list[Block]:
    """(B0^w)^g for w in U-hat, with g mapping (inf, 0, 1) to the triple."""
    _check_triple(design, p1, p2, p3)
    line = design.line
    g = line.map_standard_triple(*_points(design, p1, p2, p3))
    base = base_block(line)
    blocks = {
        _image_block(line, line.matmul(u_hat(line, b), g), base)
        for b in line.ring.field.elements()
    }
    result = sorted(blocks)
    assert result == design.blocks_containing((p1, p2, p3)), "blocks through triple disagree with the block set"
    return result


def trace(design: Design, p1: int, p2: int, p3: int, strict: bool = True) -> Block:
    """Intersection of all blocks through three pairwise non-parallel points."""
    _check_triple(design, p1, p2, p3)
    through = design.blocks_containing((p1, p2, p3))
    if not through:
        return ()
    common = set(through[0]).intersection(*through[1:])
    result = tuple(sorted(common))
    if strict:
        assert len(result) == design.m + 1, f"trace of size {len(result)}, expected {design.m + 1}"
    return result


def trace_witness(design: Design, p1: int, p2: int, p3: int) -> tuple[Matrix2R, Block]:
    """g with T = P(F)^g."""
    line = design.line
    g = line.map_standard_triple(*_points(design, p1, p2, p3))
    image = _image_block(line, g, subline_points(line))
    return g, image


def _predict(design: Design, trace_points: Block, x: int) -> int:
    if x in trace_points:
        return design.q
    if design.class_of(x) in {design.class_of(t) for t in trace_points}:
        return 0
    return 1


def classify_fourth_point(design: Design, p1: int, p2: int, p3: int, x: int, verify: bool = True) -> int:
    """Number of blocks through p1, p2, p3, x: q, 0 or 1.

    x may coincide with one of p1, p2, p3 (it then lies in the trace).
    """
    if design.ring.aut.is_identity:
        raise ValueError("the fourth-point trichotomy needs sigma != id")
    _check_triple(design, p1, p2, p3)
    if x not in (p1, p2, p3) and not design.nonparallel((p1, p2, p3, x)):
        raise ParallelPointsError(f"point {x} is parallel to one of {p1}, {p2}, {p3}")
    predicted = _predict(design, trace(design, p1, p2, p3), x)
    if verify:
        counted = design.count_blocks_containing((p1, p2, p3, x))
        assert counted == predicted, f"classified {predicted} blocks, counted {counted}"
    return predicted


def nonparallel_triples(
    design: Design,
    sample_size: Optional[int] = None,
    seed: int = 0,
) -> Iterator[Triple]:
    """All pairwise non-parallel triples, or a seeded sample of them."""
    classes = design.parallel_classes
    if sample_size is None:
        for combo in itertools.combinations(range(len(classes)), 3):
            for triple in itertools.product(*(classes[c] for c in combo)):
                yield triple
        return
    rng = np.random.default_rng(seed)
    for _ in range(sample_size):
        chosen = rng.choice(len(classes), size=3, replace=False)
        yield tuple(classes[c][int(rng.integers(len(classes[c])))] for c in chosen)


BRANCHES = ('in_trace', 'parallel_to_trace', 'other')


def fourth_point_census(
    design: Design,
    sample_size: Optional[int] = None,
    seed: int = 0,
) -> CheckReport:
    """Trace sizes, the trichotomy and the class-meeting property over many triples.

    Admissible fourth points are the triple's own points and every point
    outside the triple's parallel classes. A branch with no witness is
    reported as vacuous.
    """
    if design.ring.aut.is_identity:
        raise ValueError("the fourth-point census needs sigma != id")
    q, m = design.q, design.m
    report = CheckReport(name="fourth_point_census")
    branches = {name: {'witnesses': 0, 'mismatches': 0} for name in BRANCHES}
    in_trace_beyond_triple = 0
    triples = 0
    pf = subline_points(design.line)
    class_of = design.line.class_of.tolist()

    for p1, p2, p3 in nonparallel_triples(design, sample_size, seed):
        triples += 1
        through = design.blocks_containing((p1, p2, p3))
        report.require(len(through) == q, f"triple {(p1, p2, p3)}: {len(through)} blocks, expected {q}")
        if not through:
            continue
        counts = Counter(p for block in through for p in block)
        T = tuple(sorted(p for p, c in counts.items() if c == len(through)))
        report.require(len(T) == m + 1, f"triple {(p1, p2, p3)}: trace of size {len(T)}, expected {m + 1}")
        trace_set = set(T)

        _, witness = trace_witness(design, p1, p2, p3)
        report.require(witness == T, f"triple {(p1, p2, p3)}: trace is not P(F)^g for the standard g")

        trace_classes = {class_of[t] for t in T}
        triple_classes = {class_of[p1], class_of[p2], class_of[p3]}
        for x in range(design.line.v):
            if x not in (p1, p2, p3) and class_of[x] in triple_classes:
                continue
            if x in trace_set:
                branch, expected = 'in_trace', q
                if x not in (p1, p2, p3):
                    in_trace_beyond_triple += 1
            elif class_of[x] in trace_classes:
                branch, expected = 'parallel_to_trace', 0
            else:
                branch, expected = 'other', 1
            branches[branch]['witnesses'] += 1
            if counts.get(x, 0) != expected:
                branches[branch]['mismatches'] += 1
                report.fail(f"triple {(p1, p2, p3)}, x={x}: {counts.get(x, 0)} blocks, expected {expected}")

        # each block through the triple meets every class disjoint from T once
        for c, members in enumerate(design.parallel_classes):
            if c in trace_classes:
                continue
            report.require(
                all(counts.get(x, 0) == 1 for x in members),
                f"triple {(p1, p2, p3)}: class {c} not covered once by the blocks through it",
            )

    for name, data in branches.items():
        data['vacuous'] = data['witnesses'] == 0
    report.details = {
        'q': q,
        'm': m,
        'triples': triples,
        'sampled': sample_size is not None,
        'seed': seed if sample_size is not None else None,
        'branches': branches,
        'in_trace_beyond_triple': in_trace_beyond_triple,
        'subline_size': len(pf),
    }
    report.log()
    return report


def check_u_hat_action(line: ProjectiveLine) -> CheckReport:
    """w = diag(1 + b eps, 1 + b eps): R(x, 1) -> R(x + b(x1 - x1^sigma) eps, 1), R(1, z) fixed."""
    ring = line.ring
    field = ring.field
    sigma = ring.aut
    report = CheckReport(name="u_hat_action")
    fixed_by_all: set[int] = set(range(line.v))
    for b in field.elements():
        w = u_hat(line, b)
        for i, p in enumerate(line.points):
            image = line.act(w, p)
            if p.kind == PointKind.IDEAL:
                expected = p
            else:
                x1, x2 = p.coord
                shift = field.mul(b, field.sub(x1, sigma(x1)))
                expected = ProjPoint(PointKind.AFFINE, RingElement(x1, field.add(x2, shift)))
            report.require(image == expected, f"b={b}, point {i}: got {image}, expected {expected}")
            report.require(line.is_parallel(image, p), f"b={b}, point {i}: image not parallel")
            if image != p:
                fixed_by_all.discard(i)
    expected_fixed = {
        i for i, p in enumerate(line.points)
        if p.kind == PointKind.IDEAL or sigma(p.coord.a) == p.coord.a
    }
    report.require(fixed_by_all == expected_fixed, "fixed points of U-hat are not the ideal points and F-points")
    base = set(base_block(line))
    report.details = {
        'fixed_points': len(fixed_by_all),
        'fixed_in_base_block': sorted(base & fixed_by_all),
        'subline': list(subline_points(line)),
    }
    report.require(
        tuple(sorted(base & fixed_by_all)) == subline_points(line),
        "fixed points of U-hat on B0 are not P(F)",
    )
    return report


def check_regular_action(line: ProjectiveLine) -> CheckReport:
    """U-hat is regular on each parallel class of R(x1, 1) with x1 outside F."""
    ring = line.ring
    field = ring.field
    report = CheckReport(name="regular_action")
    moved_classes = 0
    for x1 in field.elements():
        if ring.aut(x1) == x1:
            continue
        moved_classes += 1
        p = ProjPoint(PointKind.AFFINE, ring.scalar(x1))
        images = [line.index_of[line.act(u_hat(line, b), p)] for b in field.elements()]
        report.require(
            sorted(images) == line.parallel_classes[x1],
            f"x1={x1}: b -> p^w is not a bijection onto the parallel class",
        )
    report.details = {'classes': moved_classes, 'vacuous': moved_classes == 0}
    return report
