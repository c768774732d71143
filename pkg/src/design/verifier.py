"""Divisible design axioms, lambda_t counting and Spera's formula."""
from __future__ import annotations

import itertools
import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Any, Iterator, Optional

import numpy as np

from .structure import Design, transversal_lambda3

logger = logging.getLogger(__name__)


@dataclass
class VerificationReport:
    """Axiom flags and the lambda_t interval for one t."""
    t: int
    v: int
    s: int
    k: int
    b: int
    class_sizes_ok: bool = True
    block_sizes_ok: bool = True
    blocks_nonparallel_ok: bool = True
    transversal: bool = True
    lambda_min: Optional[int] = None
    lambda_max: Optional[int] = None
    lambda_histogram: dict[int, int] = field(default_factory=dict)
    tsets_checked: int = 0
    sampled: bool = False
    seed: Optional[int] = None
    spera: Optional[Fraction] = None
    spera_consistent: Optional[bool] = None
    failures: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def is_divisible_design(self) -> bool:
        return self.lambda_min is not None and self.lambda_min == self.lambda_max

    @property
    def passed(self) -> bool:
        return not self.failures and self.is_divisible_design

    def to_dict(self) -> dict[str, Any]:
        return {
            't': self.t,
            'v': self.v,
            's': self.s,
            'k': self.k,
            'b': self.b,
            'class_sizes_ok': self.class_sizes_ok,
            'block_sizes_ok': self.block_sizes_ok,
            'blocks_nonparallel_ok': self.blocks_nonparallel_ok,
            'transversal': self.transversal,
            'lambda': [self.lambda_min, self.lambda_max],
            'lambda_histogram': {str(k): v for k, v in sorted(self.lambda_histogram.items())},
            'tsets_checked': self.tsets_checked,
            'sampled': self.sampled,
            'seed': self.seed,
            'spera': str(self.spera) if self.spera is not None else None,
            'spera_consistent': self.spera_consistent,
            'failures': self.failures,
            'elapsed_seconds': round(self.elapsed, 3),
            'passed': self.passed,
        }


def gl2_order(q: int) -> int:
    """|GL2(K(eps; sigma))| = q^4 (q^2 - 1)(q^2 - q)."""
    return q ** 4 * (q * q - 1) * (q * q - q)


def spera_lambda(order_g: int, order_stab: int, v: int, s: int, k: int, t: int) -> Fraction:
    """lambda_t = |G|/|G_B0| * C(k, t) / (C(v/s, t) * s^t), exactly."""
    if min(order_g, order_stab, v, s, k, t) <= 0:
        raise ValueError("all arguments of Spera's formula must be positive")
    if v % s != 0:
        raise ValueError(f"class size s={s} does not divide v={v}")
    if comb(v // s, t) == 0:
        raise ValueError(f"t={t} exceeds the number of parallel classes {v // s}")
    value = Fraction(order_g, order_stab) * comb(k, t) / (comb(v // s, t) * s ** t)
    if value.denominator != 1:
        logger.warning(f"Spera's formula gives non-integral lambda_{t} = {value}")
    return value


def _check_structure(design: Design, report: VerificationReport) -> None:
    line = design.line
    classes = design.parallel_classes
    seen = sorted(p for c in classes for p in c)
    if seen != list(range(report.v)):
        report.class_sizes_ok = False
        report.failures.append("parallel classes: not a partition of the point set")
        return
    for c in classes:
        if len(c) != report.s:
            report.class_sizes_ok = False
            report.failures.append(f"parallel classes: class of size {len(c)}, expected {report.s}")
            break
    # classes must be exactly the geometric parallelism
    labels = np.empty(report.v, dtype=np.int64)
    for label, c in enumerate(classes):
        labels[c] = label
    same_label = labels[:, None] == labels[None, :]
    same_geometric = line.class_of[:, None] == line.class_of[None, :]
    if not np.array_equal(same_label, same_geometric):
        report.class_sizes_ok = False
        report.failures.append("parallel classes: disagree with parallelism on P(R)")

    n_classes = len(classes)
    for j, block in enumerate(design.blocks):
        if len(block) != report.k:
            report.block_sizes_ok = False
            report.failures.append(f"block size: block {j} has {len(block)} points, expected {report.k}")
            break
    for j, block in enumerate(design.blocks):
        block_classes = labels[list(block)]
        if len(set(block_classes.tolist())) != len(block):
            report.blocks_nonparallel_ok = False
            report.failures.append(f"block meets a parallel class twice: block {j} = {list(block)}")
            break
    for j, block in enumerate(design.blocks):
        if len(set(labels[list(block)].tolist())) != n_classes:
            report.transversal = False
            report.failures.append(f"transversality: block {j} misses a parallel class")
            break
    if report.k * report.s != report.v:
        report.transversal = False
        report.failures.append(f"transversality: k*s = {report.k * report.s} != v = {report.v}")


def _enumerate_counts(design: Design, t: int) -> Iterator[int]:
    """Block counts of all t-sets of pairwise non-parallel points."""
    classes = design.parallel_classes
    masks = design.point_masks

    def extend(chosen_classes: tuple[int, ...], depth: int, mask: int) -> Iterator[int]:
        if depth == len(chosen_classes):
            yield mask.bit_count()
            return
        for p in classes[chosen_classes[depth]]:
            yield from extend(chosen_classes, depth + 1, mask & masks[p])

    for combo in itertools.combinations(range(len(classes)), t):
        yield from extend(combo, 0, design.all_blocks_mask)


def _sample_counts(design: Design, t: int, sample_size: int, seed: int) -> Iterator[int]:
    rng = np.random.default_rng(seed)
    classes = design.parallel_classes
    for _ in range(sample_size):
        chosen = rng.choice(len(classes), size=t, replace=False)
        points = [classes[c][int(rng.integers(len(classes[c])))] for c in chosen]
        yield design.mask_of(points).bit_count()


def verify_dd(
    design: Design,
    t: int,
    sample_size: Optional[int] = None,
    seed: int = 0,
) -> VerificationReport:
    """Check the t-DD axioms; t-sets are enumerated completely unless sample_size is given."""
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    start = time.perf_counter()
    params = design.params
    report = VerificationReport(t=t, v=params.v, s=params.s, k=params.k, b=params.b)
    _check_structure(design, report)

    n_classes = len(design.parallel_classes)
    if t > n_classes:
        report.failures.append(f"lambda_{t}: only {n_classes} parallel classes")
    else:
        if sample_size is None:
            counts = Counter(_enumerate_counts(design, t))
        else:
            report.sampled = True
            report.seed = seed
            counts = Counter(_sample_counts(design, t, sample_size, seed))
        report.lambda_histogram = dict(counts)
        report.tsets_checked = sum(counts.values())
        if counts:
            report.lambda_min = min(counts)
            report.lambda_max = max(counts)
        if report.lambda_min != report.lambda_max:
            report.failures.append(
                f"lambda_{t}: counts range over [{report.lambda_min}, {report.lambda_max}]"
            )

        if params.b and params.k >= t:
            order = gl2_order(design.q)
            if order % params.b == 0:
                report.spera = spera_lambda(order, order // params.b, params.v, params.s, params.k, t)
                if t == 3 and params.is_transversal and report.spera != transversal_lambda3(params.b, params.s):
                    report.failures.append(
                        f"lambda_3: Spera's formula gives {report.spera}, b/s^3 gives {params.lambda3}"
                    )
                if report.is_divisible_design:
                    report.spera_consistent = report.spera == report.lambda_min
                    if not report.spera_consistent:
                        report.failures.append(
                            f"lambda_{t}: counted {report.lambda_min}, Spera's formula gives {report.spera}"
                        )
            else:
                report.failures.append(f"block count {params.b} does not divide |GL2(R)| = {order}")

    report.elapsed = time.perf_counter() - start
    if report.passed:
        logger.info(
            f"verify t={t}: lambda_{t}={report.lambda_min} over {report.tsets_checked} t-sets "
            f"({report.elapsed:.2f}s)"
        )
    else:
        logger.warning(f"verify t={t} failed: {report.failures[:3]}")
    return report
