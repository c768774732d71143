from __future__ import annotations

from functools import lru_cache
from pathlib import Path
import itertools
import sys

import numpy as np
import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from src.algebra.field import field_from_order
from src.algebra.ring import RingElement, ring_new
from src.design.builder import build_design
from src.geometry.klein import (
    VERTEX,
    KleinModel,
    embed_ring,
    klein_form,
    line_in_quadric,
    line_in_quadric_exhaustive,
    mat2_adjugate,
    mat2_det,
    mat2_mul,
    phi,
    phi_general,
    phi_of_pair,
    phi_vector,
    trace_plane,
    verify_baer,
    verify_blocks_geometric,
    verify_cap,
    verify_collineations,
    verify_cone,
    verify_parallel_lines,
    verify_tangent_hyperplane,
)
from src.geometry.linalg import FieldLinalg
from src.geometry.projline import PointKind, ProjPoint

W, W1 = 2, 3


@lru_cache(maxsize=None)
def design_for(q: int, m: int):
    return build_design(ring_new(field_from_order(q), m), threads=2)


@lru_cache(maxsize=None)
def model_for(q: int, m: int) -> KleinModel:
    return KleinModel(design_for(q, m).line)


@pytest.fixture(scope="module")
def model42() -> KleinModel:
    return model_for(4, 2)


def test_embedding_examples(model42) -> None:
    R = model42.ring
    assert embed_ring(R, RingElement(W, 1)).tolist() == [[W, 1], [0, W1]]
    assert embed_ring(R, R.epsilon).tolist() == [[0, 1], [0, 0]]


@pytest.mark.parametrize("q,m", [(4, 2), (9, 3)])
def test_embedding_is_multiplicative(q: int, m: int) -> None:
    R = model_for(q, m).ring
    for x, y in itertools.product(R.elements(), repeat=2):
        product = mat2_mul(R.field, embed_ring(R, x), embed_ring(R, y))
        assert np.array_equal(embed_ring(R, R.mul(x, y)), product)


def test_klein_form_examples(model42) -> None:
    F = model42.field
    assert klein_form(F, (1, 0, 0, 1, 0, 0)) == 1
    assert klein_form(F, (0, 0, 0, 0, 1, 1)) == 1
    assert klein_form(F, VERTEX) == 0
    assert klein_form(F, (W, 1, 0, W1, 1, 1)) == 0


def test_adjugate_identity() -> None:
    F = field_from_order(9)
    rng = np.random.default_rng(5)
    for _ in range(50):
        M = rng.integers(9, size=(2, 2))
        product = mat2_mul(F, M, mat2_adjugate(F, M))
        det = mat2_det(F, M)
        assert product.tolist() == [[det, 0], [0, det]]


def test_phi_examples(model42) -> None:
    line = model42.line
    point = ProjPoint(PointKind.AFFINE, RingElement(W, 1))
    assert phi_vector(line, point) == (W, 1, 0, W1, 1, 1)
    assert phi(line, line.infinity) == (0, 0, 0, 0, 1, 0)
    assert phi(line, line.zero) == (0, 0, 0, 0, 0, 1)
    ideal = ProjPoint(PointKind.IDEAL, RingElement(0, W))
    assert phi(line, ideal) == (0, 1, 0, 0, W1, 0)


@pytest.mark.parametrize("q,m", [(4, 2), (4, 4), (9, 3)])
def test_phi_is_independent_of_representative(q: int, m: int) -> None:
    model = model_for(q, m)
    line, R = model.line, model.ring
    for p in line.points:
        a, b = line.representative(p)
        for u in R.units():
            assert phi_of_pair(line, R.mul(u, a), R.mul(u, b)) == phi(line, p)


def test_phi_general_rejects_degenerate_rows(model42) -> None:
    zero = np.zeros((2, 2), dtype=np.int64)
    with pytest.raises(ValueError):
        phi_general(model42.field, zero, zero)


def test_line_in_quadric_examples(model42) -> None:
    F, line = model42.field, model42.line
    ideal = ProjPoint(PointKind.IDEAL, model42.ring.epsilon)
    assert line_in_quadric(F, phi(line, line.infinity), phi(line, ideal))
    assert not line_in_quadric(F, phi(line, line.infinity), phi(line, line.zero))
    assert line_in_quadric(F, VERTEX, phi(line, line.one))
    with pytest.raises(ValueError):
        line_in_quadric(F, VERTEX, VERTEX)


def test_line_in_quadric_matches_point_enumeration(model42) -> None:
    F = model42.field
    for x, y in itertools.combinations(model42.images, 2):
        assert line_in_quadric(F, x, y) == line_in_quadric_exhaustive(F, x, y)


@pytest.mark.parametrize("q,m,span", [(4, 2, 5), (4, 4, 4), (9, 3, 5), (2, 2, 4)])
def test_cone(q: int, m: int, span: int) -> None:
    model = model_for(q, m)
    assert model.span_dim == span
    report = verify_cone(model)
    assert report.passed, report.failures
    assert report.details['generators'] == q + 1
    assert report.details['points_per_generator'] == [q]


def test_tangent_hyperplane(model42) -> None:
    assert verify_tangent_hyperplane(model42).passed


def test_parallel_lines(model42) -> None:
    report = verify_parallel_lines(model42)
    assert report.passed, report.failures
    assert report.details['pairs'] == 190


def test_cap_is_conic_without_twist() -> None:
    report = verify_cap(model_for(4, 4))
    assert report.passed, report.failures
    assert report.details['conic_points'] == 5
    assert report.details['rank'] == 3


@pytest.mark.parametrize("q,m", [(4, 2), (9, 3), (8, 2)])
def test_cap_spans_u0_with_twist(q: int, m: int) -> None:
    report = verify_cap(model_for(q, m))
    assert report.passed, report.failures
    assert report.details['rank'] == 4
    assert report.details['u0_quadric_points'] == (q + 1) ** 2


@pytest.mark.parametrize("q,m,expected", [(4, 2, 256), (9, 3, 6561), (4, 4, 64)])
def test_blocks_are_cone_sections(q: int, m: int, expected: int) -> None:
    report = verify_blocks_geometric(model_for(q, m), design_for(q, m).blocks)
    assert report.passed, report.failures
    assert report.details['complements'] == report.details['expected_complements'] == expected
    assert report.details['negative_control_points'] > 0


def test_non_block_is_not_a_section(model42) -> None:
    blocks = list(design_for(4, 2).blocks)
    first = list(blocks[0])
    first[-1] = next(p for p in model42.line.parallel_classes[int(model42.line.class_of[first[-1]])]
                     if p != first[-1])
    blocks[0] = tuple(sorted(first))
    assert not verify_blocks_geometric(model42, blocks).passed


@pytest.mark.parametrize("q,m,points", [(4, 2, 5), (9, 3, 10)])
def test_baer_subspace(q: int, m: int, points: int) -> None:
    report = verify_baer(model_for(q, m))
    assert report.passed, report.failures
    assert report.details['quadric_points'] == points
    assert report.details['baer_vectors'] == m ** 4


@pytest.mark.parametrize("q,m", [(8, 2), (4, 4)])
def test_baer_needs_quadratic_twist(q: int, m: int) -> None:
    with pytest.raises(ValueError):
        verify_baer(model_for(q, m))


def test_trace_plane_standard_triple(model42) -> None:
    line = model42.line
    triple = (line.infinity_index, line.zero_index, line.one_index)
    report = trace_plane(model42, design_for(4, 2), *triple)
    assert report.passed, report.failures
    assert report.details['trace'] == [0, 4, 16]
    assert report.details['complements_through_plane'] == 4
    assert model42.complements_containing(triple) == 4


def test_trace_plane_with_extra_trace_point() -> None:
    model = model_for(9, 3)
    report = trace_plane(model, design_for(9, 3), model.line.infinity_index, 5, 27)
    assert report.passed, report.failures
    assert len(report.details['trace']) == 4
    assert report.details['fourth_points']['0'] == 8


def test_trace_plane_needs_twist() -> None:
    model = model_for(4, 4)
    line = model.line
    with pytest.raises(ValueError):
        trace_plane(model, design_for(4, 4), line.infinity_index, line.zero_index, line.one_index)


@pytest.mark.parametrize("q,m", [(4, 2), (4, 4), (9, 3), (2, 2)])
def test_generators_induce_collineations(q: int, m: int) -> None:
    report = verify_collineations(model_for(q, m))
    assert report.passed, report.failures
    assert len(report.details['form_scalars']) == report.details['generators']
    assert all(c != 0 for c in report.details['form_scalars'])


def test_vertex_outside_image_and_frame(model42) -> None:
    assert VERTEX not in model42.index
    linalg = FieldLinalg(model42.field)
    assert linalg.rank(model42.frame.basis) == model42.span_dim
    assert bool(np.all(model42.frame.contains_rows(model42.image_array)))
