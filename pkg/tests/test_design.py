from __future__ import annotations

from functools import lru_cache
from fractions import Fraction
from pathlib import Path
import json
import sys

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from src.algebra.field import field_from_order
from src.algebra.ring import ring_new
from src.design.builder import (
    base_block,
    build_design,
    exhaustive_blocks_oracle,
    group_generators,
    orbit_blocks,
)
from src.design.cache import DesignCache
from src.design.serialization import (
    DesignFormatError,
    design_from_dict,
    design_to_dict,
    dumps,
    incidence_text,
    load_design,
    write_design,
)
from src.design.structure import Design, transversal_lambda3
from src.design.traces import (
    blocks_through_triple,
    check_regular_action,
    check_u_hat_action,
    classify_fourth_point,
    fourth_point_census,
    subline_points,
    trace,
    trace_witness,
)
from src.design.verifier import gl2_order, spera_lambda, verify_dd
from src.geometry.projline import ParallelPointsError, ProjectiveLine


@lru_cache(maxsize=None)
def design_for(q: int, m: int) -> Design:
    return build_design(ring_new(field_from_order(q), m), threads=2)


@pytest.fixture(scope="module")
def d42() -> Design:
    return design_for(4, 2)


@pytest.fixture(scope="module")
def d93() -> Design:
    return design_for(9, 3)


def test_base_block(d42) -> None:
    line = d42.line
    assert base_block(line) == (0, 4, 8, 12, 16)
    assert d42.nonparallel(base_block(line))


@pytest.mark.parametrize("q,count", [(4, 7), (2, 5)])
def test_generator_counts(q: int, count: int) -> None:
    line = ProjectiveLine(ring_new(field_from_order(q), 2))
    assert len(group_generators(line)) == count


@pytest.mark.parametrize(
    "q,m,v,k,b",
    [(4, 2, 20, 5, 256), (4, 4, 20, 5, 64), (2, 2, 6, 3, 8), (9, 3, 90, 10, 6561), (8, 2, 72, 9, 4096)],
)
def test_orbit_sizes(q: int, m: int, v: int, k: int, b: int) -> None:
    d = design_for(q, m)
    p = d.params
    assert (p.v, p.s, p.k, p.b) == (v, q, k, b)
    assert p.is_transversal
    assert gl2_order(q) % b == 0


@pytest.mark.parametrize("q,m", [(2, 2), (4, 2), (4, 4)])
def test_orbit_matches_exhaustive_oracle(q: int, m: int) -> None:
    d = design_for(q, m)
    assert exhaustive_blocks_oracle(d.line, max_q=4) == d.blocks


def test_oracle_refuses_large_fields() -> None:
    line = ProjectiveLine(ring_new(field_from_order(8), 2))
    with pytest.raises(ValueError, match="refused"):
        exhaustive_blocks_oracle(line, max_q=4)


def test_orbit_is_independent_of_thread_count(d93) -> None:
    line = d93.line
    gens = group_generators(line)
    single = orbit_blocks(line, base_block(line), gens, threads=1)
    pooled = orbit_blocks(line, base_block(line), gens, threads=4)
    assert single == pooled == d93.blocks


@pytest.mark.parametrize(
    "q,m,t,lam",
    [(4, 2, 3, 4), (4, 4, 3, 1), (4, 2, 4, 1), (2, 2, 3, 1), (9, 3, 3, 9), (8, 2, 3, 8), (8, 2, 4, 1)],
)
def test_lambda_values(q: int, m: int, t: int, lam: int) -> None:
    report = verify_dd(design_for(q, m), t)
    assert report.passed, report.failures
    assert report.lambda_min == report.lambda_max == lam
    assert report.spera == lam and report.spera_consistent
    assert not report.sampled


def test_lambda4_fails_without_involution() -> None:
    report = verify_dd(design_for(9, 3), 4)
    assert not report.is_divisible_design
    assert report.lambda_min == 0


def test_sampled_verification_is_seeded(d93) -> None:
    first = verify_dd(d93, 3, sample_size=300, seed=7)
    second = verify_dd(d93, 3, sample_size=300, seed=7)
    assert first.sampled and first.tsets_checked == 300
    assert first.lambda_histogram == second.lambda_histogram == {9: 300}


def test_t_beyond_class_count_fails() -> None:
    report = verify_dd(design_for(2, 2), 4)
    assert not report.passed
    assert any("parallel classes" in f for f in report.failures)


def test_spera_examples() -> None:
    assert spera_lambda(gl2_order(4), gl2_order(4) // 256, 20, 4, 5, 3) == 4
    assert spera_lambda(gl2_order(4), gl2_order(4) // 64, 20, 4, 5, 3) == 1
    assert spera_lambda(10, 3, 6, 2, 3, 2) == Fraction(10, 3) * 3 / (3 * 4)
    with pytest.raises(ValueError):
        spera_lambda(0, 1, 20, 4, 5, 3)
    with pytest.raises(ValueError):
        spera_lambda(1, 1, 20, 3, 5, 3)
    with pytest.raises(ValueError):
        spera_lambda(1, 1, 20, 4, 5, 6)


def test_tampered_design_fails(d42) -> None:
    blocks = [list(b) for b in d42.blocks]
    first = blocks[0][0]
    twin = next(p for p in d42.parallel_classes[d42.class_of(first)] if p != first)
    blocks[0][1] = twin
    tampered = Design(line=d42.line, blocks=[tuple(b) for b in blocks])
    report = verify_dd(tampered, 3)
    assert not report.passed
    assert not report.blocks_nonparallel_ok
    assert any(f.startswith("block meets a parallel class twice") for f in report.failures)


def test_blocks_through_standard_triple(d42) -> None:
    through = blocks_through_triple(d42, 16, 0, 4)
    assert len(through) == 4
    assert all({0, 4, 16} <= set(block) for block in through)
    assert through == d42.blocks_containing((16, 0, 4))


def test_trace_and_fourth_point(d42) -> None:
    assert trace(d42, 16, 0, 4) == (0, 4, 16) == subline_points(d42.line)
    assert classify_fourth_point(d42, 16, 0, 4, 4) == 4
    assert classify_fourth_point(d42, 16, 0, 4, 8) == 1
    with pytest.raises(ParallelPointsError):
        classify_fourth_point(d42, 16, 0, 4, 1)
    with pytest.raises(ParallelPointsError):
        trace(d42, 16, 0, 1)


def test_trace_witness_maps_subline(d93) -> None:
    line = d93.line
    triple = (line.infinity_index, 5, 27)
    assert d93.nonparallel(triple)
    g, image = trace_witness(d93, *triple)
    assert image == trace(d93, *triple)
    assert len(image) == 4
    assert line.act(g, line.infinity) == line.points[triple[0]]


def test_fourth_point_needs_twist() -> None:
    d = design_for(4, 4)
    with pytest.raises(ValueError):
        classify_fourth_point(d, 16, 0, 4, 8)
    with pytest.raises(ValueError):
        fourth_point_census(d)


def test_census_involution(d42) -> None:
    report = fourth_point_census(d42)
    assert report.passed, report.failures
    details = report.details
    assert details['triples'] == 10 * 64
    assert details['branches']['in_trace']['witnesses'] == 3 * 640
    assert details['branches']['parallel_to_trace']['vacuous']
    assert details['branches']['other']['witnesses'] == 8 * 640
    assert details['in_trace_beyond_triple'] == 0
    assert details['subline_size'] == 3


def test_census_non_involutory_twist(d93) -> None:
    report = fourth_point_census(d93)
    assert report.passed, report.failures
    details = report.details
    triples = 120 * 729
    assert details['triples'] == triples
    assert details['in_trace_beyond_triple'] == triples
    assert details['branches']['parallel_to_trace']['witnesses'] == 8 * triples
    assert details['branches']['other']['witnesses'] == 54 * triples
    assert all(b['mismatches'] == 0 for b in details['branches'].values())


def test_census_sampled() -> None:
    report = fourth_point_census(design_for(8, 2), sample_size=200, seed=3)
    assert report.passed, report.failures
    assert report.details['triples'] == 200
    assert report.details['sampled'] and report.details['seed'] == 3


@pytest.mark.parametrize("q,m,classes", [(4, 2, 2), (9, 3, 6), (4, 4, 0)])
def test_u_hat_checks(q: int, m: int, classes: int) -> None:
    line = design_for(q, m).line
    assert check_u_hat_action(line).passed
    regular = check_regular_action(line)
    assert regular.passed
    assert regular.details == {'classes': classes, 'vacuous': classes == 0}


def test_json_round_trip(d42, tmp_path: Path) -> None:
    path = write_design(d42, tmp_path / "d.json")
    loaded = load_design(path)
    assert loaded.blocks == d42.blocks
    assert loaded.parallel_classes == d42.parallel_classes
    assert dumps(design_to_dict(loaded)) == path.read_text(encoding="utf-8")
    data = json.loads(path.read_text(encoding="utf-8"))
    assert (data['v'], data['s'], data['k'], data['lambda3']) == (20, 4, 5, 4)
    assert data['field']['m'] == data['m'] == 2


def test_incidence_export() -> None:
    d = design_for(2, 2)
    rows = incidence_text(d).splitlines()
    assert len(rows) == 6
    assert all(len(row) == 8 and set(row) <= {'0', '1'} for row in rows)
    assert all(row.count('1') == 4 for row in rows)
    assert all(sum(row[j] == '1' for row in rows) == 3 for j in range(8))


def test_malformed_files_rejected(d42, tmp_path: Path) -> None:
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(DesignFormatError):
        load_design(broken)

    data = design_to_dict(d42)
    del data['blocks']
    with pytest.raises(DesignFormatError, match="missing keys"):
        design_from_dict(data)

    data = design_to_dict(d42)
    data['points'][0], data['points'][1] = data['points'][1], data['points'][0]
    with pytest.raises(DesignFormatError, match="legend"):
        design_from_dict(data)

    data = design_to_dict(d42)
    data['blocks'][0][0] = 99
    with pytest.raises(DesignFormatError):
        design_from_dict(data)


def test_design_cache(d42, tmp_path: Path) -> None:
    cache = DesignCache(tmp_path / "cache")
    assert cache.get(d42.ring) is None
    cache.set(d42)
    cached = cache.get(d42.ring)
    assert cached is not None and cached.blocks == d42.blocks
    other = ring_new(field_from_order(4), 4)
    assert cache.key(other) != cache.key(d42.ring)
    assert cache.get(other) is None

    cache._get_cache_file(d42.ring).write_text("garbage", encoding="utf-8")
    assert cache.get(d42.ring) is None
    assert not cache._get_cache_file(d42.ring).exists()


@pytest.mark.parametrize("key,value", [('lambda3', 7), ('k', 6), ('s', 5)])
def test_header_must_match_blocks(d42, key: str, value: int) -> None:
    data = design_to_dict(d42)
    data[key] = value
    with pytest.raises(DesignFormatError, match=key):
        design_from_dict(data)


def test_field_twist_must_match(d42) -> None:
    data = design_to_dict(d42)
    data['field']['m'] = 4
    with pytest.raises(DesignFormatError, match="field m"):
        design_from_dict(data)


@pytest.mark.parametrize("q,m", [(4, 2), (4, 4), (2, 2), (9, 3), (8, 2)])
def test_transversal_lambda3_matches_spera(q: int, m: int) -> None:
    p = design_for(q, m).params
    order = gl2_order(q)
    spera = spera_lambda(order, order // p.b, p.v, p.s, p.k, 3)
    assert transversal_lambda3(p.b, p.s) == p.lambda3 == spera


def test_cache_clear(d42, tmp_path: Path) -> None:
    cache = DesignCache(tmp_path / "cache")
    cache.set(d42)
    cache.set(design_for(4, 4))
    assert len(list((tmp_path / "cache").glob("*.json"))) == 2
    cache.clear()
    assert list((tmp_path / "cache").glob("*.json")) == []
    assert cache.get(d42.ring) is None
