"""Design JSON and incidence-matrix export."""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from ..algebra.field import field_new
from ..algebra.ring import ring_new
from ..geometry.projline import ProjectiveLine
from .structure import Design

logger = logging.getLogger(__name__)

REQUIRED_KEYS = ('field', 'm', 'v', 's', 'k', 'lambda3', 'points', 'parallel_classes', 'blocks')


class DesignFormatError(ValueError):
    """A design file that does not follow the design JSON schema."""


def _header(design: Design) -> dict[str, Any]:
    """The parameter fields a design file declares about its blocks."""
    params = design.params
    lambda3 = params.lambda3
    return {
        's': params.s,
        'k': params.k,
        'lambda3': int(lambda3) if lambda3.denominator == 1 else str(lambda3),
    }


def design_to_dict(design: Design) -> dict[str, Any]:
    params = design.params
    field_info = design.ring.field.to_dict()
    field_info['m'] = design.m
    return {
        'field': field_info,
        'm': design.m,
        'v': params.v,
        **_header(design),
        'points': design.line.legend(),
        'parallel_classes': [sorted(c) for c in design.parallel_classes],
        'blocks': [list(block) for block in design.blocks],
    }


def dumps(data: dict[str, Any]) -> str:
    """Canonical JSON: sorted keys, compact separators, trailing newline."""
    return json.dumps(data, sort_keys=True, separators=(',', ':')) + '\n'


def write_design(design: Design, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(design_to_dict(design)), encoding='utf-8')
    logger.info(f"Wrote design with {len(design.blocks)} blocks to {path}")
    return path


def _index_lists(data: Any, name: str, v: int) -> list[list[int]]:
    if not isinstance(data, list):
        raise DesignFormatError(f"'{name}' must be a list of index lists")
    result = []
    for entry in data:
        if not isinstance(entry, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in entry):
            raise DesignFormatError(f"'{name}' contains a non-integer entry: {entry!r}")
        if any(not 0 <= i < v for i in entry):
            raise DesignFormatError(f"'{name}' contains a point index outside [0, {v})")
        result.append(list(entry))
    return result


def design_from_dict(data: dict[str, Any]) -> Design:
    if not isinstance(data, dict):
        raise DesignFormatError("design file must hold a JSON object")
    missing = [key for key in REQUIRED_KEYS if key not in data]
    if missing:
        raise DesignFormatError(f"design file is missing keys: {', '.join(missing)}")
    info = data['field']
    try:
        field = field_new(int(info['p']), int(info['n']), [int(c) for c in info['modulus']])
        ring = ring_new(field, int(data['m']))
    except (KeyError, TypeError, ValueError) as e:
        raise DesignFormatError(f"invalid field description: {e}") from e
    if 'm' in info and info['m'] != data['m']:
        raise DesignFormatError(f"field m={info['m']} does not match m={data['m']}")

    line = ProjectiveLine(ring)
    if data['v'] != line.v:
        raise DesignFormatError(f"v={data['v']} does not match q^2 + q = {line.v}")
    if data['points'] != line.legend():
        raise DesignFormatError("point legend does not match the canonical point order")
    classes = _index_lists(data['parallel_classes'], 'parallel_classes', line.v)
    blocks = _index_lists(data['blocks'], 'blocks', line.v)
    design = Design(line=line, blocks=[tuple(b) for b in blocks], parallel_classes=classes)
    for key, value in _header(design).items():
        if data[key] != value:
            raise DesignFormatError(f"{key}={data[key]!r} does not match the blocks ({key}={value!r})")
    return design


def load_design(path: Path) -> Design:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except json.JSONDecodeError as e:
        raise DesignFormatError(f"{path}: not valid JSON ({e})") from e
    design = design_from_dict(data)
    logger.info(f"Loaded design over {design.ring.describe()} with {len(design.blocks)} blocks from {path}")
    return design


def incidence_text(design: Design) -> str:
    """v rows of b characters '0'/'1'; row i, column j is 1 iff point i is on block j."""
    chars = np.where(design.incidence_matrix() == 1, '1', '0')
    return '\n'.join(''.join(row) for row in chars) + '\n'


def write_incidence(design: Design, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(incidence_text(design), encoding='utf-8')
    logger.info(f"Wrote {design.line.v}x{len(design.blocks)} incidence matrix to {path}")
    return path
