"""Chain-geometry divisible designs: construction, verification, export."""
from .builder import (
    base_block,
    build_design,
    exhaustive_blocks_oracle,
    group_generators,
    orbit_blocks,
)
from .serialization import DesignFormatError, load_design, write_design, write_incidence
from .structure import Design, DesignParameters
from .traces import (
    blocks_through_triple,
    classify_fourth_point,
    fourth_point_census,
    trace,
)
from .verifier import VerificationReport, gl2_order, spera_lambda, verify_dd

__all__ = [
    'Design',
    'DesignFormatError',
    'DesignParameters',
    'VerificationReport',
    'base_block',
    'blocks_through_triple',
    'build_design',
    'classify_fourth_point',
    'exhaustive_blocks_oracle',
    'fourth_point_census',
    'gl2_order',
    'group_generators',
    'load_design',
    'orbit_blocks',
    'spera_lambda',
    'trace',
    'verify_dd',
    'write_design',
    'write_incidence',
]
