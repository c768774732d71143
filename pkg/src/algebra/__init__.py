"""Finite fields and twisted dual numbers."""
from .field import (
    Automorphism,
    FieldSpec,
    automorphism_new,
    enumerate_field,
    field_from_order,
    field_inv,
    field_mul,
    field_new,
    frobenius,
    norm_to_fixed,
)
from .ring import (
    NonUnitError,
    RingElement,
    RingSpec,
    decompose_unit,
    normalizer_of_Kstar,
    ring_inv,
    ring_mul,
    ring_new,
)

__all__ = [
    'Automorphism',
    'FieldSpec',
    'NonUnitError',
    'RingElement',
    'RingSpec',
    'automorphism_new',
    'decompose_unit',
    'enumerate_field',
    'field_from_order',
    'field_inv',
    'field_mul',
    'field_new',
    'frobenius',
    'norm_to_fixed',
    'normalizer_of_Kstar',
    'ring_inv',
    'ring_mul',
    'ring_new',
]
