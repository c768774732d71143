"""Finite geometry: linear algebra over GF(q), the projective line over R, the Klein model."""
