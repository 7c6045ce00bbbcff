"""
Ball-harmonics basis: Bessel zeros, spherical harmonics, quadrature and volume expansion.
"""

from .bessel import bessel_zero, radial_function, radial_norm, zero_table, zeros_below
from .expansion import EmptyBasisError, build_spec, default_lambda_cut, expand, lowpass, sample_at_nodes, synthesize, truncated
from .harmonics import associated_block, harmonic_block, spherical_harmonic
from .quadrature import QuadratureGrid, project, quadrature_grid

__all__ = [
    "bessel_zero",
    "radial_norm",
    "radial_function",
    "zero_table",
    "zeros_below",
    "spherical_harmonic",
    "harmonic_block",
    "associated_block",
    "QuadratureGrid",
    "quadrature_grid",
    "project",
    "EmptyBasisError",
    "build_spec",
    "default_lambda_cut",
    "expand",
    "synthesize",
    "lowpass",
    "truncated",
    "sample_at_nodes",
]
