"""
Steering of ball-harmonics expansions by Wigner-D matrices.
"""

from src.model.rotation import Rotation, WignerStack

from .steering import rotate_blocks, rotate_expansion, wigner_D, wigner_D_euler, wigner_D_grad, wigner_D_grad_euler
from .wigner import wigner_d_small, wigner_d_small_derivative, wigner_d_stack, wigner_d_with_derivatives

__all__ = [
    "Rotation",
    "WignerStack",
    "wigner_d_small",
    "wigner_d_small_derivative",
    "wigner_d_stack",
    "wigner_d_with_derivatives",
    "wigner_D",
    "wigner_D_euler",
    "wigner_D_grad",
    "wigner_D_grad_euler",
    "rotate_blocks",
    "rotate_expansion",
]
