"""
Cross-correlation kernel, its evaluation with derivatives, energy ratio and missing-wedge filtering.
"""

from .energy import ZeroEnergyError, energy_ratio, energy_ratios, eval_cost_fraction
from .kernel import (
    GimbalLockError,
    SpecMismatchError,
    euler_grid_angles,
    euler_grid_shape,
    evaluate,
    evaluate_complex,
    evaluate_euler_complex,
    evaluate_grid,
    gradient,
    hessian,
    value_and_derivatives,
    xi_coefficients,
)
from .wedge import GridSizeMismatchError, apply_wedge, build_wedge_mask

__all__ = [
    "SpecMismatchError",
    "GimbalLockError",
    "ZeroEnergyError",
    "GridSizeMismatchError",
    "xi_coefficients",
    "evaluate",
    "evaluate_complex",
    "evaluate_euler_complex",
    "value_and_derivatives",
    "gradient",
    "hessian",
    "euler_grid_shape",
    "euler_grid_angles",
    "evaluate_grid",
    "energy_ratio",
    "energy_ratios",
    "eval_cost_fraction",
    "build_wedge_mask",
    "apply_wedge",
]
