"""
Data models for volumes, expansions, rotations, correlation kernels and results.
"""

from .alignment import AlignmentResult, RefinementResult, RotationSearch, TraceEntry
from .basis import BallExpansion, BasisIndex, BasisSpec
from .correlation import WedgeMask, XiBlocks
from .phantom import GroundTruth, MrcHeader, PhantomSpec
from .report import BenchReport, MethodStats, RunReport
from .rotation import Rotation, WignerStack
from .volume import Volume, grid_coordinates

__all__ = [
    "Volume",
    "grid_coordinates",
    "BasisIndex",
    "BasisSpec",
    "BallExpansion",
    "Rotation",
    "WignerStack",
    "XiBlocks",
    "WedgeMask",
    "TraceEntry",
    "RefinementResult",
    "RotationSearch",
    "AlignmentResult",
    "PhantomSpec",
    "GroundTruth",
    "MrcHeader",
    "RunReport",
    "MethodStats",
    "BenchReport",
]
