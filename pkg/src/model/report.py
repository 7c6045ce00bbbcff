"""
Machine-readable reports written by the command-line front end.
"""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field

from .alignment import TraceEntry


class RunReport(BaseModel):
    """JSON report of one align run."""

    version: str
    template: str
    subtomo: str
    config: dict[str, Any] = Field(..., description="Echo of the optimizer configuration used")
    wedge_theta: float | None = None
    shift: tuple[int, int, int]
    quaternion: tuple[float, float, float, float]
    euler_zyz_degrees: tuple[float, float, float]
    score: float
    raw_score: float
    converged: bool
    bands: list[int]
    candidates_evaluated: int
    shifts_evaluated: int
    evaluations_per_band: dict[int, int]
    energy_ratios: list[float] = Field(..., description="energy_ratio(xi, L) for L = 0..l_max at the best shift")
    timings: dict[str, float] = Field(default_factory=dict)
    wall_time: float
    trace: list[TraceEntry] = Field(default_factory=list)
    geodesic_error_deg: float | None = Field(None, description="Filled when a ground-truth file is supplied")
    shift_error: tuple[int, int, int] | None = None

    model_config = ConfigDict(frozen=True, extra="forbid")


class MethodStats(BaseModel):
    """Cost and accuracy of one rotation-search method in a benchmark."""

    evaluations: int
    wall_time: float
    quaternion: tuple[float, float, float, float]
    score: float
    geodesic_error_deg: float | None = None

    model_config = ConfigDict(frozen=True, extra="forbid")


class BenchReport(BaseModel):
    """JSON report comparing band-marching refinement to the exhaustive Euler grid."""

    version: str
    l_max: int
    l_cut: int = Field(..., description="Band the exhaustive baseline is evaluated at")
    baseline_step_deg: float
    shift: tuple[int, int, int]
    ours: MethodStats
    baseline: MethodStats
    evaluation_ratio: float = Field(..., description="Baseline evaluations over ours")
    methods_agreement_deg: float = Field(..., description="Geodesic distance between the two answers")

    model_config = ConfigDict(frozen=True, extra="forbid")
