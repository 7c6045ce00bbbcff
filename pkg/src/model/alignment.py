"""
Results of rotation refinement and of the full shift-and-rotation search.
"""

from pydantic import BaseModel, ConfigDict, Field

from .rotation import Rotation


class TraceEntry(BaseModel):
    """One accepted iterate of the band-marching refinement."""

    band: int = Field(..., ge=0)
    iteration: int = Field(..., ge=0)
    euler: tuple[float, float, float] = Field(..., description="ZYZ angles of the iterate in radians")
    score: float
    gradient_norm: float = Field(..., ge=0.0)
    step: str = Field("newton", description="'start', 'newton' or 'gradient'")

    model_config = ConfigDict(frozen=True, extra="forbid")


class RefinementResult(BaseModel):
    """Outcome of refining one candidate rotation over a band schedule."""

    rotation: Rotation
    score: float = Field(..., description="Unnormalized correlation at the last band")
    start: Rotation
    start_score: float = Field(..., description="Correlation of the start rotation at the last band")
    converged: bool
    diverged: bool = Field(False, description="A band ended because no ascent step could be found")
    trace: list[TraceEntry] = Field(default_factory=list)
    evaluations_per_band: dict[int, int] = Field(default_factory=dict)

    model_config = ConfigDict(frozen=True, extra="forbid")


class AlignmentResult(BaseModel):
    """
    Best shift and rotation found by align.

    rotation maps the subtomogram onto the template: <t, R_rotation f_shift> is maximal.
    """

    shift: tuple[int, int, int]
    rotation: Rotation
    score: float = Field(..., description="Correlation normalized by the band-limited norms")
    raw_score: float = Field(..., description="Unnormalized correlation at the last band")
    bands: list[int]
    candidates_evaluated: int = Field(..., ge=0)
    shifts_evaluated: int = Field(..., ge=0)
    evaluations_per_band: dict[int, int] = Field(default_factory=dict)
    wall_time: float = Field(..., ge=0.0)
    timings: dict[str, float] = Field(default_factory=dict, description="Seconds spent per phase")
    converged: bool
    trace: list[TraceEntry] = Field(default_factory=list)

    model_config = ConfigDict(frozen=True, extra="forbid")

    @property
    def total_evaluations(self) -> int:
        return sum(self.evaluations_per_band.values())


class RotationSearch(BaseModel):
    """Seeding plus refinement of every candidate at one shift."""

    best: RefinementResult
    bands: list[int]
    candidates: int = Field(..., ge=0)
    evaluations_per_band: dict[int, int] = Field(default_factory=dict)

    model_config = ConfigDict(frozen=True, extra="forbid")
