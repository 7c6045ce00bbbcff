"""
Synthetic phantom description, its ground truth, and the MRC header view.
"""

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .rotation import Rotation


class PhantomSpec(BaseModel):
    """
    Recipe for a seeded Gaussian-blob template and its corrupted copy.

    The subtomogram is T_shift R_rotation template, optionally wedge-filtered and noisy.
    """

    n: int = Field(..., description="Grid size (even, >= 8)", ge=8)
    blobs: int = Field(8, description="Number of anisotropic Gaussian blobs", ge=1)
    support_radius: float = Field(0.8, description="Blob centers stay within this radius minus 3 sigma", gt=0.0, lt=1.0)
    sigma_range: tuple[float, float] = Field((0.06, 0.15), description="Blob axis standard deviations in unit-ball coordinates")
    amplitude_range: tuple[float, float] = Field((0.5, 1.0))
    seed: int = 0
    snr: float | None = Field(None, description="Signal variance over noise variance inside the support ball", gt=0.0)
    wedge_theta: float | None = Field(None, description="Half-angle of the tilt range in degrees", gt=0.0, le=90.0)
    true_rotation: Rotation = Field(default_factory=Rotation.identity)
    true_shift: tuple[int, int, int] = (0, 0, 0)
    generator: str = Field("philox", description="Name of the pinned bit generator")

    model_config = ConfigDict(frozen=True, extra="forbid")

    @field_validator("n")
    @classmethod
    def check_even(cls, v: int) -> int:
        if v % 2:
            raise ValueError(f"grid size must be even, got {v}")
        return v

    @field_validator("sigma_range", "amplitude_range")
    @classmethod
    def check_range(cls, v: tuple[float, float]) -> tuple[float, float]:
        if not 0.0 < v[0] <= v[1]:
            raise ValueError(f"range must satisfy 0 < low <= high, got {v}")
        return v

    @model_validator(mode="after")
    def check_support(self) -> "PhantomSpec":
        if self.support_radius - 3.0 * self.sigma_range[1] <= 0.0:
            raise ValueError("support_radius leaves no room for blob centers at the largest sigma")
        return self


class GroundTruth(BaseModel):
    """Contents of truth.json written next to a generated phantom pair."""

    quaternion: tuple[float, float, float, float] = Field(..., description="True rotation, scalar first")
    euler_zyz_degrees: tuple[float, float, float]
    shift: tuple[int, int, int]
    n: int
    seed: int
    snr: float | None = None
    wedge_theta: float | None = None
    generator: str = "philox"

    model_config = ConfigDict(frozen=True, extra="forbid")

    @classmethod
    def from_spec(cls, spec: PhantomSpec) -> "GroundTruth":
        return cls(
            quaternion=spec.true_rotation.q,
            euler_zyz_degrees=spec.true_rotation.euler_degrees(),
            shift=spec.true_shift,
            n=spec.n,
            seed=spec.seed,
            snr=spec.snr,
            wedge_theta=spec.wedge_theta,
            generator=spec.generator,
        )

    def rotation(self) -> Rotation:
        return Rotation(q=self.quaternion)

    def expected_alignment(self) -> Rotation:
        """Rotation align should report: the inverse of the one applied to the template."""
        return self.rotation().inverse()


class MrcHeader(BaseModel):
    """Fields of the 1024-byte MRC2014 header that the reader checks and the writer fills."""

    nx: int = Field(..., ge=1)
    ny: int = Field(..., ge=1)
    nz: int = Field(..., ge=1)
    mode: int
    cell: tuple[float, float, float] = Field(..., description="Cell dimensions in physical units")
    map_stamp: bytes = b"MAP "
    machine_stamp: bytes = b"\x44\x44\x00\x00"
    dmin: float = 0.0
    dmax: float = 0.0
    dmean: float = 0.0
    extended_header_bytes: int = Field(0, ge=0)

    model_config = ConfigDict(frozen=True, extra="forbid")

    @field_validator("mode")
    @classmethod
    def check_mode(cls, v: int) -> int:
        if v not in (0, 1, 2, 6):
            raise ValueError(f"unsupported MRC mode {v}")
        return v

    @property
    def voxel_size(self) -> float:
        return self.cell[0] / self.nx if self.cell[0] > 0 else 1.0
