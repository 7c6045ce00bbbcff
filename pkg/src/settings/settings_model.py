import logging
import math

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
    YamlConfigSettingsSource,
)

logger = logging.getLogger(__name__)


class OptimizerConfig(BaseModel):
    """Alignment driver configuration: band schedule, seeding, Newton and shift search."""

    # BASIS
    l_max: int = Field(42, description="Degree band limit L_max of both expansions", ge=0)
    lambda_cut: float | None = Field(None, description="Explicit eigen-frequency cutoff. None derives it from the grid size", gt=0.0)
    nyquist_fraction: float = Field(1.0, description="Fraction of the grid Nyquist frequency used as default cutoff", gt=0.0, le=1.0)
    max_coefficient_fraction: float = Field(0.25, description="Cap on the coefficient count as a fraction of N^3", gt=0.0, le=1.0)

    # BANDS
    band_thresholds: list[float] = Field(default_factory=lambda: [0.5, 0.25, 0.05], description="Energy-ratio thresholds used when no fixed bands are given", min_length=1)
    fixed_bands: list[int] | None = Field(default_factory=lambda: [7, 12, 33], description="Explicit band schedule. None selects bands from the energy ratio")

    # SEEDING
    seed_grid_step: float = Field(math.pi / 8, description="Euler grid step (radians) at the lowest band", gt=0.0)
    max_candidates: int = Field(20, description="Number of seeded candidates refined per shift", ge=1)

    # NEWTON
    newton_max_iter: int = Field(30, description="Newton iterations per band", ge=1)
    grad_tol: float = Field(1e-7, description="Gradient tolerance relative to the correlation magnitude", gt=0.0)
    step_damping: float = Field(1e-3, description="Initial Levenberg parameter relative to the Hessian scale", gt=0.0)
    max_step: float = Field(0.35, description="Largest Euler-angle step (radians) taken by one Newton update", gt=0.0)
    prune_after_band: int | None = Field(None, description="Keep only this many candidates after each band. None refines all of them", ge=1)

    # SHIFTS
    shift_radius: int = Field(4, description="Shift search radius in voxels (per axis)", ge=0)
    shift_step: int = Field(2, description="Coarse shift grid step in voxels", ge=1)

    # RUNTIME
    workers: int | None = Field(None, description="Worker threads for the shift search. None uses all cores", ge=1)

    model_config = ConfigDict(frozen=True, extra="forbid")

    @field_validator("band_thresholds")
    @classmethod
    def check_thresholds(cls, v: list[float]) -> list[float]:
        if any(not 0.0 < t < 1.0 for t in v):
            raise ValueError(f"band thresholds must lie in (0, 1), got {v}")
        if any(b >= a for a, b in zip(v, v[1:], strict=False)):
            raise ValueError(f"band thresholds must be strictly decreasing, got {v}")
        return v

    @field_validator("fixed_bands")
    @classmethod
    def check_bands(cls, v: list[int] | None) -> list[int] | None:
        if v is None:
            return v
        if not v:
            raise ValueError("fixed_bands must be non-empty or None")
        if any(b < 0 for b in v):
            raise ValueError(f"bands must be non-negative, got {v}")
        if any(b <= a for a, b in zip(v, v[1:], strict=False)):
            raise ValueError(f"bands must be strictly increasing, got {v}")
        return v

    @model_validator(mode="after")
    def check_bands_within_limit(self) -> "OptimizerConfig":
        if self.fixed_bands is not None and self.fixed_bands[-1] > self.l_max:
            raise ValueError(f"band {self.fixed_bands[-1]} exceeds l_max={self.l_max}")
        return self


class PhantomSettings(BaseModel):
    """Defaults for synthetic phantom generation."""

    generator: str = Field("philox", description="Counter-based bit generator pinned for reproducible phantoms")
    blobs: int = Field(8, description="Number of anisotropic Gaussian blobs", ge=1)
    support_radius: float = Field(0.8, description="Radius (unit-ball coordinates) containing every blob out to 3 sigma", gt=0.0, lt=1.0)
    sigma_range: tuple[float, float] = Field((0.06, 0.15), description="Per-axis Gaussian width range in unit-ball coordinates")
    amplitude_range: tuple[float, float] = Field((0.5, 1.0), description="Blob amplitude range")

    model_config = ConfigDict(frozen=True, extra="forbid")

    @field_validator("generator")
    @classmethod
    def check_generator(cls, v: str) -> str:
        if v.lower() != "philox":
            raise ValueError(f"only the 'philox' generator is supported, got {v!r}")
        return v.lower()


class WedgeSettings(BaseModel):
    """Missing-wedge geometry defaults (beam along z)."""

    theta_max: float = Field(60.0, description="Half-angle of the tilt range in degrees", gt=0.0, le=90.0)
    tilt_axis: tuple[float, float, float] = Field((0.0, 1.0, 0.0), description="Tilt axis (x, y, z)")

    model_config = ConfigDict(frozen=True, extra="forbid")


class LoggingSettings(BaseModel):
    level: str = Field("INFO", description="Root log level")
    file: str | None = Field(None, description="Optional log file")

    model_config = ConfigDict(frozen=True, extra="forbid")


class AppSettings(BaseSettings):
    """Application configuration from YAML."""

    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    phantom: PhantomSettings = Field(default_factory=PhantomSettings)
    wedge: WedgeSettings = Field(default_factory=WedgeSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)

    model_config = SettingsConfigDict(
        frozen=True,
        extra="forbid",
        validate_default=True,
        case_sensitive=False,
        env_prefix="BALLALIGN_",
        env_nested_delimiter="__",
        yaml_file="settings/config.yaml",
        yaml_file_encoding="utf-8",
        nested_model_default_partial_update=True,
    )

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        logger.debug(f"Settings loaded: l_max={self.optimizer.l_max}, bands={self.optimizer.fixed_bands}, shift_radius={self.optimizer.shift_radius}")

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        """
        Customize settings sources to include YAML file loading.

        Sources are applied in order (first source wins for conflicts).
        Priority: init_settings > YAML > env > dotenv > file_secret
        """
        return (
            init_settings,
            YamlConfigSettingsSource(settings_cls),
            env_settings,
            dotenv_settings,
            file_secret_settings,
        )
