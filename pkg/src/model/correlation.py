"""
Cross-correlation kernel and missing-wedge mask.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class XiBlocks(BaseModel):
    """
    Rotation-independent kernel xi^s_{l,m,m'} of the correlation at one shift s.

    blocks[l] has shape (2l+1, 2l+1), indexed [m + l, m' + l].
    """

    l_max: int = Field(..., ge=0)
    blocks: tuple[np.ndarray, ...]
    shift: tuple[int, int, int] = Field((0, 0, 0), description="Shift (x, y, z) in voxels the kernel was built for")

    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)

    @field_validator("blocks", mode="before")
    @classmethod
    def freeze_blocks(cls, v) -> tuple[np.ndarray, ...]:
        out = []
        for block in v:
            arr = np.array(block, dtype=np.complex128)
            arr.setflags(write=False)
            out.append(arr)
        return tuple(out)

    @model_validator(mode="after")
    def check_blocks(self) -> "XiBlocks":
        if len(self.blocks) != self.l_max + 1:
            raise ValueError(f"expected {self.l_max + 1} blocks, got {len(self.blocks)}")
        for l, block in enumerate(self.blocks):
            if block.shape != (2 * l + 1, 2 * l + 1):
                raise ValueError(f"block {l} has shape {block.shape}")
            if not np.all(np.isfinite(block)):
                raise ValueError(f"block {l} has non-finite entries")
        return self

    def energy_per_degree(self) -> np.ndarray:
        return np.array([float(np.sum(np.abs(b) ** 2)) for b in self.blocks])


class WedgeMask(BaseModel):
    """
    Binary Fourier-space mask of the measured region for a single-axis tilt series.

    values is laid out like numpy's unshifted FFT of an n^3 volume indexed [z, y, x];
    the beam runs along z.
    """

    n: int = Field(..., ge=1)
    theta_max: float = Field(..., description="Half-angle of the tilt range in degrees", gt=0.0, le=90.0)
    tilt_axis: tuple[float, float, float]
    values: np.ndarray

    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)

    @field_validator("values", mode="before")
    @classmethod
    def freeze_values(cls, v) -> np.ndarray:
        arr = np.array(v, dtype=np.float64)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def check_values(self) -> "WedgeMask":
        if self.values.shape != (self.n,) * 3:
            raise ValueError(f"mask shape {self.values.shape} does not match n={self.n}")
        if not np.all((self.values == 0.0) | (self.values == 1.0)):
            raise ValueError("mask values must be 0 or 1")
        return self

    @property
    def kept_fraction(self) -> float:
        return float(self.values.mean())
