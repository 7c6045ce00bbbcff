"""
Cubic voxel volume sampled on [-1, 1]^3.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator


class Volume(BaseModel):
    """
    Real-valued N x N x N voxel grid with a physical voxel size.

    Data are indexed data[z, y, x] (MRC order, x fastest). Voxel (iz, iy, ix) sits at
    unit-ball coordinates ((ix - N/2)/(N/2), (iy - N/2)/(N/2), (iz - N/2)/(N/2)).
    """

    data: np.ndarray = Field(..., description="Voxel values indexed [z, y, x]")
    voxel_size: float = Field(1.0, description="Physical units per voxel", gt=0.0)

    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)

    @field_validator("data", mode="before")
    @classmethod
    def check_data(cls, v) -> np.ndarray:
        arr = np.array(v, dtype=np.float64)
        if arr.ndim != 3 or len(set(arr.shape)) != 1:
            raise ValueError(f"volume must be a cubic 3D grid, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("volume contains non-finite values")
        arr.setflags(write=False)
        return arr

    @property
    def n(self) -> int:
        return int(self.data.shape[0])

    def with_data(self, data: np.ndarray) -> "Volume":
        """Return a volume with the same voxel size and new values."""
        return Volume(data=data, voxel_size=self.voxel_size)

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))


def grid_coordinates(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Unit-ball coordinates of every voxel of an n^3 grid.

    Returns:
        Arrays (x, y, z), each of shape (n, n, n) and indexed [z, y, x]
    """
    half = n / 2.0
    axis = (np.arange(n) - half) / half
    z, y, x = np.meshgrid(axis, axis, axis, indexing="ij")
    return x, y, z
