"""
Rotations in SO(3) and stacks of Wigner-D blocks.
"""

import warnings

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.spatial.transform import Rotation as ScipyRotation


class Rotation(BaseModel):
    """
    Element of SO(3) stored as a unit quaternion (w, x, y, z).

    The quaternion is normalized and sign-canonicalized (w >= 0) on construction, so q and
    -q yield the same value. Euler angles follow the active ZYZ convention
    R = Rz(alpha) Ry(beta) Rz(gamma) with 0 <= beta <= pi.
    """

    q: tuple[float, float, float, float] = Field(..., description="Unit quaternion, scalar first")

    model_config = ConfigDict(frozen=True, extra="forbid")

    @field_validator("q", mode="before")
    @classmethod
    def normalize(cls, v) -> tuple[float, float, float, float]:
        arr = np.asarray(v, dtype=np.float64).reshape(-1)
        if arr.size != 4 or not np.all(np.isfinite(arr)):
            raise ValueError(f"quaternion must be 4 finite numbers, got {v}")
        norm = np.linalg.norm(arr)
        if norm < 1e-12:
            raise ValueError("quaternion has zero norm")
        arr = arr / norm
        # canonical hemisphere; ties broken on the first non-zero component
        nonzero = np.flatnonzero(np.abs(arr) > 0.0)
        if arr[nonzero[0]] < 0.0:
            arr = -arr
        return tuple(float(c) for c in arr)

    @classmethod
    def identity(cls) -> "Rotation":
        return cls(q=(1.0, 0.0, 0.0, 0.0))

    @classmethod
    def from_scipy(cls, rot: ScipyRotation) -> "Rotation":
        return cls(q=rot.as_quat(scalar_first=True))

    @classmethod
    def from_euler(cls, alpha: float, beta: float, gamma: float) -> "Rotation":
        """Active ZYZ Euler angles in radians."""
        return cls.from_scipy(ScipyRotation.from_euler("ZYZ", [alpha, beta, gamma]))

    @classmethod
    def from_euler_degrees(cls, alpha: float, beta: float, gamma: float) -> "Rotation":
        return cls.from_euler(*np.deg2rad([alpha, beta, gamma]))

    @classmethod
    def from_axis_angle(cls, axis, angle: float) -> "Rotation":
        axis = np.asarray(axis, dtype=np.float64)
        return cls.from_scipy(ScipyRotation.from_rotvec(angle * axis / np.linalg.norm(axis)))

    @classmethod
    def random(cls, rng: np.random.Generator) -> "Rotation":
        """Haar-uniform random rotation."""
        return cls(q=rng.standard_normal(4))

    def to_scipy(self) -> ScipyRotation:
        return ScipyRotation.from_quat(self.q, scalar_first=True)

    def matrix(self) -> np.ndarray:
        return self.to_scipy().as_matrix()

    @property
    def euler(self) -> tuple[float, float, float]:
        """ZYZ angles (alpha, beta, gamma) in radians, beta in [0, pi]."""
        with warnings.catch_warnings():
            # gimbal lock is expected at beta in {0, pi}; scipy then zeroes gamma
            warnings.simplefilter("ignore", UserWarning)
            alpha, beta, gamma = self.to_scipy().as_euler("ZYZ")
        return float(alpha), float(beta), float(gamma)

    def euler_degrees(self) -> tuple[float, float, float]:
        return tuple(float(a) for a in np.rad2deg(self.euler))

    def compose(self, other: "Rotation") -> "Rotation":
        """self o other: apply other first, then self."""
        return Rotation.from_scipy(self.to_scipy() * other.to_scipy())

    def inverse(self) -> "Rotation":
        w, x, y, z = self.q
        return Rotation(q=(w, -x, -y, -z))

    @property
    def angle(self) -> float:
        """Rotation angle in radians, in [0, pi]."""
        w = self.q[0]
        return float(2.0 * np.arctan2(np.linalg.norm(self.q[1:]), abs(w)))


class WignerStack(BaseModel):
    """
    Per-degree complex matrices indexed [m + l, m' + l] for l = 0..l_max.

    Holds D^l(g) or one of its Euler-angle derivatives.
    """

    l_max: int = Field(..., ge=0)
    blocks: tuple[np.ndarray, ...]

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
    def check_shapes(self) -> "WignerStack":
        if len(self.blocks) != self.l_max + 1:
            raise ValueError(f"expected {self.l_max + 1} blocks, got {len(self.blocks)}")
        for l, block in enumerate(self.blocks):
            if block.shape != (2 * l + 1, 2 * l + 1):
                raise ValueError(f"block {l} has shape {block.shape}")
        return self

    def unitarity_error(self) -> float:
        """max_l ||D^l (D^l)^H - I||_inf."""
        return max(float(np.max(np.abs(b @ b.conj().T - np.eye(b.shape[0])))) for b in self.blocks)

    def matmul(self, other: "WignerStack") -> "WignerStack":
        return WignerStack(l_max=self.l_max, blocks=[a @ b for a, b in zip(self.blocks, other.blocks, strict=True)])
