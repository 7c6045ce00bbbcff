"""
Ball-harmonics basis description and expansion coefficients.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class BasisIndex(BaseModel):
    """Index (k, l, m) of one ball harmonic psi_{k,l,m}."""

    k: int = Field(..., description="Radial index", ge=1)
    l: int = Field(..., description="Degree", ge=0)
    m: int = Field(..., description="Order")

    model_config = ConfigDict(frozen=True, extra="forbid")

    @model_validator(mode="after")
    def check_order(self) -> "BasisIndex":
        if abs(self.m) > self.l:
            raise ValueError(f"order m={self.m} outside [-{self.l}, {self.l}]")
        return self


def _frozen_tuple(blocks, dtype) -> tuple[np.ndarray, ...]:
    out = []
    for block in blocks:
        arr = np.array(block, dtype=dtype)
        arr.setflags(write=False)
        out.append(arr)
    return tuple(out)


class BasisSpec(BaseModel):
    """
    Retained part of the frequency-ordered basis.

    roots[l][k-1] is lambda_{l,k}, the k-th positive zero of j_l, and norms[l][k-1] the
    matching radial normalization c_{l,k}. Every l <= l_max has an entry, possibly empty.
    """

    l_max: int = Field(..., description="Degree band limit", ge=0)
    lambda_cut: float = Field(..., description="Eigen-frequency cutoff", gt=0.0)
    roots: tuple[np.ndarray, ...] = Field(..., description="Retained Bessel zeros per degree")
    norms: tuple[np.ndarray, ...] = Field(..., description="Radial normalization constants per degree")

    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)

    @field_validator("roots", "norms", mode="before")
    @classmethod
    def freeze_tables(cls, v) -> tuple[np.ndarray, ...]:
        return _frozen_tuple(v, np.float64)

    @model_validator(mode="after")
    def check_tables(self) -> "BasisSpec":
        if len(self.roots) != self.l_max + 1 or len(self.norms) != self.l_max + 1:
            raise ValueError("roots and norms need one entry per degree 0..l_max")
        for l, (lam, c) in enumerate(zip(self.roots, self.norms, strict=True)):
            if lam.shape != c.shape or lam.ndim != 1:
                raise ValueError(f"degree {l}: roots and norms must be matching 1D arrays")
            if lam.size and (lam[-1] > self.lambda_cut or np.any(np.diff(lam) <= 0)):
                raise ValueError(f"degree {l}: roots must be increasing and <= lambda_cut")
            if np.any(c <= 0):
                raise ValueError(f"degree {l}: normalization constants must be positive")
        return self

    def radial_count(self, l: int) -> int:
        return int(self.roots[l].size)

    @property
    def size(self) -> int:
        """Number of retained (k, l, m) indices."""
        return sum(self.radial_count(l) * (2 * l + 1) for l in range(self.l_max + 1))

    def block_shapes(self) -> list[tuple[int, int]]:
        return [(self.radial_count(l), 2 * l + 1) for l in range(self.l_max + 1)]

    def same_basis(self, other: "BasisSpec") -> bool:
        return self.l_max == other.l_max and self.block_shapes() == other.block_shapes() and all(np.array_equal(a, b) for a, b in zip(self.roots, other.roots, strict=True))


class BallExpansion(BaseModel):
    """
    Coefficients f_{k,l,m} of a function in the ball harmonics.

    blocks[l] has shape (K_l, 2l+1); entry [k-1, m+l] holds f_{k,l,m}. When real is set
    the coefficients satisfy f_{k,l,-m} = (-1)^m conj(f_{k,l,m}).
    """

    spec: BasisSpec
    blocks: tuple[np.ndarray, ...] = Field(..., description="Per-degree coefficient blocks")
    real: bool = Field(False, description="Coefficients describe a real-valued function")

    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)

    @field_validator("blocks", mode="before")
    @classmethod
    def freeze_blocks(cls, v) -> tuple[np.ndarray, ...]:
        return _frozen_tuple(v, np.complex128)

    @model_validator(mode="after")
    def check_shapes(self) -> "BallExpansion":
        shapes = [b.shape for b in self.blocks]
        if shapes != self.spec.block_shapes():
            raise ValueError(f"coefficient blocks {shapes} do not match basis {self.spec.block_shapes()}")
        return self

    @classmethod
    def unit(cls, spec: BasisSpec, index: BasisIndex) -> "BallExpansion":
        """Expansion of the single basis function psi_index."""
        blocks = [np.zeros(s, dtype=np.complex128) for s in spec.block_shapes()]
        if index.l > spec.l_max or index.k > spec.radial_count(index.l):
            raise ValueError(f"{index} is not retained by the basis")
        blocks[index.l][index.k - 1, index.m + index.l] = 1.0
        return cls(spec=spec, blocks=blocks, real=False)

    def energy_per_degree(self) -> np.ndarray:
        return np.array([float(np.sum(np.abs(b) ** 2)) for b in self.blocks])

    def norm(self, l_cut: int | None = None) -> float:
        energy = self.energy_per_degree()
        if l_cut is not None:
            energy = energy[: l_cut + 1]
        return float(np.sqrt(np.sum(energy)))

    def inner(self, other: "BallExpansion") -> complex:
        """<self, other> = sum conj(self) * other."""
        return complex(sum(np.vdot(a, b) for a, b in zip(self.blocks, other.blocks, strict=True)))
