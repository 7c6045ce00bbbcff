import numpy as np
import pytest

from src.basis.expansion import build_spec
from src.model.basis import BallExpansion, BasisSpec
from src.model.volume import Volume, grid_coordinates

BLOB_CENTERS = [(0.25, 0.1, -0.15), (-0.2, 0.2, 0.1), (0.05, -0.25, 0.2)]
BLOB_SIGMAS = [0.2, 0.18, 0.22]
BLOB_AMPLITUDES = [1.0, 0.7, 0.85]


def gaussian_blobs(n: int, centers=BLOB_CENTERS, sigmas=BLOB_SIGMAS, amplitudes=BLOB_AMPLITUDES) -> Volume:
    """Sum of isotropic Gaussians on an n^3 grid, well inside the unit ball."""
    x, y, z = grid_coordinates(n)
    data = np.zeros((n, n, n))
    for (cx, cy, cz), sigma, amplitude in zip(centers, sigmas, amplitudes, strict=True):
        data += amplitude * np.exp(-((x - cx) ** 2 + (y - cy) ** 2 + (z - cz) ** 2) / (2.0 * sigma**2))
    return Volume(data=data)


def random_expansion(spec: BasisSpec, rng: np.random.Generator) -> BallExpansion:
    blocks = [rng.standard_normal(s) + 1j * rng.standard_normal(s) for s in spec.block_shapes()]
    return BallExpansion(spec=spec, blocks=blocks, real=False)


def ball_energy(volume: Volume) -> float:
    """Continuous L2 energy of the voxels inside the unit ball."""
    x, y, z = grid_coordinates(volume.n)
    inside = x**2 + y**2 + z**2 < 1.0
    return float(np.sum(volume.data[inside] ** 2)) * (2.0 / volume.n) ** 3


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def basis12():
    return build_spec(12, 25.0)


@pytest.fixture(scope="session")
def small_basis():
    return build_spec(6, 15.0)


@pytest.fixture(scope="session")
def blob_volume():
    return gaussian_blobs(48)
