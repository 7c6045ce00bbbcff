"""
Seeded synthetic phantoms with a known pose.

The template is a sum of anisotropic Gaussian blobs. The subtomogram is the template
rotated by the voxel-domain oracle, moved by an integer shift, optionally
wedge-filtered, and corrupted by white noise at a requested SNR.
"""

import logging
from pathlib import Path

import numpy as np

from src.model.phantom import GroundTruth, PhantomSpec
from src.model.rotation import Rotation
from src.model.volume import Volume, grid_coordinates
from src.xcorr.wedge import apply_wedge, build_wedge_mask

from .transforms import rotate_volume, shift_volume

logger = logging.getLogger(__name__)


def _generator(spec: PhantomSpec) -> np.random.Generator:
    if spec.generator != "philox":
        raise ValueError(f"unsupported bit generator {spec.generator!r}")
    return np.random.Generator(np.random.Philox(spec.seed))


def _blob_template(spec: PhantomSpec, rng: np.random.Generator) -> np.ndarray:
    x, y, z = grid_coordinates(spec.n)
    points = np.stack([x, y, z], axis=-1)
    sigma_max = spec.sigma_range[1]
    center_radius = spec.support_radius - 3.0 * sigma_max

    data = np.zeros((spec.n,) * 3)
    for _ in range(spec.blobs):
        sigmas = rng.uniform(*spec.sigma_range, size=3)
        amplitude = rng.uniform(*spec.amplitude_range)
        axes = Rotation.random(rng).matrix()
        direction = rng.standard_normal(3)
        direction /= np.linalg.norm(direction)
        center = direction * center_radius * rng.uniform() ** (1.0 / 3.0)

        # offsets expressed in the blob's principal frame
        local = (points - center) @ axes
        data += amplitude * np.exp(-0.5 * np.sum((local / sigmas) ** 2, axis=-1))
    return data


def support_mask(n: int, radius: float) -> np.ndarray:
    x, y, z = grid_coordinates(n)
    return x**2 + y**2 + z**2 <= radius**2


def make_phantom(spec: PhantomSpec) -> tuple[Volume, Volume, GroundTruth]:
    """
    Generate a template, its corrupted copy and the ground truth.

    The result depends only on the phantom parameters: the same seed gives identical volumes.

    Args:
        spec: Phantom recipe

    Returns:
        (template, subtomogram, truth) where the subtomogram is
        T_shift R_rotation template, wedge-filtered and noisy as requested
    """
    rng = _generator(spec)
    template = Volume(data=_blob_template(spec, rng))

    subtomo = shift_volume(rotate_volume(template, spec.true_rotation), spec.true_shift)
    if spec.wedge_theta is not None:
        subtomo = apply_wedge(subtomo, build_wedge_mask(spec.n, spec.wedge_theta))

    if spec.snr is not None:
        inside = support_mask(spec.n, spec.support_radius)
        signal_variance = float(np.var(subtomo.data[inside]))
        noise = rng.standard_normal((spec.n,) * 3) * np.sqrt(signal_variance / spec.snr)
        subtomo = subtomo.with_data(subtomo.data + noise)
        logger.debug(f"Added noise with variance {signal_variance / spec.snr:.4g} (snr {spec.snr})")

    truth = GroundTruth.from_spec(spec)
    logger.info(f"Phantom n={spec.n} seed={spec.seed}: rotation {truth.euler_zyz_degrees} deg, shift {truth.shift}")
    return template, subtomo, truth


def write_truth(truth: GroundTruth, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(truth.model_dump_json(indent=2), encoding="utf-8")


def read_truth(path: str | Path) -> GroundTruth:
    """Load truth.json written by write_truth."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Ground truth file not found: {path}")
    return GroundTruth.model_validate_json(path.read_text(encoding="utf-8"))
