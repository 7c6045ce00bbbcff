"""
MRC2014 volume files through mrcfile.

The header is validated before any voxel data are read so that a bad stamp, an
unsupported mode and a truncated payload surface as distinct errors.
"""

import logging
import os
import warnings
from pathlib import Path

import mrcfile
import numpy as np

from src.model.phantom import MrcHeader
from src.model.volume import Volume

logger = logging.getLogger(__name__)

HEADER_BYTES = 1024
MODE_ITEMSIZE = {0: 1, 1: 2, 2: 4, 6: 2}


class MrcFormatError(ValueError):
    """Base class for malformed MRC files."""

    pass


class BadMapStampError(MrcFormatError):
    """Raised when bytes 208-211 are not 'MAP '."""

    pass


class UnsupportedModeError(MrcFormatError):
    """Raised for data modes other than 0, 1, 2 and 6."""

    pass


class ShortReadError(MrcFormatError):
    """Raised when the file is shorter than its header announces."""

    pass


class VolumeShapeError(ValueError):
    """Raised when a file does not hold a cubic 3D volume."""

    pass


def read_mrc_header(path: str | Path) -> MrcHeader:
    """
    Parse and validate the fixed header of an MRC file.

    Args:
        path: File to inspect

    Returns:
        MrcHeader with dimensions, mode, cell and statistics

    Raises:
        FileNotFoundError: If the file does not exist
        ShortReadError: If the file is shorter than the header plus the announced payload
        BadMapStampError: If the map stamp is wrong
        UnsupportedModeError: If the mode is not 0, 1, 2 or 6
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"MRC file not found: {path}")
    size = os.path.getsize(path)
    if size < HEADER_BYTES:
        raise ShortReadError(f"{path}: {size} bytes is shorter than the {HEADER_BYTES}-byte header")

    with warnings.catch_warnings():
        # permissive parsing reports format problems as warnings; they are checked below
        warnings.simplefilter("ignore", RuntimeWarning)
        with mrcfile.open(path, mode="r", header_only=True, permissive=True) as mrc:
            h = mrc.header
            stamp = bytes(h.map)
            mode = int(h.mode)
            nx, ny, nz = int(h.nx), int(h.ny), int(h.nz)
            extended = int(h.nsymbt)
            cell = (float(h.cella.x), float(h.cella.y), float(h.cella.z))
            stats = float(h.dmin), float(h.dmax), float(h.dmean)
            machine_stamp = bytes(h.machst)

    if stamp != b"MAP ":
        raise BadMapStampError(f"{path}: map stamp {stamp!r} is not b'MAP '")
    if mode not in MODE_ITEMSIZE:
        raise UnsupportedModeError(f"{path}: unsupported MRC mode {mode}")
    expected = HEADER_BYTES + extended + nx * ny * nz * MODE_ITEMSIZE[mode]
    if size < expected:
        raise ShortReadError(f"{path}: {size} bytes, header announces {expected}")

    return MrcHeader(
        nx=nx,
        ny=ny,
        nz=nz,
        mode=mode,
        cell=cell,
        map_stamp=stamp,
        machine_stamp=machine_stamp,
        dmin=stats[0],
        dmax=stats[1],
        dmean=stats[2],
        extended_header_bytes=extended,
    )


def _to_zyx(data: np.ndarray, mapc: int, mapr: int, maps: int) -> np.ndarray:
    """Reorder (section, row, column) data to [z, y, x] using the axis map."""
    axes = [int(maps), int(mapr), int(mapc)]
    if sorted(axes) != [1, 2, 3] or axes == [3, 2, 1]:
        return data
    return data.transpose([axes.index(3), axes.index(2), axes.index(1)])


def read_mrc(path: str | Path) -> Volume:
    """
    Read a cubic MRC volume.

    Args:
        path: MRC2014 file

    Returns:
        Volume indexed [z, y, x] in float64 with the file's voxel size

    Raises:
        MrcFormatError: Bad stamp, unsupported mode or truncated payload
        VolumeShapeError: If the data are not a cubic 3D grid
    """
    header = read_mrc_header(path)
    with mrcfile.open(path, mode="r") as mrc:
        data = np.asarray(mrc.data, dtype=np.float64)
        h = mrc.header
        data = _to_zyx(data, h.mapc, h.mapr, h.maps) if data.ndim == 3 else data
        voxel_size = float(mrc.voxel_size.x)

    if data.ndim != 3 or len(set(data.shape)) != 1:
        raise VolumeShapeError(f"{path}: expected a cubic 3D volume, got shape {data.shape}")
    logger.debug(f"Read {path}: {header.nx}^3 voxels, mode {header.mode}, voxel size {voxel_size}")
    return Volume(data=data, voxel_size=voxel_size if voxel_size > 0 else 1.0)


def write_mrc(volume: Volume, path: str | Path) -> None:
    """
    Write a volume as MRC2014 mode 2 (float32).

    Header statistics (min, max, mean, rms) are computed from the written data.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with mrcfile.new(path, overwrite=True) as mrc:
        mrc.set_data(volume.data.astype(np.float32))
        mrc.voxel_size = volume.voxel_size
        mrc.update_header_stats()
    logger.debug(f"Wrote {path}: {volume.n}^3 voxels")
