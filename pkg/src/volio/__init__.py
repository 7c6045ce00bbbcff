"""
Volume I/O, synthetic phantoms and pose-accuracy metrics.
"""

from .metrics import geodesic_degrees, shift_error
from .mrc import BadMapStampError, MrcFormatError, ShortReadError, UnsupportedModeError, VolumeShapeError, read_mrc, read_mrc_header, write_mrc
from .phantom import make_phantom, read_truth, support_mask, write_truth
from .transforms import rotate_volume, shift_volume

__all__ = [
    "MrcFormatError",
    "BadMapStampError",
    "UnsupportedModeError",
    "ShortReadError",
    "VolumeShapeError",
    "read_mrc",
    "read_mrc_header",
    "write_mrc",
    "make_phantom",
    "support_mask",
    "write_truth",
    "read_truth",
    "rotate_volume",
    "shift_volume",
    "geodesic_degrees",
    "shift_error",
]
