"""
Argument parser of the ballalign command line.
"""

import argparse

from src import __version__


def int_list(text: str) -> list[int]:
    """'7,12,33' -> [7, 12, 33]."""
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def _triple(text: str, kind: type) -> tuple:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated values, got {text!r}")
    try:
        return tuple(kind(p) for p in parts)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected three comma-separated {kind.__name__} values, got {text!r}") from e


def int_triple(text: str) -> tuple[int, int, int]:
    return _triple(text, int)


def float_triple(text: str) -> tuple[float, float, float]:
    return _triple(text, float)


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default=None, help="Alternative YAML configuration file")
    parser.add_argument("--log-level", default=None, help="Log level (overrides the configuration)")
    parser.add_argument("--log-file", default=None, help="Also log to this file")
    parser.add_argument("--threads", type=positive_int, default=None, help="Worker threads (default: all cores)")


def _add_optimizer(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lmax", type=int, default=None, help="Degree band limit (default 42)")
    parser.add_argument("--bands", type=int_list, default=None, help="Band schedule, e.g. 7,12,33")
    parser.add_argument("--lambda-cut", type=float, default=None, help="Explicit eigen-frequency cutoff")
    parser.add_argument("--shift-radius", type=int, default=None, help="Shift search radius in voxels")
    parser.add_argument("--shift-step", type=int, default=None, help="Coarse shift step in voxels")
    parser.add_argument("--wedge", type=float, nargs="?", const=-1.0, default=None, help="Missing-wedge half-angle in degrees (bare flag: configured default)")


def _add_pair(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--template", required=True, help="Template MRC file")
    parser.add_argument("--subtomo", required=True, help="Subtomogram MRC file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ballalign", description="Subtomogram alignment in the ball-harmonics domain")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", help="Generate a seeded template/subtomogram pair with known pose")
    _add_common(p)
    p.add_argument("--n", type=int, default=64, help="Grid size (even)")
    p.add_argument("--blobs", type=positive_int, default=None, help="Number of Gaussian blobs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--snr", type=float, default=None, help="Signal over noise variance inside the support ball")
    p.add_argument("--wedge", type=float, default=None, help="Missing-wedge half-angle in degrees")
    p.add_argument("--rot-euler", type=float_triple, default=(0.0, 0.0, 0.0), help="True rotation as ZYZ Euler angles a,b,c in degrees")
    p.add_argument("--shift", type=int_triple, default=(0, 0, 0), help="True shift x,y,z in voxels")
    p.add_argument("--out-dir", required=True, help="Directory for template.mrc, subtomo.mrc and truth.json")

    p = sub.add_parser("align", help="Align a subtomogram to a template")
    _add_common(p)
    _add_pair(p)
    _add_optimizer(p)
    p.add_argument("--truth", default=None, help="truth.json of a phantom; fills the error fields of the report")
    p.add_argument("--report", default="report.json", help="Report JSON path")

    p = sub.add_parser("bandscan", help="Energy ratio and evaluation cost per truncation degree")
    _add_common(p)
    _add_pair(p)
    _add_optimizer(p)
    p.add_argument("--shift", type=int_triple, default=(0, 0, 0), help="Shift x,y,z at which the kernel is built")
    p.add_argument("--out", default=None, help="CSV path (default: standard output)")

    p = sub.add_parser("bench", help="Compare band-marching refinement with an exhaustive Euler grid")
    _add_common(p)
    _add_pair(p)
    _add_optimizer(p)
    p.add_argument("--baseline-step", type=float, default=5.0, help="Exhaustive grid step in degrees")
    p.add_argument("--shift", type=int_triple, default=None, help="Fixed shift x,y,z (default: found by align)")
    p.add_argument("--truth", default=None, help="truth.json of a phantom")
    p.add_argument("--report", default="bench.json", help="Report JSON path")

    p = sub.add_parser("expand", help="Expand a volume in ball harmonics")
    _add_common(p)
    p.add_argument("--input", required=True, help="MRC file to expand")
    p.add_argument("--lmax", type=int, default=None)
    p.add_argument("--lambda-cut", type=float, default=None)
    p.add_argument("--out", default="coeffs.npz", help="Coefficient archive")
    p.add_argument("--summary", default=None, help="JSON summary path (default: standard output)")
    p.add_argument("--synthesize", default=None, help="Write the band-limited reconstruction to this MRC file")

    p = sub.add_parser("landscape", help="Dump the correlation over an (alpha, beta) slice per band")
    _add_common(p)
    _add_pair(p)
    _add_optimizer(p)
    p.add_argument("--shift", type=int_triple, default=(0, 0, 0))
    p.add_argument("--gamma", type=float, default=0.0, help="Fixed third Euler angle in degrees")
    p.add_argument("--n-alpha", type=positive_int, default=72)
    p.add_argument("--n-beta", type=positive_int, default=37)
    p.add_argument("--out", default="landscape.csv", help="CSV path")
    p.add_argument("--plot", default=None, help="PNG figure path")

    return parser
