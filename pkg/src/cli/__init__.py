"""
Command-line front end: phantom generation, alignment, band scans, benchmarks,
expansion dumps and landscape slices.
"""

from .commands import COMMANDS, bandscan_table, cmd_align, cmd_bandscan, cmd_bench, cmd_expand, cmd_landscape, cmd_phantom, optimizer_config
from .parser import build_parser

__all__ = [
    "COMMANDS",
    "build_parser",
    "optimizer_config",
    "bandscan_table",
    "cmd_phantom",
    "cmd_align",
    "cmd_bandscan",
    "cmd_bench",
    "cmd_expand",
    "cmd_landscape",
]
