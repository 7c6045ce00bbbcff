"""
Main entry point of the ballalign command line.

Usage:
    ballalign phantom --n 64 --seed 7 --rot-euler 30,40,50 --shift 2,-1,3 --out-dir data/p7
    ballalign align --template data/p7/template.mrc --subtomo data/p7/subtomo.mrc --truth data/p7/truth.json
    ballalign bandscan --template t.mrc --subtomo s.mrc --lmax 42 --out bandscan.csv
    python -m src.main bench --template t.mrc --subtomo s.mrc --baseline-step 5

Configuration is controlled via:
    - settings/config.yaml (optimizer, phantom, wedge and logging defaults)
    - BALLALIGN_* environment variables
    - --config to read an alternative YAML file

Exit codes: 0 success, 2 usage or validation error, 3 non-convergence,
4 I/O or MRC format error, 1 anything else.
"""

import sys

from src.cli.commands import COMMANDS
from src.cli.parser import build_parser
from src.logging_config import get_logger, setup_logging
from src.settings.loader import load_settings
from src.volio.mrc import MrcFormatError

logger = get_logger(__name__)

EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_IO = 4


def main(argv: list[str] | None = None) -> int:
    """
    Parse arguments, load settings and run one sub-command.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors and 0 for --help / --version
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE

    setup_logging(log_level=args.log_level or "INFO", log_file=args.log_file)

    try:
        settings = load_settings(args.config)
        if args.log_level is None and (settings.logging.level.upper() != "INFO" or settings.logging.file):
            setup_logging(log_level=settings.logging.level, log_file=args.log_file or settings.logging.file)
        logger.debug(f"Running command '{args.command}'")
        return COMMANDS[args.command](args, settings)

    except MrcFormatError as e:
        logger.error(f"MRC format error: {e}")
        return EXIT_IO

    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO

    except ValueError as e:
        # pydantic ValidationError is a ValueError
        logger.error(f"Invalid input: {e}")
        return EXIT_USAGE

    except KeyboardInterrupt:
        logger.warning("Interrupted by user")
        return 130

    except Exception as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
