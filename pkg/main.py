import sys
from logging import StreamHandler

from vqdyn.cli.commands import main as cli_main
from vqdyn.util.logging import configure_logging


def main():
    # Configure logging before the CLI reconfigures it with the requested level
    logger = configure_logging(log_dir=None)

    # Ensure all log messages are sent to stderr
    for handler in logger.handlers:
        if isinstance(handler, StreamHandler):
            handler.stream = sys.stderr

    try:
        cli_main()
    except KeyboardInterrupt:
        logger.info("Keyboard interrupt received, shutting down...")
        sys.exit(0)


if __name__ == "__main__":
    main()
