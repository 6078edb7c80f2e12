import logging
from datetime import datetime
from pathlib import Path
from typing import Optional

from vqdyn.util.helpers import FileSystem


class ColorFormatter(logging.Formatter):
    """
    Fixed-width log formatter used for both console and file output.
    Console output colours the level and dims the timestamp and source location.
    """

    COLOR_CODES = {
        "DEBUG": "\033[94m",
        "INFO": "\033[92m",
        "WARNING": "\033[93m",
        "ERROR": "\033[91m",
        "CRITICAL": "\033[95m",
    }
    RESET_CODE = "\033[0m"
    BOLD_CODE = "\033[1m"
    DIM_CODE = "\033[2m"

    LEVEL_WIDTH = 8
    LOCATION_WIDTH = 30

    def __init__(self, fmt=None, datefmt=None, style="%", use_color=True):
        super().__init__(fmt, datefmt, style)
        self.use_color = use_color

    def format(self, record: logging.LogRecord) -> str:
        level = record.levelname.ljust(self.LEVEL_WIDTH)
        location = f"[{record.filename}:{record.lineno}]".ljust(self.LOCATION_WIDTH)
        timestamp = self.formatTime(record)

        if self.use_color:
            colour = self.COLOR_CODES.get(record.levelname, self.RESET_CODE)
            level = f"{self.BOLD_CODE}{colour}{level}{self.RESET_CODE}"
            timestamp = f"{self.DIM_CODE}{timestamp}{self.RESET_CODE}"
            location = f"{self.DIM_CODE}{location}{self.RESET_CODE}"

        message = record.getMessage()
        if record.exc_info:
            message = f"{message}\n{self.formatException(record.exc_info)}"
        return f"{timestamp} {level} {location} {message}"


def configure_logging(
    config_path: Optional[str] = None,
    log_level: Optional[str] = None,
    log_dir: Optional[str] = ".logs",
) -> logging.Logger:
    """
    Configure the root logger from the `logging` section of the settings file.

    Args:
        config_path: Explicit settings file; defaults to src/settings/configuration.yaml
        log_level: Overrides the configured root level (e.g. from --log-level)
        log_dir: Directory for timestamped log files, or None to log to console only

    Returns:
        The configured root logger
    """
    if config_path is None:
        config = FileSystem.load_configuration()
    else:
        config = FileSystem.load_configuration(
            Path(config_path).name, str(Path(config_path).parent)
        )

    log_config = config.get("logging", {})
    level = (log_level or log_config.get("level", "INFO")).upper()
    log_format = log_config.get("format")
    console_level = log_config.get("console_level", "INFO").upper()
    file_level = log_config.get("file_level", "DEBUG").upper()
    if log_level is not None:
        console_level = level

    logger = logging.getLogger()
    logger.setLevel(level)
    # configure_logging may run once per CLI invocation inside one process (tests)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)

    console_handler = logging.StreamHandler()
    console_handler.setLevel(console_level)
    console_handler.setFormatter(ColorFormatter(log_format, use_color=True))
    logger.addHandler(console_handler)

    if log_dir:
        logs_dir = Path(log_dir)
        logs_dir.mkdir(parents=True, exist_ok=True)
        timestamp = datetime.now().strftime("%Y-%m-%d_%H-%M-%S")
        log_file = logs_dir / f"vqdyn_{timestamp}.log"
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(file_level)
        file_handler.setFormatter(ColorFormatter(log_format, use_color=False))
        logger.addHandler(file_handler)
        logger.debug(f"Logging initialized. Log file: {log_file}")

    return logger
