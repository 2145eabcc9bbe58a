"""
Diagnostic logging for spinnet.

Experiments write results to files and print the written paths on stdout, so
every log record goes to stderr. Library code only asks for named loggers;
the CLI is the one place that installs a handler.
"""

import logging
import sys
from typing import Optional

ROOT_LOGGER = "spinnet"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(debug: bool = False, name: str = ROOT_LOGGER) -> logging.Logger:
    """Install the stderr handler and set the spinnet log level.

    Called once per CLI invocation, after --debug and SPINNET_DEBUG are resolved.

    Args:
        debug: Log at DEBUG instead of INFO (per-restart optimizer progress,
            experiment discovery, sign selection details)
        name: Logger whose level is set

    Returns:
        logging.Logger: The configured logger
    """
    log_level = logging.DEBUG if debug else logging.INFO

    logging.basicConfig(
        level=log_level,
        format=LOG_FORMAT,
        handlers=[logging.StreamHandler(sys.stderr)],
    )

    logger = logging.getLogger(name)
    logger.setLevel(log_level)

    return logger


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """Logger for a spinnet module, usually called with ``__name__``.

    Args:
        name: Dotted module name; the package logger when omitted

    Returns:
        logging.Logger: Logger instance
    """
    return logging.getLogger(name or ROOT_LOGGER)
