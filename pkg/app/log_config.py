import logging

from rich.console import Console
from rich.logging import RichHandler

from app.config import get_settings

PACKAGE_LOGGER = "app"


def configure_logging(level: str | None = None) -> logging.Logger:
    """
    Sends package log records to stderr through rich. Safe to call more than
    once; the handler is replaced, not stacked.
    """
    logger = logging.getLogger(PACKAGE_LOGGER)
    for handler in list(logger.handlers):
        if isinstance(handler, RichHandler):
            logger.removeHandler(handler)
    handler = RichHandler(
        console=Console(stderr=True), show_path=False, rich_tracebacks=False
    )
    handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(handler)
    logger.setLevel((level or get_settings().LOG_LEVEL).upper())
    return logger
