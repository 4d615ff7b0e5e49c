import logging
import sys
from typing import TextIO

QUIET_LOGGERS = ("lark",)


def setup_logging(level: str = "INFO", stream: TextIO | None = None) -> None:
    """Log to ``stream`` (stdout by default); the CLI passes stderr so stdout stays machine-readable."""
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        handlers=[logging.StreamHandler(stream or sys.stdout)],
        force=True,
    )
    # grammar construction chatter at debug level
    for name in QUIET_LOGGERS:
        logging.getLogger(name).setLevel(logging.WARNING)
