import logging
import sys

from clonekit.cli.main import run
from clonekit.logging_config import setup_logging

logger = logging.getLogger(__name__)


def main() -> None:
    setup_logging(stream=sys.stderr)
    status = run(["check", *sys.argv[1:]])
    if status:
        logger.warning("Bundle check finished with exit status %s", status)
    sys.exit(status)


if __name__ == "__main__":
    main()
