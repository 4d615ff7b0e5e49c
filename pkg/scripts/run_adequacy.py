import logging

from clonekit.config import default_budget
from clonekit.logging_config import setup_logging
from clonekit.stlc.adequacy import adequacy_harness

logger = logging.getLogger(__name__)


def main() -> None:
    setup_logging()
    report = adequacy_harness(budget=default_budget())
    logger.info(
        "Adequacy at bound %s: %s terms, %s pairs, %s counterexamples in %.2fs",
        report.bound,
        report.terms,
        report.pairs,
        len(report.counterexamples),
        report.seconds,
    )
    if not report.passed:
        logger.error("Counterexamples:\n%s", report.to_frame().to_string(index=False))
        raise SystemExit(1)


if __name__ == "__main__":
    main()
