import logging
import sys

from config.fixedspace_config import LOG_LEVEL, LOG_FORMAT


def setup_logging(level: str = LOG_LEVEL) -> None:
    # stderr keeps stdout free for JSON reports
    logging.basicConfig(level=level.upper(), format=LOG_FORMAT, stream=sys.stderr, force=True)
