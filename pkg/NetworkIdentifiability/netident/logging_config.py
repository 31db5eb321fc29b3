"""
Logging setup driven by the logging section of config.yaml
"""

import logging
import sys
from pathlib import Path
from typing import Optional

from netident.settings import Settings

LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"


def configure_logging(settings: Settings, level_override: Optional[str] = None) -> None:
    """Attach stderr (and optional file) handlers to the netident logger tree"""
    level_name = (level_override or settings.logging.level or "INFO").upper()
    level = logging.getLevelName(level_name)
    if not isinstance(level, int):
        level = logging.INFO

    root = logging.getLogger("netident")
    root.setLevel(level)
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(LOG_FORMAT)
    stream = logging.StreamHandler(sys.stderr)
    stream.setFormatter(formatter)
    root.addHandler(stream)

    if settings.logging.file:
        path = Path(settings.logging.file)
        path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(path, encoding="utf-8")
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)
