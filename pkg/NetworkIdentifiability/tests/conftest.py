import logging
import sys
from pathlib import Path

import pytest

# Ensure the netident package is importable in tests
PROJECT_DIR = Path(__file__).resolve().parents[1]
if str(PROJECT_DIR) not in sys.path:
    sys.path.insert(0, str(PROJECT_DIR))

from netident.graph_core import parse_graph
from netident.oracle import load_fixture
from netident.settings import ENV_OVERRIDES, use_settings

FIXTURES_DIR = PROJECT_DIR / "config" / "fixtures"


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch):
    for name in list(ENV_OVERRIDES) + ["NETIDENT_CONFIG"]:
        monkeypatch.delenv(name, raising=False)
    use_settings(None)
    yield
    use_settings(None)
    # handlers installed by cli.main hold the captured stderr of the finished test
    package_logger = logging.getLogger("netident")
    for handler in list(package_logger.handlers):
        package_logger.removeHandler(handler)
        handler.close()
    package_logger.setLevel(logging.NOTSET)


@pytest.fixture
def fixtures_dir():
    return FIXTURES_DIR


def _graph(name):
    return parse_graph((FIXTURES_DIR / name).read_text(encoding="utf-8"))


@pytest.fixture
def crossed_diamond():
    return _graph("crossed_diamond.json")


@pytest.fixture
def layered():
    return _graph("layered.json")


@pytest.fixture
def open_diamond():
    return _graph("open_diamond.json")


@pytest.fixture
def adversarial():
    return load_fixture(FIXTURES_DIR / "crossed_diamond_adversarial.json")
