import logging
import sys
from pathlib import Path

import pytest

from qdetect.corpus import ingest

FIXTURES = Path(__file__).parent / "fixtures"
MINI = FIXTURES / "mini-corpus"


def read_table(path):
    """Rows of a whitespace-separated oracle file, skipping '#' comments."""
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip() and not line.startswith("#"):
            rows.append(line.split())
    return rows


@pytest.fixture(scope="session")
def mini_paths():
    return MINI / "docs.jsonl", MINI / "topics.tsv", MINI / "qrels.txt"


@pytest.fixture(scope="session")
def mini(mini_paths):
    return ingest(*mini_paths)


@pytest.fixture(autouse=True)
def _restore_logger():
    # the CLI installs its own stderr handler; keep tests independent of that
    logger = logging.getLogger("qdetect")
    saved = logger.handlers[:], logger.level, logger.propagate
    yield
    logger.handlers[:], logger.level, logger.propagate = saved


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
