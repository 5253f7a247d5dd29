import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hyperlane import acceptance  # noqa: E402


@pytest.fixture(scope="session")
def solved():
    """Cached ground state plus diagnostics keyed by (N, p, q, factor)."""
    return acceptance.solved


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
