import pytest

from posit_amd.posit_core import P16, PositWord


@pytest.fixture
def w():
    """Build a <16,2> word from an int pattern."""
    return lambda bits: PositWord(bits, P16)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda ln: int(ln.split()[1])):
            terminalreporter.write_line(line)
