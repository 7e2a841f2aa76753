import pytest

from zetaladder.config import NumericsConfig
from zetaladder.factorizer import Factorizer
from zetaladder.hl_integral import IntegralCheckpointTable, default_table_path
from zetaladder.ladder import Ladder


@pytest.fixture(scope="session")
def cfg():
    return NumericsConfig()


@pytest.fixture(scope="session")
def checkpoint_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("checkpoints")


@pytest.fixture(scope="session")
def table(cfg, checkpoint_dir):
    tab = IntegralCheckpointTable(cfg, default_table_path(cfg, checkpoint_dir))
    tab.extend_to(12000.0)
    tab.save()
    return tab


@pytest.fixture(scope="session")
def ladder(table):
    return Ladder(table)


@pytest.fixture(scope="session")
def fz(ladder):
    return Factorizer(ladder)


def pytest_configure(config):
    config._acceptance_lines = {}


@pytest.fixture
def acceptance(request):
    """record(n, ok, detail) adds one line to the acceptance summary."""
    lines = request.config._acceptance_lines

    def record(n, ok, detail=""):
        line = f"acceptance {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines[n] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
