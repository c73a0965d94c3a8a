import random
from pathlib import Path

import pytest

from mstt import guarded, param

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def gchk():
    return guarded.make_checker()


@pytest.fixture(scope="session")
def pchk():
    return param.make_checker()


@pytest.fixture
def rng():
    return random.Random(1234)


def stage_pairs(limit=5):
    return [(m, n) for n in range(limit + 1) for m in range(n + 1)]


def natural_at(sem_ty, tm, f, env_hi, env_lo, rng):
    """restrict(f, t(y, γ)) == t(x, γ restricted), compared by probing."""
    x, y = f
    return sem_ty.probe_equal(x, sem_ty.restrict(f, tm.at(y, env_hi)), tm.at(x, env_lo), rng)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
