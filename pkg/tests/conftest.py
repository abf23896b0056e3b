import os
import sys

import pytest

from zetaladder.factorization import LemmaEvaluator
from zetaladder.ladder import Ladder
from zetaladder.moment import MomentFunction


@pytest.fixture(scope="session")
def cache_path(request):
    """Moment checkpoints kept across sessions in pytest's cache directory."""
    return os.path.join(str(request.config.cache.mkdir("zetaladder")), "moment.txt")


@pytest.fixture(scope="session")
def moment(cache_path):
    return MomentFunction(path=cache_path)


@pytest.fixture(scope="session")
def ladder(moment):
    return Ladder(moment)


@pytest.fixture(scope="session")
def evaluator(ladder):
    return LemmaEvaluator(ladder)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
