import itertools

import pytest

from hamlag.params import SeedParameters, resolve
from hamlag.profile import build_profile

EXAMPLE_ALPHA = (0, -1, 3)
BRANCHES = list(itertools.product(["minus", "plus"], ["positive", "negative"]))


@pytest.fixture(scope="session")
def example_seed():
    return SeedParameters(EXAMPLE_ALPHA, 2.0, 1.0)


@pytest.fixture(scope="session")
def example_constants(example_seed):
    return resolve(example_seed)


@pytest.fixture(scope="session")
def example_profile(example_constants):
    return build_profile(example_constants)


@pytest.fixture(scope="session", params=BRANCHES, ids=["-".join(b) for b in BRANCHES])
def branch_profile(request):
    branch, sign = request.param
    return build_profile(resolve(SeedParameters(EXAMPLE_ALPHA, 2.0, 1.0, branch, sign)))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
