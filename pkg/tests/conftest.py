import pytest

from asymfluct.models import BernoulliModel, CarModel, CatMapModel, FreeShiftModel, SingletonFactorizationModel


@pytest.fixture
def free():
    return FreeShiftModel()


@pytest.fixture
def coin():
    return BernoulliModel()


@pytest.fixture
def cat():
    return CatMapModel()


@pytest.fixture
def singleton():
    return SingletonFactorizationModel()


@pytest.fixture
def car():
    return CarModel()


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[n])
