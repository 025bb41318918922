import pytest
from hypothesis import settings

from hecke2d.field import FieldConfig

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(params=[2, 3])
def cfg(request):
    return FieldConfig(request.param)


@pytest.fixture
def cfg2():
    return FieldConfig(2)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
