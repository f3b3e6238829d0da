import importlib

import pytest

from fuzzysched.workload_io import fixture_path, load_workload

BACKENDS = ["fuzzysched._core._inference_py"]
try:
    importlib.import_module("fuzzysched._core._inference")
except ImportError:
    pass
else:
    BACKENDS.append("fuzzysched._core._inference")


@pytest.fixture(params=BACKENDS, ids=lambda m: m.rsplit(".", 1)[-1])
def kernel(request):
    return importlib.import_module(request.param)


@pytest.fixture
def cs1():
    return load_workload(fixture_path("case_study_1_no_arrival.csv")).tasks


@pytest.fixture
def cs1_arrival():
    return load_workload(fixture_path("case_study_1_arrival.csv")).tasks


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_acceptance_results", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)
