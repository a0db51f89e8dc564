import pytest

from helpers import requirements_bytes
from sitcov.modelio import reference_model, reference_model_bytes


@pytest.fixture(scope="session")
def ref():
    return reference_model()


@pytest.fixture
def ref_path(tmp_path):
    path = tmp_path / "model.json"
    path.write_bytes(reference_model_bytes())
    return path


@pytest.fixture
def write_reqs(tmp_path):
    def _write(*reqs, name="reqs.json"):
        path = tmp_path / name
        path.write_bytes(requirements_bytes(*reqs))
        return path
    return _write


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
