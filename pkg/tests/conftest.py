import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
sys.path.insert(0, str(TESTS_DIR))

_acceptance_results: dict = {}


def stub_cmd(*args: str) -> list:
    """Command line for the scripted protocol stub."""
    return [sys.executable, str(TESTS_DIR / "stub_process.py"), *args]


@pytest.fixture(scope="session")
def dataset(tmp_path_factory):
    """Synthetic wav files plus manifest, shared across harness tests."""
    from simulstream.synthetic import make_corpus, write_dataset

    root = tmp_path_factory.mktemp("dataset")
    corpus = make_corpus(5)
    manifest = write_dataset(root, corpus)
    return {"root": root, "manifest": manifest, "corpus": corpus}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if "test_acceptance" not in item.nodeid:
        return
    doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
    if report.when == "call":
        _acceptance_results[item.nodeid] = (report.passed, doc)
    elif report.failed:  # setup/teardown error counts as a failure
        _acceptance_results[item.nodeid] = (False, doc)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for nodeid in sorted(_acceptance_results):
        passed, doc = _acceptance_results[nodeid]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}: {doc}")
