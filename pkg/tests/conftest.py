import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from sketchkit import load  # noqa: E402
from sketchkit.cli import corpus_path  # noqa: E402

BASE_CATEGORIES = ("One", "Two", "Iso2", "ParFork", "B2", "Vee")


@pytest.fixture(scope="session")
def corpus():
    return load(corpus_path())


@pytest.fixture(scope="session")
def cat(corpus):
    return corpus.category


@pytest.fixture(scope="session")
def sk(corpus):
    return corpus.sketch


@pytest.fixture(scope="session")
def seq(corpus):
    return corpus.sequent


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        ok, secs, note = RESULTS[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {secs:6.2f}s  {note}")
