from __future__ import annotations

from pathlib import Path

import pytest

from ookb import load_kb_files

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def cell_path() -> Path:
    return FIXTURES / "cell.ookb"


@pytest.fixture(scope="session")
def parents_path() -> Path:
    return FIXTURES / "parents.ookb"


@pytest.fixture(scope="session")
def parents_eq_path() -> Path:
    return FIXTURES / "parents_eq.ookb"


@pytest.fixture(scope="session")
def cell_domain(cell_path):
    return load_kb_files([cell_path])


@pytest.fixture(scope="session")
def parents_domain(parents_path):
    return load_kb_files([parents_path])


@pytest.fixture(scope="session")
def parents_eq_domain(parents_eq_path):
    return load_kb_files([parents_eq_path])
