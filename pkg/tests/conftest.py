from __future__ import annotations

from pathlib import Path

import pytest

from bitfold.hierarchy import Hierarchy, parse_hierarchy
from bitfold.selection import SelectionRecord, record_from_checked_set

REPO_ROOT = Path(__file__).resolve().parent.parent
PLACES_PATH = REPO_ROOT / "places.json"
DDL_DIR = REPO_ROOT / "fixtures" / "ddl"

FIG1_LEAVES = (
    "Antarctica/McMurdo",
    "Asia/China/Hunan/Changsha/Liuyang",
    "North America/United States/Maryland/Howard/Ellicott City",
)


@pytest.fixture(scope="session")
def places_text() -> str:
    return PLACES_PATH.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def places(places_text: str) -> Hierarchy:
    return parse_hierarchy(places_text)


@pytest.fixture()
def fig1_record(places: Hierarchy) -> SelectionRecord:
    """The three-leaf walkthrough selection with reasons Business|Leisure."""
    closure = set()
    for leaf in FIG1_LEAVES:
        parts = leaf.split("/")
        for i in range(1, len(parts) + 1):
            closure.add("/".join(parts[:i]))
    record = record_from_checked_set(closure, places)
    record.reasons = 3
    return record
