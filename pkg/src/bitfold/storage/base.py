"""Common backend surface: person management and storage accounting.

Both backends persist the same Person table and expose the same record-level
operations, so the service, the cross-backend oracle, and the benchmark can
treat them interchangeably. Writes are serialized through the store's
transaction lock; hierarchies are immutable, so reads need no coordination.
"""
from __future__ import annotations

from abc import ABC, abstractmethod

from ..hierarchy import Hierarchy
from ..selection import ReportRow, SelectionRecord
from .ports import ColumnDef, StorageReport, TableDef, UnknownPersonError

PERSON_TABLE = TableDef(
    "Person",
    (
        ColumnDef("IdPerson", primary_key=True),
        ColumnDef("Name", kind="text", not_null=True),
    ),
)


class SelectionBackend(ABC):
    """One person-keyed selection store (flattened-bitmap or adjacency)."""

    name: str

    def __init__(self, store, hierarchy: Hierarchy):
        self.store = store
        self.hierarchy = hierarchy

    @abstractmethod
    def tables(self) -> list[TableDef]:
        """All tables of this backend, in reporting order."""

    @abstractmethod
    def initialize(self) -> None:
        """Create tables and seed lookup content on a fresh store."""

    @abstractmethod
    def save_record(self, person: int, record: SelectionRecord) -> None:
        ...

    @abstractmethod
    def load_record(self, person: int) -> SelectionRecord:
        ...

    @abstractmethod
    def report(self, person: int) -> list[ReportRow]:
        ...

    def create_person(self, name: str) -> int:
        if not name:
            raise ValueError("person name must be non-empty")
        with self.store.transaction():
            person = self.store.max_value("Person", "IdPerson") + 1
            self.store.insert("Person", {"IdPerson": person, "Name": name})
        return person

    def person_exists(self, person: int) -> bool:
        return bool(self.store.select_eq("Person", {"IdPerson": person}, ("IdPerson",)))

    def require_person(self, person: int) -> None:
        if not self.person_exists(person):
            raise UnknownPersonError(person)

    def measure_storage(self) -> StorageReport:
        """Logical bytes from declared column widths, physical bytes from
        the backing store."""
        row_counts: dict[str, int] = {}
        logical = 0
        for table in self.tables():
            count = self.store.row_count(table.name)
            row_counts[table.name] = count
            logical += count * table.row_width
        return StorageReport(
            logical_bytes=logical,
            physical_bytes=self.store.byte_size(),
            row_counts=row_counts,
        )
