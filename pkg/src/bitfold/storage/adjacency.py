"""Baseline backend: adjacency-list Location table plus junction tables.

This is the conventional normalized layout the wide-table backend is
benchmarked against: one Location row per hierarchy vertex (parent-pointer
tree), one VisitedPlace row per checked vertex per person, and a PlaceReason
junction row per set reason bit. Semantically equivalent to the bitmap
backend so comparisons stay apples-to-apples.
"""
from __future__ import annotations

from ..hierarchy import Bitmap, Hierarchy, UnknownPathError, parent_path
from ..selection import (
    DomainError,
    NotUpwardClosedError,
    ReportRow,
    SelectionRecord,
    checked_set,
    record_from_checked_set,
    report_rows,
)
from .base import PERSON_TABLE, SelectionBackend
from .ports import ColumnDef, StoreError, TableDef, create_table_sql

LOCATION_TABLE = TableDef(
    "Location",
    (
        ColumnDef("IdLocation", primary_key=True),
        ColumnDef("IdParent", references="Location (IdLocation)"),
        ColumnDef("Name", kind="text", not_null=True),
        ColumnDef("LevelLabel", kind="text", not_null=True),
    ),
)

REASON_TABLE = TableDef(
    "Reason",
    (
        ColumnDef("IdReason", primary_key=True),
        ColumnDef("Name", kind="text", not_null=True),
    ),
)

VISITED_PLACE_TABLE = TableDef(
    "VisitedPlace",
    (
        ColumnDef("IdPerson", not_null=True, references="Person (IdPerson)"),
        ColumnDef("IdLocation", not_null=True, references="Location (IdLocation)"),
    ),
    composite_pk=("IdPerson", "IdLocation"),
)

PLACE_REASON_TABLE = TableDef(
    "PlaceReason",
    (
        ColumnDef("IdPerson", not_null=True, references="Person (IdPerson)"),
        ColumnDef("IdReason", not_null=True, references="Reason (IdReason)"),
    ),
    composite_pk=("IdPerson", "IdReason"),
)

TABLES = (PERSON_TABLE, LOCATION_TABLE, REASON_TABLE, VISITED_PLACE_TABLE, PLACE_REASON_TABLE)

# Baseline report reconstruction: recursive traversal over the person's
# visited adjacency rows, keeping frontier rows (no visited child).
_REPORT_SQL = """\
WITH RECURSIVE visited_path (IdLocation, Path) AS (
    SELECT l.IdLocation, l.Name
    FROM Location l
    JOIN VisitedPlace vp ON vp.IdLocation = l.IdLocation
    WHERE vp.IdPerson = ? AND l.IdParent IS NULL
    UNION ALL
    SELECT l.IdLocation, p.Path || '/' || l.Name
    FROM Location l
    JOIN VisitedPlace vp ON vp.IdLocation = l.IdLocation
    JOIN visited_path p ON l.IdParent = p.IdLocation
    WHERE vp.IdPerson = ?
)
SELECT Path
FROM visited_path frontier
WHERE NOT EXISTS (
    SELECT 1
    FROM Location child
    JOIN VisitedPlace v2 ON v2.IdLocation = child.IdLocation
    WHERE child.IdParent = frontier.IdLocation AND v2.IdPerson = ?
)
"""


def emit_schema_ddl() -> str:
    """Deterministic DDL for the five baseline tables with their keys."""
    return "\n\n".join(create_table_sql(t) for t in TABLES) + "\n"


class AdjacencyBackend(SelectionBackend):
    """Junction-table persistence of per-person checked vertex sets."""

    name = "traditional"

    def __init__(self, store, hierarchy: Hierarchy):
        super().__init__(store, hierarchy)
        self._id_by_path: dict[str, int] = {}
        self._path_by_id: dict[int, str] = {}
        self._bfs_position = {
            v.path: i for i, v in enumerate(hierarchy.vertices_bfs())
        }

    def tables(self) -> list[TableDef]:
        return list(TABLES)

    def initialize(self) -> None:
        self.store.create_tables(TABLES)
        if self.store.row_count("Location") == 0:
            self.seed_locations(self.hierarchy)
        else:
            self._load_location_map()

    def seed_locations(self, h: Hierarchy) -> None:
        """Materialize one Location row per vertex (ids follow breadth-first
        declaration order) and the Reason lookup rows. Fails on a non-empty
        Location table; there is no re-seed."""
        if self.store.row_count("Location"):
            raise StoreError("Location table is already seeded")
        ids: dict[str, int] = {}
        with self.store.transaction():
            for position, v in enumerate(h.vertices_bfs(), start=1):
                ids[v.path] = position
                parent = parent_path(v.path)
                self.store.insert(
                    "Location",
                    {
                        "IdLocation": position,
                        "IdParent": ids[parent] if parent else None,
                        "Name": v.name,
                        "LevelLabel": v.level_label,
                    },
                )
            for bit, name in h.reasons:
                self.store.insert("Reason", {"IdReason": bit, "Name": name})
        self._id_by_path = ids
        self._path_by_id = {i: p for p, i in ids.items()}

    def _load_location_map(self) -> None:
        rows = self.store.select_eq("Location", {}, ("IdLocation", "IdParent", "Name"))
        by_id = {row[0]: row for row in rows}

        def path_of(loc_id: int) -> str:
            row = by_id[loc_id]
            if row[1] is None:
                return row[2]
            return path_of(row[1]) + "/" + row[2]

        self._path_by_id = {loc_id: path_of(loc_id) for loc_id in by_id}
        self._id_by_path = {p: i for i, p in self._path_by_id.items()}

    def write_visits(self, person: int, s: set[str], reasons: Bitmap) -> None:
        """Replace the person's visit rows: one VisitedPlace row per checked
        vertex, one PlaceReason row per set reason bit, atomically."""
        for path in s:
            if path not in self._id_by_path:
                raise UnknownPathError(path)
            parent = parent_path(path)
            if parent and parent not in s:
                raise NotUpwardClosedError(path)
        if reasons & ~self.hierarchy.reasons_mask:
            raise DomainError(f"reason bits {reasons} outside mask")
        ordered = sorted(s, key=self._id_by_path.__getitem__)
        with self.store.transaction():
            self.require_person(person)
            self.store.delete_eq("VisitedPlace", {"IdPerson": person})
            self.store.delete_eq("PlaceReason", {"IdPerson": person})
            for path in ordered:
                self.store.insert(
                    "VisitedPlace",
                    {"IdPerson": person, "IdLocation": self._id_by_path[path]},
                )
            for bit, _ in self.hierarchy.reasons:
                if reasons & bit:
                    self.store.insert("PlaceReason", {"IdPerson": person, "IdReason": bit})

    def read_visits(self, person: int) -> tuple[set[str], Bitmap]:
        """Inverse of :meth:`write_visits`."""
        self.require_person(person)
        rows = self.store.select_eq("VisitedPlace", {"IdPerson": person}, ("IdLocation",))
        paths = {self._path_by_id[r[0]] for r in rows}
        reasons = 0
        for (bit,) in self.store.select_eq("PlaceReason", {"IdPerson": person}, ("IdReason",)):
            reasons |= bit
        return paths, reasons

    def report_query(self, person: int) -> list[ReportRow]:
        """Frontier paths via recursive traversal over Location joins."""
        self.require_person(person)
        if not self.store.supports_sql:
            return report_rows(self.load_record(person), self.hierarchy)
        raw = self.store.query_sql(_REPORT_SQL, (person, person, person))
        depth = self.hierarchy.max_depth
        rows = []
        for (path,) in raw:
            names = path.split("/")
            rows.append(ReportRow(cells=tuple(names) + (None,) * (depth - len(names))))
        rows.sort(key=lambda row: self._bfs_position["/".join(c for c in row.cells if c)])
        return rows

    # SelectionBackend surface
    def save_record(self, person: int, record: SelectionRecord) -> None:
        self.write_visits(person, checked_set(record, self.hierarchy), record.reasons)

    def load_record(self, person: int) -> SelectionRecord:
        paths, reasons = self.read_visits(person)
        record = record_from_checked_set(paths, self.hierarchy)
        record.reasons = reasons
        record.person_id = str(person)
        return record

    def report(self, person: int) -> list[ReportRow]:
        return self.report_query(person)
