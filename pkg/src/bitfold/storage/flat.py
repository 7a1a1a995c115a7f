"""Flattened wide-table backend: one bitmap column per internal vertex.

The whole hierarchy collapses into a single VisitedLocation row per person.
Columns follow a breadth-first scan of the internal vertices, each holding
the children bitmap of its vertex, with IdReasons last; lookup tables carry
the (bit id, name) pairs per domain. Report reconstruction happens in a
generated view that walks every root-to-vertex path with bitwise-AND tests,
emitting one row per frontier vertex (checked, no checked children). The
view is only ever emitted as text here; it is created lazily on first use.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..hierarchy import Bitmap, Hierarchy, HierarchyError, Vertex, column_name
from ..selection import (
    InvalidRecordError,
    ReportRow,
    SelectionRecord,
    report_rows,
    validate_record,
)
from .base import PERSON_TABLE, SelectionBackend
from .ports import ColumnDef, TableDef, create_table_sql, insert_sql

VISITED_TABLE = "VisitedLocation"
REPORT_VIEW = "VisitedLocationReport"
_RESERVED_TABLES = {PERSON_TABLE.name, VISITED_TABLE, "Reason", REPORT_VIEW}


@dataclass(frozen=True)
class LookupTable:
    """One (bit id, name) lookup; ``source_path`` is the owning vertex."""

    table: TableDef
    id_column: str
    rows: tuple[tuple[Bitmap, str], ...]
    source_path: str


@dataclass(frozen=True)
class FlatSchema:
    person: TableDef
    visited: TableDef
    lookups: tuple[LookupTable, ...]
    columns: tuple[tuple[str, str], ...]  # (column name, source vertex path)

    def tables(self) -> list[TableDef]:
        return [self.person] + [lk.table for lk in self.lookups] + [self.visited]


def _lookup_name(token: str) -> str:
    return token[:-1] if token.endswith("s") and len(token) > 1 else token


def build_flat_schema(h: Hierarchy) -> FlatSchema:
    """Derive the wide-table schema from a hierarchy.

    Domain columns appear in breadth-first order between the key columns and
    IdReasons, so the row layout mirrors the level-by-level selection flow.
    """
    internals = h.internal_vertices_bfs()
    columns = tuple((column_name(v), v.path) for v in internals)

    lookups: list[LookupTable] = []
    owners: dict[str, str] = {}
    reserved = {t.lower() for t in _RESERVED_TABLES}
    for v in internals:
        assert v.column_token is not None
        name = _lookup_name(v.column_token)
        key = name.lower()  # SQL table names compare case-insensitively
        if key in reserved or key in owners:
            clash = owners.get(key, "a reserved table name")
            raise HierarchyError(v.path, f"lookup table {name!r} collides with {clash!r}")
        owners[key] = v.path
        id_column = "Id" + name
        table = TableDef(
            name,
            (
                ColumnDef(id_column, primary_key=True),
                ColumnDef("Name", kind="text", not_null=True),
            ),
        )
        rows = tuple((c.bit_id, c.name) for c in v.children)
        lookups.append(LookupTable(table, id_column, rows, v.path))

    reason_table = TableDef(
        "Reason",
        (
            ColumnDef("IdReason", primary_key=True),
            ColumnDef("Name", kind="text", not_null=True),
        ),
    )
    lookups.append(LookupTable(reason_table, "IdReason", h.reasons, "~reasons"))

    visited_cols = [
        ColumnDef("IdVisitedLocation", primary_key=True),
        ColumnDef(
            "IdPerson", not_null=True, unique=True, references="Person (IdPerson)"
        ),
    ]
    visited_cols += [
        ColumnDef(col, not_null=True, default=0) for col, _ in columns
    ]
    visited_cols.append(ColumnDef("IdReasons", not_null=True, default=0))
    visited = TableDef(VISITED_TABLE, tuple(visited_cols))

    return FlatSchema(PERSON_TABLE, visited, tuple(lookups), columns)


def emit_schema_ddl(h: Hierarchy) -> str:
    """Deterministic DDL text: Person, seeded lookup tables, VisitedLocation.

    Lookup tables carry no foreign keys; the tree relationships they encode
    live in the business layer, not in referential constraints.
    """
    schema = build_flat_schema(h)
    chunks = [create_table_sql(schema.person)]
    for lk in schema.lookups:
        chunks.append(create_table_sql(lk.table))
        if lk.rows:
            chunks.append(
                "\n".join(
                    insert_sql(lk.table.name, (lk.id_column, "Name"), row) for row in lk.rows
                )
            )
    chunks.append(create_table_sql(schema.visited))
    return "\n\n".join(chunks) + "\n"


def emit_report_view_ddl(h: Hierarchy) -> str:
    """Deterministic DDL for the consolidated report view.

    One UNION ALL branch per vertex, in breadth-first order: the branch joins
    the lookup tables along the root-to-vertex path (names come from the
    lookups, bit tests from literal bit ids) and keeps only frontier rows.
    This function only generates text; nothing is executed.
    """
    schema = build_flat_schema(h)
    column_by_path = {path: col for col, path in schema.columns}
    lookup_by_path = {lk.source_path: lk for lk in schema.lookups}
    depth = h.max_depth

    branches: list[str] = []
    for v in h.vertices_bfs():
        hops: list[Vertex] = []
        node = v
        while node.path:
            hops.append(node)
            node = h.vertex(
                node.path.rsplit("/", 1)[0] if "/" in node.path else ""
            )
        hops.reverse()

        selects = ["vl.IdPerson AS IdPerson"]
        joins = []
        tests = []
        for level, hop in enumerate(hops, start=1):
            parent_path = hops[level - 2].path if level > 1 else ""
            lookup = lookup_by_path[parent_path]
            alias = f"l{level}"
            selects.append(f"{alias}.Name AS Level{level}")
            joins.append(
                f"JOIN {lookup.table.name} {alias} ON {alias}.{lookup.id_column} = {hop.bit_id}"
            )
            tests.append(f"(vl.{column_by_path[parent_path]} & {hop.bit_id}) <> 0")
        for level in range(len(hops) + 1, depth + 1):
            selects.append(f"NULL AS Level{level}")
        if v.is_internal:
            tests.append(f"vl.{column_by_path[v.path]} = 0")

        branch = "SELECT " + ", ".join(selects) + "\nFROM VisitedLocation vl"
        if joins:
            branch += "\n" + "\n".join(joins)
        branch += "\nWHERE " + " AND ".join(tests)
        branches.append(branch)

    body = "\nUNION ALL\n".join(branches)
    return f"CREATE VIEW {REPORT_VIEW} AS\n{body};\n"


class BitmapBackend(SelectionBackend):
    """Persist selection records in the flattened wide table."""

    name = "pbfd"

    def __init__(self, store, hierarchy: Hierarchy):
        super().__init__(store, hierarchy)
        self.schema = build_flat_schema(hierarchy)
        self._bfs_position = {
            v.path: i for i, v in enumerate(hierarchy.vertices_bfs())
        }
        self._view_ready = False

    def tables(self) -> list[TableDef]:
        return self.schema.tables()

    def initialize(self) -> None:
        self.store.create_tables(self.tables())
        for lk in self.schema.lookups:
            if self.store.row_count(lk.table.name):
                continue
            with self.store.transaction():
                for bit, name in lk.rows:
                    self.store.insert(lk.table.name, {lk.id_column: bit, "Name": name})

    def _row_values(self, record: SelectionRecord) -> dict[str, int]:
        values = {col: record.bitmap_at(path) for col, path in self.schema.columns}
        values["IdReasons"] = record.reasons
        return values

    def upsert_record(self, person: int, record: SelectionRecord) -> None:
        """Write the person's single row atomically; invalid records are
        rejected before anything is touched."""
        violations = validate_record(record, self.hierarchy)
        if violations:
            raise InvalidRecordError(violations)
        values = self._row_values(record)
        with self.store.transaction():
            self.require_person(person)
            existing = self.store.select_eq(
                VISITED_TABLE, {"IdPerson": person}, ("IdVisitedLocation",)
            )
            if existing:
                self.store.update_eq(
                    VISITED_TABLE, {"IdVisitedLocation": existing[0][0]}, values
                )
            else:
                row_id = self.store.max_value(VISITED_TABLE, "IdVisitedLocation") + 1
                self.store.insert(
                    VISITED_TABLE,
                    {"IdVisitedLocation": row_id, "IdPerson": person, **values},
                )

    def read_record(self, person: int) -> SelectionRecord:
        """Reverse of the write: non-zero columns become bitmap entries; a
        person without a row reads as the empty record."""
        self.require_person(person)
        wanted = [col for col, _ in self.schema.columns] + ["IdReasons"]
        rows = self.store.select_eq(VISITED_TABLE, {"IdPerson": person}, wanted)
        if not rows:
            return SelectionRecord(person_id=str(person))
        row = rows[0]
        bitmaps = {
            path: value
            for (col, path), value in zip(self.schema.columns, row)
            if value
        }
        return SelectionRecord(bitmaps=bitmaps, reasons=row[-1], person_id=str(person))

    # SelectionBackend surface
    def save_record(self, person: int, record: SelectionRecord) -> None:
        self.upsert_record(person, record)

    def load_record(self, person: int) -> SelectionRecord:
        return self.read_record(person)

    def _ensure_view(self) -> None:
        if self._view_ready:
            return
        ddl = emit_report_view_ddl(self.hierarchy)
        self.store.execute_script(
            ddl.replace("CREATE VIEW ", "CREATE VIEW IF NOT EXISTS ", 1)
        )
        self._view_ready = True

    def report(self, person: int) -> list[ReportRow]:
        """Query the (lazily created) report view; on stores without SQL the
        in-process frontier walk gives the same rows."""
        self.require_person(person)
        if not self.store.supports_sql:
            return report_rows(self.load_record(person), self.hierarchy)
        self._ensure_view()
        levels = ", ".join(f"Level{i}" for i in range(1, self.hierarchy.max_depth + 1))
        raw = self.store.query_sql(
            f"SELECT {levels} FROM {REPORT_VIEW} WHERE IdPerson = ?", (person,)
        )
        rows = [ReportRow(cells=tuple(r)) for r in raw]
        rows.sort(key=lambda row: self._bfs_position["/".join(c for c in row.cells if c)])
        return rows
