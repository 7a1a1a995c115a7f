"""Narrow storage port shared by both backends.

Backends describe their tables as :class:`TableDef` values and talk to the
store through row-level operations (insert/update/delete/select by equality),
so the same backend logic runs against the embedded SQL engine and against a
dict-based in-memory fake. SQL text (DDL and report queries) is only
meaningful on stores with ``supports_sql``.

Logical storage accounting uses the declared column widths: 8 bytes per
64-bit integer column, the declared character width for text.
"""
from __future__ import annotations

import sqlite3
import threading
from collections.abc import Iterable, Mapping, Sequence
from contextlib import contextmanager
from dataclasses import dataclass

INT_WIDTH = 8
TEXT_WIDTH = 64


class StoreError(RuntimeError):
    pass


class UnknownPersonError(LookupError):
    def __init__(self, person_id: int):
        self.person_id = person_id
        super().__init__(f"unknown person {person_id}")


@dataclass(frozen=True)
class ColumnDef:
    name: str
    kind: str = "int"  # "int" | "text"
    not_null: bool = False
    default: int | None = None
    primary_key: bool = False
    unique: bool = False
    references: str | None = None  # "Table (Column)"

    @property
    def width(self) -> int:
        return INT_WIDTH if self.kind == "int" else TEXT_WIDTH


@dataclass(frozen=True)
class TableDef:
    name: str
    columns: tuple[ColumnDef, ...]
    composite_pk: tuple[str, ...] = ()

    @property
    def row_width(self) -> int:
        return sum(c.width for c in self.columns)

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)


@dataclass(frozen=True)
class StorageReport:
    logical_bytes: int
    physical_bytes: int
    row_counts: dict[str, int]


def create_table_sql(table: TableDef, if_not_exists: bool = False) -> str:
    """Render one standard-SQL CREATE TABLE statement for ``table``."""
    lines = []
    for c in table.columns:
        if c.kind == "int":
            sql_type = "INTEGER PRIMARY KEY" if c.primary_key else "BIGINT"
        else:
            sql_type = f"VARCHAR({TEXT_WIDTH})"
        parts = [f"    {c.name} {sql_type}"]
        if c.not_null and not c.primary_key:
            parts.append("NOT NULL")
        if c.unique:
            parts.append("UNIQUE")
        if c.default is not None:
            parts.append(f"DEFAULT {c.default}")
        if c.references:
            parts.append(f"REFERENCES {c.references}")
        lines.append(" ".join(parts))
    if table.composite_pk:
        lines.append(f"    PRIMARY KEY ({', '.join(table.composite_pk)})")
    exists = "IF NOT EXISTS " if if_not_exists else ""
    body = ",\n".join(lines)
    return f"CREATE TABLE {exists}{table.name} (\n{body}\n);"


def insert_sql(table: str, columns: Sequence[str], row: Sequence[int | str]) -> str:
    """Render a literal INSERT for DDL seed text."""
    rendered = ", ".join(
        str(v) if isinstance(v, int) else "'" + str(v).replace("'", "''") + "'" for v in row
    )
    return f"INSERT INTO {table} ({', '.join(columns)}) VALUES ({rendered});"


class SqliteStore:
    """Embedded relational store. ``dsn`` is a file path or \":memory:\".

    All access is serialized through one connection-level lock; callers use
    :meth:`transaction` around multi-statement writes.
    """

    supports_sql = True

    def __init__(self, dsn: str = ":memory:"):
        self.dsn = dsn
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(dsn, check_same_thread=False)
        self._conn.isolation_level = None  # explicit transaction control
        cur = self._conn.cursor()
        cur.execute("PRAGMA journal_mode=%s" % ("MEMORY" if dsn == ":memory:" else "WAL"))
        cur.execute("PRAGMA synchronous=NORMAL")
        cur.execute("PRAGMA foreign_keys=ON")
        cur.close()
        self._tables: dict[str, TableDef] = {}

    def close(self) -> None:
        self._conn.close()

    @contextmanager
    def transaction(self):
        with self._lock:
            self._conn.execute("BEGIN")
            try:
                yield
            except BaseException:
                self._conn.execute("ROLLBACK")
                raise
            self._conn.execute("COMMIT")

    def create_tables(self, tables: Iterable[TableDef]) -> None:
        with self._lock:
            for t in tables:
                self._tables[t.name] = t
                self._conn.execute(create_table_sql(t, if_not_exists=True))

    def has_table(self, name: str) -> bool:
        with self._lock:
            row = self._conn.execute(
                "SELECT COUNT(*) FROM sqlite_master WHERE type = 'table' AND name = ?",
                (name,),
            ).fetchone()
        return bool(row[0])

    def table_def(self, name: str) -> TableDef:
        return self._tables[name]

    def insert(self, table: str, row: Mapping[str, int | str | None]) -> None:
        cols = ", ".join(row)
        marks = ", ".join("?" for _ in row)
        with self._lock:
            try:
                self._conn.execute(
                    f"INSERT INTO {table} ({cols}) VALUES ({marks})", tuple(row.values())
                )
            except sqlite3.IntegrityError as exc:
                raise StoreError(f"insert into {table} violates a constraint: {exc}") from exc

    def update_eq(
        self, table: str, eq: Mapping[str, int | str], values: Mapping[str, int | str | None]
    ) -> int:
        sets = ", ".join(f"{c} = ?" for c in values)
        where = " AND ".join(f"{c} = ?" for c in eq)
        with self._lock:
            cur = self._conn.execute(
                f"UPDATE {table} SET {sets} WHERE {where}",
                tuple(values.values()) + tuple(eq.values()),
            )
        return cur.rowcount

    def delete_eq(self, table: str, eq: Mapping[str, int | str]) -> int:
        where = " AND ".join(f"{c} = ?" for c in eq)
        with self._lock:
            cur = self._conn.execute(f"DELETE FROM {table} WHERE {where}", tuple(eq.values()))
        return cur.rowcount

    def select_eq(
        self, table: str, eq: Mapping[str, int | str], columns: Sequence[str]
    ) -> list[tuple]:
        cols = ", ".join(columns)
        sql = f"SELECT {cols} FROM {table}"
        params: tuple = ()
        if eq:
            sql += " WHERE " + " AND ".join(f"{c} = ?" for c in eq)
            params = tuple(eq.values())
        with self._lock:
            return list(self._conn.execute(sql, params).fetchall())

    def row_count(self, table: str) -> int:
        with self._lock:
            return self._conn.execute(f"SELECT COUNT(*) FROM {table}").fetchone()[0]

    def max_value(self, table: str, column: str) -> int:
        with self._lock:
            value = self._conn.execute(f"SELECT MAX({column}) FROM {table}").fetchone()[0]
        return value if value is not None else 0

    def byte_size(self) -> int:
        """Backing-store size: page count times page size (WAL included
        after checkpoint)."""
        with self._lock:
            if self.dsn != ":memory:":
                self._conn.execute("PRAGMA wal_checkpoint(TRUNCATE)")
            pages = self._conn.execute("PRAGMA page_count").fetchone()[0]
            page_size = self._conn.execute("PRAGMA page_size").fetchone()[0]
        return pages * page_size

    def execute_script(self, sql: str) -> None:
        with self._lock:
            self._conn.executescript(sql)

    def query_sql(self, sql: str, params: Sequence = ()) -> list[tuple]:
        with self._lock:
            return list(self._conn.execute(sql, params).fetchall())


class MemoryStore:
    """Dict-backed fake honoring the same port; no SQL surface.

    Enforces primary-key and UNIQUE constraints so conformance tests catch
    the same mistakes the engine would. ``byte_size`` reports the logical
    row bytes (the fake has no pages)."""

    supports_sql = False

    def __init__(self):
        self._lock = threading.RLock()
        self._tables: dict[str, TableDef] = {}
        self._rows: dict[str, list[dict]] = {}

    def close(self) -> None:
        pass

    @contextmanager
    def transaction(self):
        with self._lock:
            yield

    def create_tables(self, tables: Iterable[TableDef]) -> None:
        with self._lock:
            for t in tables:
                self._tables[t.name] = t
                self._rows.setdefault(t.name, [])

    def has_table(self, name: str) -> bool:
        return name in self._tables

    def table_def(self, name: str) -> TableDef:
        return self._tables[name]

    def _unique_keys(self, table: TableDef) -> list[tuple[str, ...]]:
        keys = [(c.name,) for c in table.columns if c.primary_key or c.unique]
        if table.composite_pk:
            keys.append(table.composite_pk)
        return keys

    def insert(self, table: str, row: Mapping[str, int | str | None]) -> None:
        with self._lock:
            tdef = self._tables[table]
            stored = {c.name: row.get(c.name, c.default) for c in tdef.columns}
            for key in self._unique_keys(tdef):
                probe = tuple(stored[c] for c in key)
                for existing in self._rows[table]:
                    if tuple(existing[c] for c in key) == probe:
                        raise StoreError(
                            f"insert into {table} violates a constraint: duplicate {key}"
                        )
            self._rows[table].append(stored)

    def update_eq(
        self, table: str, eq: Mapping[str, int | str], values: Mapping[str, int | str | None]
    ) -> int:
        with self._lock:
            hits = 0
            for row in self._rows[table]:
                if all(row[c] == v for c, v in eq.items()):
                    row.update(values)
                    hits += 1
            return hits

    def delete_eq(self, table: str, eq: Mapping[str, int | str]) -> int:
        with self._lock:
            keep = [r for r in self._rows[table] if not all(r[c] == v for c, v in eq.items())]
            removed = len(self._rows[table]) - len(keep)
            self._rows[table] = keep
            return removed

    def select_eq(
        self, table: str, eq: Mapping[str, int | str], columns: Sequence[str]
    ) -> list[tuple]:
        with self._lock:
            return [
                tuple(row[c] for c in columns)
                for row in self._rows[table]
                if all(row[c] == v for c, v in eq.items())
            ]

    def row_count(self, table: str) -> int:
        with self._lock:
            return len(self._rows[table])

    def max_value(self, table: str, column: str) -> int:
        with self._lock:
            values = [r[column] for r in self._rows[table] if r[column] is not None]
        return max(values, default=0)

    def byte_size(self) -> int:
        with self._lock:
            return sum(
                len(rows) * self._tables[name].row_width for name, rows in self._rows.items()
            )


def open_store(dsn: str) -> SqliteStore:
    """Open the embedded store for a DSN (file path or \":memory:\")."""
    return SqliteStore(dsn)
