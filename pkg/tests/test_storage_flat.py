from __future__ import annotations

import json
import random

import pytest

from bitfold.hierarchy import HierarchyError, parse_hierarchy
from bitfold.selection import (
    InvalidRecordError,
    SelectionRecord,
    report_rows,
)
from bitfold.storage import MemoryStore, SqliteStore, UnknownPersonError, create_backend
from bitfold.storage.flat import (
    BitmapBackend,
    build_flat_schema,
    emit_report_view_ddl,
    emit_schema_ddl,
)
from .conftest import DDL_DIR
from .helpers import random_hierarchy, random_record

EXPECTED_COLUMNS = [
    ("IdContinents", ""),
    ("IdAntarcticas", "Antarctica"),
    ("IdAsias", "Asia"),
    ("IdNorthAmericas", "North America"),
    ("IdChinas", "Asia/China"),
    ("IdUnitedStates", "North America/United States"),
    ("IdHunans", "Asia/China/Hunan"),
    ("IdMarylands", "North America/United States/Maryland"),
    ("IdChangshas", "Asia/China/Hunan/Changsha"),
    ("IdHowards", "North America/United States/Maryland/Howard"),
]


@pytest.fixture(params=["sqlite", "memory"])
def backend(request, places):
    store = SqliteStore(":memory:") if request.param == "sqlite" else MemoryStore()
    yield create_backend("pbfd", store, places)
    store.close()


class TestSchema:
    def test_breadth_first_column_order(self, places):
        schema = build_flat_schema(places)
        assert list(schema.columns) == EXPECTED_COLUMNS
        names = schema.visited.column_names
        assert names[0] == "IdVisitedLocation"
        assert names[1] == "IdPerson"
        assert names[-1] == "IdReasons"

    def test_continent_lookup_is_the_published_table(self, places):
        schema = build_flat_schema(places)
        continent = schema.lookups[0]
        assert continent.table.name == "Continent"
        assert continent.id_column == "IdContinent"
        assert continent.rows == (
            (1, "Africa"),
            (2, "Antarctica"),
            (4, "Asia"),
            (8, "Australia"),
            (16, "Europe"),
            (32, "North America"),
            (64, "South America"),
        )

    def test_single_level_hierarchy_schema(self):
        h = parse_hierarchy(
            json.dumps(
                {"levelLabel": "L", "columnToken": "Options", "children": [{"name": "only"}]}
            )
        )
        schema = build_flat_schema(h)
        assert schema.visited.column_names == (
            "IdVisitedLocation",
            "IdPerson",
            "IdOptions",
            "IdReasons",
        )

    def test_lookup_name_collisions_rejected(self):
        text = json.dumps(
            {
                "levelLabel": "L",
                "columnToken": "Roots",
                "children": [
                    {"name": "a", "columnToken": "Foos", "children": [{"name": "x"}]},
                    {"name": "b", "columnToken": "Foo", "children": [{"name": "y"}]},
                ],
            }
        )
        with pytest.raises(HierarchyError):
            build_flat_schema(parse_hierarchy(text))

    def test_schema_ddl_matches_golden(self, places):
        assert emit_schema_ddl(places) == (DDL_DIR / "pbfd.sql").read_text()

    def test_view_ddl_matches_golden(self, places):
        assert emit_report_view_ddl(places) == (DDL_DIR / "pbfd_report_view.sql").read_text()

    def test_ddl_emission_is_deterministic(self, places, places_text):
        again = parse_hierarchy(places_text)
        assert emit_schema_ddl(places) == emit_schema_ddl(again)
        assert emit_report_view_ddl(places) == emit_report_view_ddl(again)

    def test_ddl_contains_published_columns_and_keys(self, places):
        ddl = emit_schema_ddl(places)
        for col in ("IdContinents", "IdUnitedStates", "IdMarylands", "IdChinas",
                    "IdHunans", "IdReasons"):
            assert col in ddl
        assert "REFERENCES Person (IdPerson)" in ddl
        # lookup tables carry no foreign keys
        person_block = ddl.split("CREATE TABLE Continent")[1].split("CREATE TABLE VisitedLocation")[0]
        assert "REFERENCES" not in person_block


class TestPersistence:
    def test_upsert_root_36_row_values(self, places):
        store = SqliteStore(":memory:")
        backend = create_backend("pbfd", store, places)
        person = backend.create_person("Ada")
        backend.upsert_record(person, SelectionRecord(bitmaps={"": 36}))
        row = store.select_eq(
            "VisitedLocation", {"IdPerson": person},
            [c for c, _ in EXPECTED_COLUMNS] + ["IdReasons"],
        )[0]
        assert row[0] == 36
        assert all(v == 0 for v in row[1:])

    def test_upsert_is_idempotent_one_row(self, backend, fig1_record):
        person = backend.create_person("Ada")
        backend.upsert_record(person, fig1_record)
        backend.upsert_record(person, fig1_record)
        assert backend.store.row_count("VisitedLocation") == 1
        assert backend.read_record(person) == fig1_record

    def test_invalid_record_rejected_without_write(self, backend, fig1_record):
        person = backend.create_person("Ada")
        backend.upsert_record(person, fig1_record)
        orphan = SelectionRecord(bitmaps={"": 2, "Asia/China": 1})
        with pytest.raises(InvalidRecordError):
            backend.upsert_record(person, orphan)
        assert backend.read_record(person) == fig1_record

    def test_read_round_trips(self, backend, fig1_record):
        person = backend.create_person("Ada")
        backend.upsert_record(person, fig1_record)
        assert backend.read_record(person) == fig1_record

    def test_fresh_person_reads_empty_record(self, backend):
        person = backend.create_person("Fresh")
        record = backend.read_record(person)
        assert record.is_empty

    def test_unknown_person_errors(self, backend, fig1_record):
        with pytest.raises(UnknownPersonError):
            backend.read_record(999)
        with pytest.raises(UnknownPersonError):
            backend.upsert_record(999, fig1_record)

    def test_update_replaces_stale_bits(self, backend, fig1_record):
        person = backend.create_person("Ada")
        backend.upsert_record(person, fig1_record)
        backend.upsert_record(person, SelectionRecord(bitmaps={"": 1}))
        assert backend.read_record(person) == SelectionRecord(bitmaps={"": 1})

    def test_round_trip_many_random_records(self, places):
        rng = random.Random(42)
        store = SqliteStore(":memory:")
        backend = create_backend("pbfd", store, places)
        for i in range(50):
            person = backend.create_person(f"p{i}")
            record = random_record(rng, places)
            backend.upsert_record(person, record)
            assert backend.read_record(person) == record
        store.close()


class TestReportView:
    def test_view_rows_equal_in_process_rows(self, places, fig1_record):
        store = SqliteStore(":memory:")
        backend = create_backend("pbfd", store, places)
        person = backend.create_person("Ada")
        backend.upsert_record(person, fig1_record)
        rows = backend.report(person)
        assert rows == report_rows(fig1_record, places)
        assert len(rows) == 3

    def test_view_on_empty_table_returns_no_rows(self, places):
        store = SqliteStore(":memory:")
        backend = create_backend("pbfd", store, places)
        store.execute_script(emit_report_view_ddl(places))
        assert store.query_sql("SELECT * FROM VisitedLocationReport") == []

    def test_view_is_not_created_until_first_report(self, places, fig1_record):
        store = SqliteStore(":memory:")
        backend = create_backend("pbfd", store, places)
        person = backend.create_person("Ada")
        backend.upsert_record(person, fig1_record)
        views = store.query_sql(
            "SELECT name FROM sqlite_master WHERE type = 'view'"
        )
        assert views == []
        backend.report(person)
        views = store.query_sql("SELECT name FROM sqlite_master WHERE type = 'view'")
        assert views == [("VisitedLocationReport",)]

    def test_view_matches_oracle_on_random_hierarchies(self):
        rng = random.Random(9)
        for _ in range(8):
            h = random_hierarchy(rng, max_vertices=80)
            store = SqliteStore(":memory:")
            backend = create_backend("pbfd", store, h)
            for i in range(4):
                person = backend.create_person(f"p{i}")
                record = random_record(rng, h)
                backend.upsert_record(person, record)
                view_rows = {row.cells for row in backend.report(person)}
                oracle_rows = {row.cells for row in report_rows(record, h)}
                assert view_rows == oracle_rows
            store.close()


class TestStorageAccounting:
    def test_empty_store_counts_only_seed_rows(self, places):
        store = SqliteStore(":memory:")
        backend = create_backend("pbfd", store, places)
        report = backend.measure_storage()
        assert report.row_counts["VisitedLocation"] == 0
        assert report.row_counts["Person"] == 0
        # 16 lookup rows (one per vertex) + 4 reasons, each 8 + 64 bytes wide
        assert report.logical_bytes == 20 * 72

    def test_n_identical_upserts_cost_n_row_widths(self, places, fig1_record):
        store = SqliteStore(":memory:")
        backend = create_backend("pbfd", store, places)
        schema = build_flat_schema(places)
        base = backend.measure_storage().logical_bytes
        n = 5
        for i in range(n):
            person = backend.create_person(f"p{i}")
            backend.upsert_record(person, fig1_record)
        report = backend.measure_storage()
        person_width = schema.person.row_width
        assert report.row_counts["VisitedLocation"] == n
        assert (
            report.logical_bytes - base
            == n * schema.visited.row_width + n * person_width
        )

    def test_row_width_is_independent_of_selection_density(self, places, fig1_record):
        schema = build_flat_schema(places)
        store = SqliteStore(":memory:")
        backend = create_backend("pbfd", store, places)
        p1 = backend.create_person("empty")
        p2 = backend.create_person("full")
        backend.upsert_record(p1, SelectionRecord())
        backend.upsert_record(p2, fig1_record)
        report = backend.measure_storage()
        visited_bytes = report.row_counts["VisitedLocation"] * schema.visited.row_width
        assert report.row_counts["VisitedLocation"] == 2
        assert visited_bytes == 2 * schema.visited.row_width  # constant per row
