from __future__ import annotations

import csv

import pytest

from bitfold.cli import main
from .conftest import DDL_DIR, PLACES_PATH


def test_ddl_subcommand_prints_schema(capsys):
    assert main(["ddl", "--hierarchy", str(PLACES_PATH)]) == 0
    out = capsys.readouterr().out
    assert out == (DDL_DIR / "pbfd.sql").read_text()


def test_ddl_view_flag(capsys):
    assert main(["ddl", "--hierarchy", str(PLACES_PATH), "--view"]) == 0
    assert capsys.readouterr().out == (DDL_DIR / "pbfd_report_view.sql").read_text()


def test_ddl_traditional(capsys):
    assert main(["ddl", "--backend", "traditional"]) == 0
    assert capsys.readouterr().out == (DDL_DIR / "traditional.sql").read_text()


def test_bench_end_to_end(tmp_path, capsys):
    out = tmp_path / "results.csv"
    code = main(
        [
            "bench",
            "--hierarchy",
            str(PLACES_PATH),
            "--visitors",
            "25",
            "--density",
            "0.5",
            "--seed",
            "42",
            "--out",
            str(out),
            "--quiet",
        ]
    )
    assert code == 0
    with open(out) as f:
        rows = list(csv.DictReader(f))
    assert {(r["backend"], r["op"]) for r in rows} == {
        (b, op) for b in ("pbfd", "traditional") for op in ("write", "read", "report")
    }
    text = capsys.readouterr().out
    assert "traditional / pbfd" in text
    assert "7-8x" in text


def test_bench_single_backend(tmp_path):
    out = tmp_path / "one.csv"
    code = main(
        [
            "bench",
            "--hierarchy",
            str(PLACES_PATH),
            "--backend",
            "pbfd",
            "--visitors",
            "5",
            "--out",
            str(out),
            "--quiet",
        ]
    )
    assert code == 0
    with open(out) as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 3


def test_unknown_subcommand_fails():
    with pytest.raises(SystemExit):
        main(["nope"])
