import json
from unittest.mock import patch

import pandas as pd
import pytest

from src import __version__
from src.reports import SCHEMA, assemble_report, export_table, render_report, summarize, summary_frame, write_report


@pytest.fixture
def config():
    return {"p": 3, "prec": 16, "trunc": 64}


@pytest.fixture
def checks():
    return {
        "checks": [
            {"check": 1, "name": "duality", "passed": True, "detail": "ok"},
            {"check": 2, "name": "bruhat", "passed": False, "detail": "сбой"},
        ],
        "passed": False,
    }


def test_assemble_report(config):
    report = assemble_report("cchi", config, {"conductor": "0"})
    assert report["schema"] == SCHEMA
    assert report["version"] == __version__
    assert report["status"] == "ok"
    assert assemble_report("cchi", config, {"error": "сбой"})["status"] == "error"


def test_render_is_canonical(config):
    first = render_report({"b": 1, "a": [1, 2], "c": "χ"})
    second = render_report({"c": "χ", "a": [1, 2], "b": 1})
    assert first == second
    assert first.endswith("\n")
    assert "χ" in first


def test_write_report_is_deterministic(tmp_path, config):
    paths = [tmp_path / "first.json", tmp_path / "second.json"]
    for path in paths:
        write_report("duality", config, {"rank": 2, "holds": True}, filename=str(path))
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert json.loads(paths[0].read_text(encoding="utf-8"))["result"]["rank"] == 2


def test_export_table(tmp_path, checks):
    path = tmp_path / "checks.jsonl"
    export_table(pd.DataFrame(checks["checks"]), filename=str(path))
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2
    assert json.loads(lines[1])["detail"] == "сбой"


@patch('src.reports.pd.DataFrame.to_json')  # Мокируем метод to_json
def test_export_table_with_mock(mock_to_json, tmp_path, checks):
    mock_to_json.return_value = None

    result = export_table(pd.DataFrame(checks["checks"]), filename=str(tmp_path / "checks.jsonl"))

    mock_to_json.assert_called_once()
    assert len(result) == 2


def test_summary_frame_for_checks(checks):
    frame = summary_frame(checks)
    assert list(frame["name"]) == ["duality", "bruhat"]


def test_summary_frame_flattens_nested():
    frame = summary_frame({"exactness": {"holds": True}, "rank": 2})
    assert set(frame["field"]) == {"exactness.holds", "rank"}
    assert summary_frame({}).empty


def test_summarize(config):
    text = summarize(assemble_report("bruhat", config, {"group_order": 48}))
    assert text.startswith("bruhat [ok]")
    assert "group_order" in text
