import json

import pytest

from ffwd import report
from ffwd.errors import InvariantViolation, IoFailure
from ffwd.metrics import MetricsReport
from ffwd.model import BridgeSegment, Entry, Segment, Selection
from ffwd.profile import RatePlan


def _plan():
    return RatePlan((Segment(0, 49, 0, 14.0), Segment(50, 99, 2, 2.0)), 10.0, 1.0, 40.0)


def _selection():
    entries = [Entry(3, 0), Entry(20, 0, "smoothed"), Entry(35, 0, "gapfill"), Entry(60, 1)]
    return Selection(entries, 10.0, (BridgeSegment(20, 60, 8.0, 0),))


def test_plan_round_trip(tmp_path):
    path = tmp_path / "plan.json"
    report.write_report(report.plan_to_dict(_plan()), path)
    assert report.plan_from_dict(report.read_report(path, report.PLAN_SCHEMA)) == _plan()


def test_selection_round_trip(tmp_path):
    path = tmp_path / "sel.json"
    report.write_report(report.selection_to_dict(_selection(), "final", 100), path)
    obj = report.read_report(path, report.SELECTION_SCHEMA)
    assert obj["count"] == 4 and obj["n_frames"] == 100
    assert report.selection_from_dict(obj) == _selection()


def test_metrics_not_available_round_trip():
    rep = MetricsReport(None, 0.5, 0.9, None, 36.0, 9.5, 10.0, 1000, 105)
    obj = report.metrics_to_dict(rep)
    assert obj["instability"] == "NotAvailable" and obj["discontinuity"] == "NotAvailable"
    assert report.metrics_from_dict(json.loads(report.dumps(obj))) == rep


def test_dumps_layout_is_stable():
    text = report.dumps(report.plan_to_dict(_plan()))
    assert text == report.dumps(report.plan_to_dict(_plan()))
    lines = text.splitlines()
    assert lines[0] == "{" and lines[-1] == "}"
    assert lines[1] == '  "schema": "ffwd.rateplan/1",'
    assert '    {"start": 0, "end": 49, "level": 0, "speedup": 14.0},' in lines
    assert text.endswith("\n")


def test_schema_checked(tmp_path):
    path = tmp_path / "plan.json"
    report.write_report(report.plan_to_dict(_plan()), path)
    with pytest.raises(InvariantViolation):
        report.read_report(path, report.SELECTION_SCHEMA)
    path.write_text("{not json")
    with pytest.raises(InvariantViolation):
        report.read_report(path)
    with pytest.raises(IoFailure):
        report.read_report(tmp_path / "absent.json")


def test_ragged_selection_rejected():
    obj = report.selection_to_dict(_selection())
    obj["segment"].pop()
    with pytest.raises(InvariantViolation):
        report.selection_from_dict(obj)
