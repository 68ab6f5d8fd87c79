import json
import math

import numpy as np
import pytest

from faultcast.evaluate import evaluate_events
from faultcast.formats import (
    event_json_line,
    iter_csv_lines,
    parse_sample_line,
    read_events_jsonl,
    sample_line,
    truth_from_json,
    truth_to_json,
    write_events_jsonl,
    write_samples_csv,
)
from faultcast.rig import GroundTruth


class TestSampleCsv:
    def test_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        values = list(rng.normal(size=200)) + [1e-17, 0.1, 1 / 3, 2.0**52 + 0.5]
        path = tmp_path / "s.csv"
        write_samples_csv(path, values)
        rows = []
        for chunk in iter_csv_lines(path):
            rows.extend(parse_sample_line(l) for l in chunk)
        assert [t for t, _ in rows] == list(range(len(values)))
        assert all(v == orig for (_, v), orig in zip(rows, values))

    def test_header_written_once(self, tmp_path):
        path = tmp_path / "s.csv"
        write_samples_csv(path, [1.0, 2.0])
        text = path.read_text().splitlines()
        assert text[0] == "t,value"
        assert len(text) == 3

    def test_malformed_lines_raise(self):
        for bad in ("", "1", "a,b", "-1,0.5", "1;2"):
            with pytest.raises(ValueError):
                parse_sample_line(bad)

    def test_headerless_file_still_iterates(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("0,1.5\n1,2.5\n")
        rows = [l for chunk in iter_csv_lines(path) for l in chunk]
        assert rows == ["0,1.5", "1,2.5"]

    def test_chunking(self, tmp_path):
        path = tmp_path / "s.csv"
        write_samples_csv(path, range(10))
        chunks = list(iter_csv_lines(path, chunk_lines=4))
        assert [len(c) for c in chunks] == [4, 4, 2]


class TestEventsJsonl:
    def test_write_and_read(self, tmp_path):
        events = [
            {"t": 1, "kind": "calibrated", "score": 0.0, "detail": "x"},
            {"t": 5, "kind": "fault_predicted", "score": -0.5, "eta": 128.0,
             "amplitude": 1.25, "detail": ""},
        ]
        path = tmp_path / "e.jsonl"
        write_events_jsonl(path, events)
        back = read_events_jsonl(path.read_text())
        assert back == events

    def test_each_line_is_json(self, tmp_path):
        events = [{"t": i, "kind": "calibrated", "score": 0.0, "detail": ""} for i in range(3)]
        path = tmp_path / "e.jsonl"
        write_events_jsonl(path, events)
        for line in path.read_text().splitlines():
            assert json.loads(line)["kind"] == "calibrated"

    def test_bad_line_raises(self):
        with pytest.raises(ValueError):
            read_events_jsonl('{"t": 1, "kind": "x"}\nnot json\n')
        with pytest.raises(ValueError):
            read_events_jsonl('[1, 2]\n')

    def test_nan_rejected_on_write(self):
        with pytest.raises(ValueError):
            event_json_line({"t": 1, "kind": "x", "score": math.nan, "detail": ""})


class TestTruthJson:
    def test_round_trip(self):
        truth = GroundTruth(1000, 500, 0.8, 1001)
        back = truth_from_json(truth_to_json(truth))
        assert back == truth

    def test_fault_free_is_empty_object(self):
        assert truth_to_json(None) == "{}"
        assert truth_from_json("{}") is None

    def test_bad_json_raises(self):
        with pytest.raises(ValueError):
            truth_from_json("nope")
        with pytest.raises(ValueError):
            truth_from_json('{"fault_onset": 3}')


class TestEvaluate:
    def _events(self, *specs):
        out = []
        for t, kind, eta in specs:
            ev = {"t": t, "kind": kind, "score": 0.5, "detail": ""}
            if eta is not None:
                ev["eta"] = eta
            out.append(ev)
        return out

    def test_fault_free_no_events(self):
        rep = evaluate_events([], None, 0.4)
        assert rep.detected is False
        assert rep.false_alarms == 0
        assert rep.events_total == 0

    def test_fault_free_counts_false_alarms(self):
        events = self._events((5, "fault_detected", None), (9, "calibrated", None))
        rep = evaluate_events(events, None, 0.4)
        assert rep.false_alarms == 1
        assert rep.detected is False
        assert rep.events_total == 2

    def test_detection_delay(self):
        truth = GroundTruth(4000, 2000, 1.0, 5000)
        events = self._events((5600, "fault_detected", None), (5700, "fault_detected", None))
        rep = evaluate_events(events, truth, 0.5)
        assert rep.detected is True
        assert rep.detection_delay == 600
        assert rep.false_alarms == 0

    def test_miss_has_no_delay(self):
        truth = GroundTruth(4000, 2000, 1.0, 5000)
        rep = evaluate_events([], truth, 0.5)
        assert rep.detected is False
        assert rep.detection_delay is None

    def test_eta_mape_arithmetic(self):
        truth = GroundTruth(1000, 1000, 1.0, 1001)
        # crossing at theta 0.5 -> t = 1500
        events = self._events((1100, "fault_predicted", 300.0),  # rem 400 -> err .25
                              (1300, "fault_predicted", 200.0))  # rem 200 -> err 0
        rep = evaluate_events(events, truth, 0.5)
        assert rep.eta_mape == pytest.approx(0.125)

    def test_predictions_past_crossing_skipped(self):
        truth = GroundTruth(1000, 1000, 1.0, 1001)
        events = self._events((1600, "fault_predicted", 50.0))
        rep = evaluate_events(events, truth, 0.5)
        assert rep.eta_mape == 0.0

    def test_report_dict_shape(self):
        truth = GroundTruth(1000, 1000, 1.0, 1001)
        events = self._events((1100, "fault_detected", None))
        d = evaluate_events(events, truth, 0.5).to_dict()
        assert list(d.keys()) == ["detected", "detection_delay", "false_alarms",
                                  "eta_mape", "events_total"]
