import json

import pytest

from faultcast.cli import main
from faultcast.formats import read_events_jsonl

SIM_FAULT = """
sim.total_samples = 120000
sim.pulse_period = 1024
sim.carrier_cycles = 4
sim.samples_per_cycle = 16
sim.echo_delay = 256
sim.echo_amp_max = 0.8
sim.fault_onset = 60000
sim.fault_ramp = 30000
sim.noise_sd = 0.05

signal.frame_len = 1024
signal.hop_len = 1024
filter.mode = ma
filter.ma_window = 3
som.grid = 2
som.k_label = 2.0
svm.c = 0.5
svm.gamma = 0.1
svm.budget = 128
engine.calib_frames = 20
engine.trend_window = 20
engine.slope_min = 0.3
"""


def write_config(tmp_path, text, name="cfg.txt"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestSimulate:
    def test_writes_csv_and_truth(self, tmp_path, capsys):
        cfg = write_config(tmp_path, SIM_FAULT)
        out = tmp_path / "s.csv"
        truth = tmp_path / "t.json"
        code = main(["simulate", "--config", cfg, "--out", str(out),
                     "--truth", str(truth), "--seed", "42"])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t,value"
        assert len(lines) == 120001
        doc = json.loads(truth.read_text())
        assert doc["fault_onset"] == 60000
        assert doc["first_exceed"] == 60001

    def test_fault_free_truth_is_empty(self, tmp_path):
        cfg = write_config(tmp_path, SIM_FAULT.replace("sim.echo_amp_max = 0.8", "sim.echo_amp_max = 0.0"))
        out = tmp_path / "s.csv"
        truth = tmp_path / "t.json"
        assert main(["simulate", "--config", cfg, "--out", str(out),
                     "--truth", str(truth)]) == 0
        assert json.loads(truth.read_text()) == {}

    def test_byte_identical_under_same_seed(self, tmp_path):
        cfg = write_config(tmp_path, SIM_FAULT)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["simulate", "--config", cfg, "--out", str(a), "--seed", "3"]) == 0
        assert main(["simulate", "--config", cfg, "--out", str(b), "--seed", "3"]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_bad_config_exit_2(self, tmp_path):
        cfg = write_config(tmp_path, "bogus.key = 1")
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "x.csv")]) == 2

    def test_unreadable_config_exit_3(self, tmp_path):
        assert main(["simulate", "--config", str(tmp_path / "missing.txt"),
                     "--out", str(tmp_path / "x.csv")]) == 3


class TestRun:
    @pytest.fixture()
    def fault_csv(self, tmp_path):
        cfg = write_config(tmp_path, SIM_FAULT)
        out = tmp_path / "s.csv"
        truth = tmp_path / "t.json"
        assert main(["simulate", "--config", cfg, "--out", str(out),
                     "--truth", str(truth), "--seed", "42"]) == 0
        return cfg, out, truth

    def test_run_produces_events(self, tmp_path, fault_csv):
        cfg, csv_path, _ = fault_csv
        events = tmp_path / "e.jsonl"
        code = main(["run", "--config", cfg, "--in", str(csv_path),
                     "--events", str(events), "--seed", "42"])
        assert code == 0
        evs = read_events_jsonl(events.read_text())
        kinds = [e["kind"] for e in evs]
        assert kinds.count("calibrated") == 1
        assert "fault_detected" in kinds

    def test_empty_data_file(self, tmp_path):
        cfg = write_config(tmp_path, SIM_FAULT)
        src = tmp_path / "empty.csv"
        src.write_text("t,value\n")
        events = tmp_path / "e.jsonl"
        assert main(["run", "--config", cfg, "--in", str(src),
                     "--events", str(events)]) == 0
        assert events.read_text() == ""

    def test_stream_shorter_than_calibration(self, tmp_path):
        cfg = write_config(tmp_path, SIM_FAULT)
        src = tmp_path / "short.csv"
        src.write_text("t,value\n" + "\n".join(f"{i},{0.1 * i}" for i in range(500)) + "\n")
        events = tmp_path / "e.jsonl"
        assert main(["run", "--config", cfg, "--in", str(src),
                     "--events", str(events)]) == 0
        assert all(e["kind"] != "calibrated" for e in read_events_jsonl(events.read_text()))

    def test_mostly_malformed_exit_4(self, tmp_path):
        cfg = write_config(tmp_path, SIM_FAULT)
        src = tmp_path / "bad.csv"
        rows = ["t,value"] + ["garbage"] * 50 + [f"{i},{float(i)}" for i in range(10)]
        src.write_text("\n".join(rows) + "\n")
        events = tmp_path / "e.jsonl"
        assert main(["run", "--config", cfg, "--in", str(src),
                     "--events", str(events)]) == 4
        errors = [e for e in read_events_jsonl(events.read_text())
                  if e["kind"] == "stream_error"]
        assert len(errors) == 50

    def test_determinism_byte_identical_events(self, tmp_path, fault_csv):
        cfg, csv_path, _ = fault_csv
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        assert main(["run", "--config", cfg, "--in", str(csv_path),
                     "--events", str(a), "--seed", "42"]) == 0
        assert main(["run", "--config", cfg, "--in", str(csv_path),
                     "--events", str(b), "--seed", "42"]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestEvalCommand:
    def test_eval_prints_report(self, tmp_path, capsys):
        events = tmp_path / "e.jsonl"
        events.write_text(json.dumps({"t": 5600, "kind": "fault_detected",
                                      "score": 1.0, "detail": ""}) + "\n")
        truth = tmp_path / "t.json"
        truth.write_text(json.dumps({"fault_onset": 4000, "ramp": 2000,
                                     "echo_amp_max": 1.0, "first_exceed": 5000}))
        code = main(["eval", "--events", str(events), "--truth", str(truth),
                     "--theta-amp", "0.5"])
        assert code == 0
        report = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert report["detected"] is True
        assert report["detection_delay"] == 600
        assert report["false_alarms"] == 0

    def test_eval_miss(self, tmp_path, capsys):
        events = tmp_path / "e.jsonl"
        events.write_text("")
        truth = tmp_path / "t.json"
        truth.write_text(json.dumps({"fault_onset": 4000, "ramp": 2000,
                                     "echo_amp_max": 1.0, "first_exceed": 5000}))
        assert main(["eval", "--events", str(events), "--truth", str(truth)]) == 0
        report = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert report["detected"] is False
        assert "detection_delay" not in report

    def test_eval_unparsable_exit_2(self, tmp_path):
        events = tmp_path / "e.jsonl"
        events.write_text("not json\n")
        truth = tmp_path / "t.json"
        truth.write_text("{}")
        assert main(["eval", "--events", str(events), "--truth", str(truth)]) == 2


class TestTuneCommand:
    def test_tune_prints_result(self, tmp_path, capsys):
        cfg = write_config(tmp_path, SIM_FAULT)
        csv_path = tmp_path / "s.csv"
        assert main(["simulate", "--config", cfg, "--out", str(csv_path),
                     "--seed", "42"]) == 0
        code = main(["tune", "--config", cfg, "--in", str(csv_path), "--seed", "42"])
        assert code == 0
        result = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert result["c"] > 0 and result["gamma"] > 0
        assert 0.0 <= result["cv_accuracy"] <= 1.0

    def test_tune_single_candidate(self, tmp_path, capsys):
        cfg = write_config(tmp_path, SIM_FAULT +
                           "\ntune.c_values = 7.0\ntune.gamma_values = 0.3\n")
        csv_path = tmp_path / "s.csv"
        assert main(["simulate", "--config", cfg, "--out", str(csv_path),
                     "--seed", "42"]) == 0
        assert main(["tune", "--config", cfg, "--in", str(csv_path), "--seed", "42"]) == 0
        result = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert (result["c"], result["gamma"]) == (7.0, 0.3)

    def test_tune_stream_too_short_exit_5(self, tmp_path):
        cfg = write_config(tmp_path, SIM_FAULT)
        src = tmp_path / "short.csv"
        src.write_text("t,value\n" + "\n".join(f"{i},0.5" for i in range(100)) + "\n")
        assert main(["tune", "--config", cfg, "--in", str(src)]) == 5
