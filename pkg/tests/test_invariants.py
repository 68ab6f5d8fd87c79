"""Cross-cutting contract checks: causality, retuning, event invariants."""

import numpy as np
from hypothesis import given, settings, strategies as st

from faultcast.engine import Engine, EngineConfig, FilterParams, SomParams, SvmParams, TuneParams
from faultcast.rig import SimConfig, generate
from faultcast.svm import KernelSpec, OnlineSvm


def rig_like_config(**kw):
    base = dict(
        frame_len=1024, hop_len=1024,
        filter=FilterParams(mode="ma", ma_window=3),
        som=SomParams(grid=2, k_label=2.0),
        svm=SvmParams(c=0.5, gamma=0.1, budget=64),
        tune=TuneParams(interval=200),
        calib_frames=20, trend_window=20, slope_min=0.3, seed=42)
    base.update(kw)
    return EngineConfig(**base)


def fault_sim(**kw):
    base = dict(total_samples=120_000, pulse_period=1024, carrier_cycles=4,
                samples_per_cycle=16, echo_delay=256, echo_amp_max=0.8,
                fault_onset=60_000, fault_ramp=30_000, noise_sd=0.05, seed=42)
    base.update(kw)
    return SimConfig(**base)


def run_engine(cfg, values):
    engine = Engine(cfg)
    events = []
    for i, v in enumerate(values):
        events.extend(engine.ingest(i, float(v)))
    return engine, events


class TestCausality:
    def test_event_prefix_property(self):
        """Events up to sample T are unchanged by whatever follows T."""
        values, _ = generate(fault_sim())
        cfg = rig_like_config()
        _, full_events = run_engine(cfg, values)
        cut = 80_000
        _, prefix_events = run_engine(cfg, values[:cut])
        full_prefix = [e for e in full_events if e.t < cut]
        assert len(prefix_events) == len(full_prefix)
        for a, b in zip(prefix_events, full_prefix):
            assert a == b


class TestEventInvariants:
    def test_detected_scores_and_positive_etas(self):
        values, _ = generate(fault_sim())
        cfg = rig_like_config(trend_window=10, slope_min=0.05)
        _, events = run_engine(cfg, values)
        detected = [e for e in events if e.kind == "fault_detected"]
        predicted = [e for e in events if e.kind == "fault_predicted"]
        assert detected
        for e in detected:
            assert e.score >= cfg.detect_threshold
            assert e.eta is None
        for e in predicted:
            assert e.eta is not None and e.eta > 0
            assert e.amplitude is not None

    def test_no_fault_events_during_calibration(self):
        values, _ = generate(fault_sim(fault_onset=1000, fault_ramp=1000))
        cfg = rig_like_config()
        engine = Engine(cfg)
        calib_end = cfg.frame_len + (cfg.calib_frames - 1) * cfg.hop_len
        for i, v in enumerate(values[:calib_end + 1]):
            for e in engine.ingest(i, float(v)):
                assert e.kind in ("calibrated", "stream_error")


class TestRetuning:
    def test_retune_event_updates_model_parameters(self):
        # short retune interval and a mid-stream fault force a retune with
        # both classes buffered
        values, _ = generate(fault_sim())
        cfg = rig_like_config(tune=TuneParams(c_values=(0.1, 10.0),
                                              gamma_values=(0.1, 1.0),
                                              k_folds=2, interval=30))
        engine, events = run_engine(cfg, values)
        retunes = [e for e in events if e.kind == "retune"]
        assert retunes
        assert engine.tuned is not None
        assert engine.svm.c == engine.tuned.c
        assert engine.svm.kernel.gamma == engine.tuned.gamma
        assert 0.0 <= engine.tuned.cv_accuracy <= 1.0
        for e in retunes:
            assert 0.0 <= e.score <= 1.0  # retune events carry cv accuracy

    def test_rebuild_reuses_buffer_contents(self):
        values, _ = generate(fault_sim())
        cfg = rig_like_config(tune=TuneParams(c_values=(0.5,), gamma_values=(0.1,),
                                              k_folds=2, interval=25),
                              svm=SvmParams(c=0.5, gamma=0.1, budget=64))
        engine, events = run_engine(cfg, values)
        assert any(e.kind == "retune" for e in events)
        assert engine.svm.n_points <= len(engine._buffer)
        assert engine.svm.kkt_report(1e-6) == []


class TestDecisionContinuity:
    @settings(max_examples=30, deadline=None)
    @given(step=st.floats(1e-6, 1e-3), direction=st.integers(0, 3))
    def test_rbf_decision_is_locally_lipschitz(self, step, direction):
        rng = np.random.default_rng(99)
        model = OnlineSvm(KernelSpec("rbf", gamma=0.5), c=10.0, budget=64)
        for k in range(40):
            model.learn_one(rng.normal(size=4) + (1.5 if k % 2 else -1.5), 1 if k % 2 else -1)
        # crude Lipschitz bound: sum alpha * sqrt(2 gamma / e) per unit move
        lip = float(np.sum(model.alphas)) * np.sqrt(2 * 0.5 / np.e)
        x = rng.normal(size=4)
        dx = np.zeros(4)
        dx[direction] = step
        df = abs(model.decision(x + dx) - model.decision(x))
        assert df <= lip * step + 1e-12
