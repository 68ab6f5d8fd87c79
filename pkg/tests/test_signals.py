import numpy as np
import pytest
from hypothesis import given, strategies as st

from faultcast.errors import StreamOrderError
from faultcast.signals import FrameAssembler, RawSample, assemble_frames, frame_count


def _stream(values, start=0):
    return [RawSample(start + i, v) for i, v in enumerate(values)]


def test_exact_tiling():
    frames = assemble_frames(_stream([1, 2, 3, 4]), frame_len=2, hop_len=2)
    assert [f.start_t for f in frames] == [0, 2]
    assert [list(f.samples) for f in frames] == [[1, 2], [3, 4]]


def test_partial_window_discarded():
    frames = assemble_frames(_stream([1, 2, 3, 4, 5]), frame_len=2, hop_len=2)
    assert len(frames) == 2


def test_overlapping_windows():
    # 6 samples, frame 4, hop 2: windows at 0 and 2 only
    frames = assemble_frames(_stream(range(6)), frame_len=4, hop_len=2)
    assert [f.start_t for f in frames] == [0, 2]
    assert list(frames[1].samples) == [2, 3, 4, 5]


def test_non_monotone_t_rejected():
    asm = FrameAssembler(4, 2)
    asm.push(0, 1.0)
    asm.push(1, 1.0)
    with pytest.raises(StreamOrderError):
        asm.push(1, 2.0)
    with pytest.raises(StreamOrderError):
        asm.push(0, 2.0)
    # state unchanged: next valid sample still accepted
    asm.push(2, 3.0)
    assert asm.pending == 3


def test_assembly_is_pure():
    samples = _stream(np.sin(np.arange(40)))
    a = assemble_frames(samples, 8, 3)
    b = assemble_frames(samples, 8, 3)
    assert len(a) == len(b)
    for fa, fb in zip(a, b):
        assert fa.start_t == fb.start_t
        assert np.array_equal(fa.samples, fb.samples)


@given(n=st.integers(0, 200), w=st.integers(2, 32), h_frac=st.integers(1, 32))
def test_frame_count_formula(n, w, h_frac):
    h = min(h_frac, w)
    frames = assemble_frames(_stream(range(n)), w, h)
    expected = (n - w) // h + 1 if n >= w else 0
    assert len(frames) == expected
    assert frame_count(n, w, h) == expected
    for k, f in enumerate(frames):
        assert f.start_t == k * h
        assert len(f.samples) == w
