from __future__ import annotations

import struct
import wave

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stmseg import (
    AudioBuffer,
    BoundarySet,
    FormatError,
    ParameterError,
    PhoneTranscription,
    TranscriptionParseError,
    UnsupportedFormatError,
    read_boundaries,
    read_phone_transcription,
    read_wav,
    reference_boundaries,
    write_boundaries,
    write_wav,
)
from stmseg.signal_io import PhoneEntry


def _write_pcm(path, codes, rate=16000, channels=1, width=2):
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(channels)
        wf.setsampwidth(width)
        wf.setframerate(rate)
        fmt = {1: "b", 2: "h"}[width]
        wf.writeframes(struct.pack(f"<{len(codes)}{fmt}", *codes))


def test_read_wav_scales_codes_by_32768(tmp_path) -> None:
    path = tmp_path / "a.wav"
    _write_pcm(path, [0, 16384, -32768, 32767])
    audio = read_wav(path)
    assert audio.sample_rate_hz == 16000
    assert np.array_equal(
        audio.samples, np.array([0.0, 0.5, -1.0, 32767 / 32768])
    )


def test_write_wav_saturates_at_codec_boundary(tmp_path) -> None:
    path = tmp_path / "a.wav"
    write_wav(path, AudioBuffer(np.array([1.0, -1.0, 2.0, -2.0]), 16000))
    with wave.open(str(path), "rb") as wf:
        codes = struct.unpack("<4h", wf.readframes(4))
    assert codes == (32767, -32768, 32767, -32768)


def test_roundtrip_error_bound(tmp_path) -> None:
    rng = np.random.default_rng(11)
    x = rng.uniform(-1.0, 1.0, 1000)
    path = tmp_path / "a.wav"
    write_wav(path, AudioBuffer(x, 8000))
    back = read_wav(path)
    assert back.sample_rate_hz == 8000
    assert np.max(np.abs(back.samples - x)) <= 1.0 / 32768


@given(
    st.lists(
        st.floats(min_value=-1.0, max_value=1.0, allow_nan=False),
        min_size=1,
        max_size=64,
    )
)
def test_roundtrip_error_bound_property(tmp_path_factory, samples) -> None:
    path = tmp_path_factory.getbasetemp() / "prop.wav"
    x = np.array(samples)
    write_wav(path, AudioBuffer(x, 16000))
    back = read_wav(path)
    assert np.max(np.abs(back.samples - x)) <= 1.0 / 32768


def test_non_riff_rejected(tmp_path) -> None:
    path = tmp_path / "bad.wav"
    path.write_bytes(b"JUNK" + b"\x00" * 40)
    with pytest.raises(FormatError):
        read_wav(path)


def test_truncated_header_rejected(tmp_path) -> None:
    path = tmp_path / "trunc.wav"
    path.write_bytes(b"RIFF\x04\x00\x00\x00WAVE")
    with pytest.raises(FormatError):
        read_wav(path)


def test_stereo_rejected(tmp_path) -> None:
    path = tmp_path / "st.wav"
    _write_pcm(path, [0, 0, 0, 0], channels=2)
    with pytest.raises(UnsupportedFormatError):
        read_wav(path)


def test_8bit_rejected(tmp_path) -> None:
    path = tmp_path / "w8.wav"
    _write_pcm(path, [0, 1, 2], width=1)
    with pytest.raises(UnsupportedFormatError):
        read_wav(path)


def test_zero_samples_rejected(tmp_path) -> None:
    path = tmp_path / "empty.wav"
    _write_pcm(path, [])
    with pytest.raises(FormatError):
        read_wav(path)


def test_missing_file_is_oserror(tmp_path) -> None:
    with pytest.raises(OSError):
        read_wav(tmp_path / "nope.wav")


def test_audio_buffer_validation() -> None:
    with pytest.raises(ParameterError):
        AudioBuffer(np.array([]), 16000)
    with pytest.raises(ParameterError):
        AudioBuffer(np.zeros((2, 2)), 16000)
    with pytest.raises(ParameterError):
        AudioBuffer(np.zeros(4), 0)


# -- transcriptions ---------------------------------------------------------


def _phn(tmp_path, text):
    path = tmp_path / "t.phn"
    path.write_text(text, encoding="utf-8")
    return path


def test_parse_transcription(tmp_path) -> None:
    t = read_phone_transcription(
        _phn(tmp_path, "0 800 sil\n800 2400 aa\n2400 4000 sil\n"), 8000
    )
    assert len(t) == 3
    assert t.entries[1] == PhoneEntry(800, 2400, "aa")


def test_crlf_accepted(tmp_path) -> None:
    t = read_phone_transcription(_phn(tmp_path, "0 100 a\r\n100 200 b\r\n"), 8000)
    assert [e.label for e in t.entries] == ["a", "b"]


def test_gap_rejected_with_line_number(tmp_path) -> None:
    with pytest.raises(TranscriptionParseError) as err:
        read_phone_transcription(_phn(tmp_path, "0 100 a\n150 200 b\n"), 8000)
    assert err.value.lineno == 2
    assert "line 2" in str(err.value)


def test_overlap_rejected(tmp_path) -> None:
    with pytest.raises(TranscriptionParseError):
        read_phone_transcription(_phn(tmp_path, "0 100 a\n50 200 b\n"), 8000)


def test_non_numeric_rejected(tmp_path) -> None:
    with pytest.raises(TranscriptionParseError) as err:
        read_phone_transcription(_phn(tmp_path, "zero 100 a\n"), 8000)
    assert err.value.lineno == 1


def test_bad_field_count_rejected(tmp_path) -> None:
    with pytest.raises(TranscriptionParseError):
        read_phone_transcription(_phn(tmp_path, "0 100\n"), 8000)


def test_blank_line_rejected(tmp_path) -> None:
    with pytest.raises(TranscriptionParseError) as err:
        read_phone_transcription(_phn(tmp_path, "0 100 a\n\n100 200 b\n"), 8000)
    assert err.value.lineno == 2


def test_empty_file_rejected(tmp_path) -> None:
    with pytest.raises(TranscriptionParseError):
        read_phone_transcription(_phn(tmp_path, ""), 8000)


def test_negative_start_rejected(tmp_path) -> None:
    with pytest.raises(TranscriptionParseError):
        read_phone_transcription(_phn(tmp_path, "-5 100 a\n"), 8000)


def test_inverted_interval_rejected(tmp_path) -> None:
    with pytest.raises(TranscriptionParseError):
        read_phone_transcription(_phn(tmp_path, "100 100 a\n"), 8000)


# -- reference boundaries ---------------------------------------------------


def test_reference_boundaries_interior_edges() -> None:
    t = PhoneTranscription(
        [PhoneEntry(0, 800, "a"), PhoneEntry(800, 2400, "b"), PhoneEntry(2400, 4000, "c")]
    )
    b = reference_boundaries(t, 8000)
    assert np.array_equal(b.times_s, np.array([0.1, 0.3]))


def test_single_entry_has_no_boundaries() -> None:
    t = PhoneTranscription([PhoneEntry(0, 4000, "a")])
    assert len(reference_boundaries(t, 8000)) == 0


def test_boundary_count_is_entries_minus_one() -> None:
    for n in (1, 2, 5, 9):
        entries = [PhoneEntry(i * 10, (i + 1) * 10, "x") for i in range(n)]
        assert len(reference_boundaries(PhoneTranscription(entries), 100)) == n - 1


# -- boundary sets ----------------------------------------------------------


def test_boundary_set_validation() -> None:
    BoundarySet(np.array([]))
    with pytest.raises(ParameterError):
        BoundarySet(np.array([0.2, 0.1]))
    with pytest.raises(ParameterError):
        BoundarySet(np.array([0.1, 0.1]))
    with pytest.raises(ParameterError):
        BoundarySet(np.array([-0.1, 0.1]))


def test_write_boundaries_six_digit_lines(tmp_path) -> None:
    path = tmp_path / "b.bnd"
    write_boundaries(path, BoundarySet(np.array([0.1234567, 1.0])))
    assert path.read_text() == "0.123457\n1.000000\n"


def test_boundaries_roundtrip(tmp_path) -> None:
    path = tmp_path / "b.bnd"
    times = np.array([0.015, 0.255, 1.005])
    write_boundaries(path, BoundarySet(times))
    back = read_boundaries(path)
    assert np.allclose(back.times_s, times, atol=5e-7)


def test_read_boundaries_rejects_garbage(tmp_path) -> None:
    path = tmp_path / "b.bnd"
    path.write_text("0.1\nbogus\n")
    with pytest.raises(FormatError):
        read_boundaries(path)
