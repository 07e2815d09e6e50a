"""WAV layer: byte-exact headers, round-trip bounds, parse errors."""

import struct

import numpy as np
import pytest

import mammalvoc as mv
from mammalvoc.errors import WavFormatError
from mammalvoc.rng import NoiseSource
from mammalvoc.wavfile import encode_pcm16

FS = 44100


def test_one_second_of_silence_layout(tmp_path):
    path = tmp_path / "silence.wav"
    mv.write_wav(mv.AudioBuffer(FS, np.zeros(FS)), path)
    raw = path.read_bytes()
    assert len(raw) == 44 + 88_200
    (size,) = struct.unpack("<I", raw[40:44])
    assert size == 88_200


def test_canonical_header_bytes(tmp_path):
    path = tmp_path / "tone.wav"
    mv.write_wav(mv.AudioBuffer(8000, np.zeros(16)), path)
    raw = path.read_bytes()
    expected = (
        b"RIFF"
        + struct.pack("<I", 36 + 32)
        + b"WAVE"
        + b"fmt "
        + struct.pack("<IHHIIHH", 16, 1, 1, 8000, 16000, 2, 16)
        + b"data"
        + struct.pack("<I", 32)
    )
    assert raw[:44] == expected


def test_full_scale_mapping():
    assert np.frombuffer(encode_pcm16([1.0]), dtype="<i2")[0] == 32767
    assert np.frombuffer(encode_pcm16([-1.0]), dtype="<i2")[0] == -32767
    assert np.frombuffer(encode_pcm16([0.0]), dtype="<i2")[0] == 0
    # round-half-away-from-zero
    assert np.frombuffer(encode_pcm16([0.5 / 32767]), dtype="<i2")[0] == 1
    assert np.frombuffer(encode_pcm16([-0.5 / 32767]), dtype="<i2")[0] == -1


def test_round_trip_error_bound(tmp_path):
    buf = mv.AudioBuffer(FS, NoiseSource(4).uniform(10_000))
    path = tmp_path / "rt.wav"
    mv.write_wav(buf, path)
    back = mv.read_wav(path)
    assert back.sample_rate == FS
    assert len(back.samples) == len(buf.samples)
    assert np.max(np.abs(back.samples - buf.samples)) <= 1.0 / 32768


def test_written_files_are_byte_identical(tmp_path):
    buf = mv.AudioBuffer(FS, NoiseSource(4).uniform(5_000))
    a, b = tmp_path / "a.wav", tmp_path / "b.wav"
    mv.write_wav(buf, a)
    mv.write_wav(buf, b)
    assert a.read_bytes() == b.read_bytes()


def test_truncated_data_chunk(tmp_path):
    path = tmp_path / "cut.wav"
    mv.write_wav(mv.AudioBuffer(FS, np.zeros(1000)), path)
    path.write_bytes(path.read_bytes()[:-500])
    with pytest.raises(WavFormatError, match="truncated 'data'"):
        mv.read_wav(path)


def test_missing_data_chunk(tmp_path):
    path = tmp_path / "nodata.wav"
    mv.write_wav(mv.AudioBuffer(FS, np.zeros(4)), path)
    path.write_bytes(path.read_bytes()[:36])  # keep header + fmt only
    with pytest.raises(WavFormatError, match="missing 'data'"):
        mv.read_wav(path)


def test_stereo_rejected(tmp_path):
    path = tmp_path / "stereo.wav"
    data = b"\x00\x00" * 32
    raw = (
        b"RIFF"
        + struct.pack("<I", 36 + len(data))
        + b"WAVE"
        + b"fmt "
        + struct.pack("<IHHIIHH", 16, 1, 2, FS, FS * 4, 4, 16)
        + b"data"
        + struct.pack("<I", len(data))
        + data
    )
    path.write_bytes(raw)
    with pytest.raises(WavFormatError, match="2 channels"):
        mv.read_wav(path)


def test_non_pcm_rejected(tmp_path):
    path = tmp_path / "float.wav"
    raw = (
        b"RIFF"
        + struct.pack("<I", 36)
        + b"WAVE"
        + b"fmt "
        + struct.pack("<IHHIIHH", 16, 3, 1, FS, FS * 4, 4, 32)
        + b"data"
        + struct.pack("<I", 0)
    )
    path.write_bytes(raw)
    with pytest.raises(WavFormatError, match="audio format 3"):
        mv.read_wav(path)


def test_garbage_rejected(tmp_path):
    path = tmp_path / "garbage.wav"
    path.write_bytes(b"not a wav file at all")
    with pytest.raises(WavFormatError, match="RIFF"):
        mv.read_wav(path)


def test_extra_chunks_are_skipped(tmp_path):
    # a LIST chunk between fmt and data must not confuse the reader
    path = tmp_path / "extra.wav"
    data = encode_pcm16(np.linspace(-1, 1, 64))
    raw = (
        b"RIFF"
        + struct.pack("<I", 36 + 12 + len(data))
        + b"WAVE"
        + b"fmt "
        + struct.pack("<IHHIIHH", 16, 1, 1, FS, FS * 2, 2, 16)
        + b"LIST"
        + struct.pack("<I", 4)
        + b"INFO"
        + b"data"
        + struct.pack("<I", len(data))
        + data
    )
    path.write_bytes(raw)
    back = mv.read_wav(path)
    assert len(back.samples) == 64


def test_unwritable_path_raises_oserror():
    with pytest.raises(OSError):
        mv.write_wav(mv.AudioBuffer(FS, np.zeros(4)), "/nonexistent/dir/out.wav")


def test_wav_spec_reports_the_layout(tmp_path):
    path = tmp_path / "spec.wav"
    mv.write_wav(mv.AudioBuffer(22050, np.zeros(32)), path)
    spec = mv.wav_spec(path)
    assert spec == mv.WavSpec(sample_rate=22050, bit_depth=16, channels=1)
