"""Byte-exact RIFF/WAVE I/O: mono 16-bit PCM only.

The writer emits the canonical 44-byte header so identical buffers give
identical files everywhere; the reader walks chunks and names whatever
is missing or unsupported.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .engine import AudioBuffer
from .errors import WavFormatError

_FULL_SCALE = 32767


@dataclass(frozen=True)
class WavSpec:
    """Stream layout of a supported file; only 16-bit mono PCM exists here."""

    sample_rate: int
    bit_depth: int = 16
    channels: int = 1


def wav_spec(path) -> WavSpec:
    """Layout of an existing file, validated against the supported format."""
    buffer = read_wav(path)
    return WavSpec(sample_rate=buffer.sample_rate)


def encode_pcm16(samples) -> bytes:
    """Float samples to little-endian int16 bytes; +/-1.0 maps to +/-32767
    with round-half-away-from-zero."""
    samples = np.asarray(samples, dtype=float)
    scaled = np.sign(samples) * np.floor(np.abs(samples) * _FULL_SCALE + 0.5)
    return np.clip(scaled, -32768, 32767).astype("<i2").tobytes()


def write_wav(buffer: AudioBuffer, path) -> None:
    """Write mono 16-bit PCM; +/-1.0 maps to +/-32767 with round-half-away."""
    data = encode_pcm16(buffer.samples)
    rate = int(buffer.sample_rate)
    try:
        with open(path, "wb") as fh:
            fh.write(b"RIFF")
            fh.write(struct.pack("<I", 36 + len(data)))
            fh.write(b"WAVE")
            fh.write(b"fmt ")
            # PCM, mono, 16-bit
            fh.write(struct.pack("<IHHIIHH", 16, 1, 1, rate, rate * 2, 2, 16))
            fh.write(b"data")
            fh.write(struct.pack("<I", len(data)))
            fh.write(data)
    except OSError as exc:
        raise OSError(f"cannot write WAV to {path!r}: {exc}") from exc


def read_wav(path) -> AudioBuffer:
    """Read a mono 16-bit PCM WAV written by write_wav (or compatible)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 12 or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise WavFormatError(f"{path!r}: missing RIFF/WAVE header")

    fmt = None
    data = None
    offset = 12
    while offset + 8 <= len(raw):
        chunk_id = raw[offset : offset + 4]
        (size,) = struct.unpack("<I", raw[offset + 4 : offset + 8])
        body = raw[offset + 8 : offset + 8 + size]
        if len(body) < size:
            raise WavFormatError(
                f"{path!r}: truncated {chunk_id.decode('ascii', 'replace')!r} chunk"
            )
        if chunk_id == b"fmt ":
            fmt = body
        elif chunk_id == b"data":
            data = body
        offset += 8 + size + (size & 1)  # chunks are word aligned

    if fmt is None:
        raise WavFormatError(f"{path!r}: missing 'fmt ' chunk")
    if data is None:
        raise WavFormatError(f"{path!r}: missing 'data' chunk")
    if len(fmt) < 16:
        raise WavFormatError(f"{path!r}: 'fmt ' chunk too short")
    audio_format, channels, rate, _, _, bits = struct.unpack("<HHIIHH", fmt[:16])
    if audio_format != 1:
        raise WavFormatError(
            f"{path!r}: unsupported format: audio format {audio_format} (PCM required)"
        )
    if channels != 1:
        raise WavFormatError(
            f"{path!r}: unsupported format: {channels} channels (mono required)"
        )
    if bits != 16:
        raise WavFormatError(
            f"{path!r}: unsupported format: {bits}-bit samples (16 required)"
        )
    values = np.frombuffer(data[: len(data) // 2 * 2], dtype="<i2")
    samples = np.clip(values.astype(float) / _FULL_SCALE, -1.0, 1.0)
    return AudioBuffer(sample_rate=rate, samples=samples)
