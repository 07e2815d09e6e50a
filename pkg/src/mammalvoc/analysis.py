"""Measurement instruments: STFT spectrograms, autocorrelation pitch
estimation, spectral-peak picking, and CSV/PNG export."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .engine import AudioBuffer
from .errors import DomainError

DB_FLOOR = -120.0
DEFAULT_WINDOW = 2048
DEFAULT_HOP = 256

# Peaks must stand this far above the local median to count as formants
# rather than harmonic ripple. The median window scales with frequency
# because peak widths do too (proportional-Q resonances).
PEAK_PROMINENCE_DB = 6.0
PEAK_MEDIAN_HALF_SPAN_MIN_HZ = 500.0
PEAK_MEDIAN_HALF_SPAN_FRACTION = 0.5
PEAK_SEPARATION_FRACTION = 0.15

VOICING_THRESHOLD = 0.3
# Resonant (narrowband) noise mimics periodicity over one period but has
# decayed by two; genuine voicing stays correlated across both.
VOICING_CONFIRM_THRESHOLD = 0.45


@dataclass
class Spectrogram:
    """dB magnitude grid: frames x bins, with the axes that index it."""

    frame_times: np.ndarray    # seconds, frame centres
    frequency_bins: np.ndarray  # Hz, 0 .. sample_rate/2
    magnitudes: np.ndarray      # dB, shape (frames, bins)


def spectrogram(buffer: AudioBuffer, window: int = DEFAULT_WINDOW,
                hop: int = DEFAULT_HOP, window_fn: str = "hann") -> Spectrogram:
    """Magnitude STFT in dB (floored at -120).

    Frame count is floor((N - window)/hop) + 1. Magnitudes are scaled so a
    full-scale sine reads ~0 dB with the default Hann window; window_fn
    "rectangular" is available for energy bookkeeping.
    """
    x = np.asarray(buffer.samples, dtype=float)
    window = int(window)
    hop = int(hop)
    if hop < 1:
        raise DomainError(f"hop must be >= 1, got {hop}")
    if len(x) < window:
        raise DomainError(f"buffer of {len(x)} samples shorter than window {window}")
    if window_fn == "hann":
        win = np.hanning(window)
    elif window_fn == "rectangular":
        win = np.ones(window)
    else:
        raise DomainError(f"unknown window_fn {window_fn!r}")

    frames = (len(x) - window) // hop + 1
    starts = np.arange(frames) * hop
    grid = np.lib.stride_tricks.as_strided(
        x, shape=(frames, window),
        strides=(x.strides[0] * hop, x.strides[0]),
    )
    spec = np.abs(np.fft.rfft(grid * win, axis=1)) * (2.0 / win.sum())
    db = 20.0 * np.log10(np.maximum(spec, 10.0 ** (DB_FLOOR / 20.0)))
    return Spectrogram(
        frame_times=(starts + window / 2) / buffer.sample_rate,
        frequency_bins=np.fft.rfftfreq(window, 1.0 / buffer.sample_rate),
        magnitudes=db,
    )


def _parabolic_refine(y: np.ndarray, i: int) -> float:
    # Vertex offset of the parabola through (i-1, i, i+1); 0 at the edges.
    if i <= 0 or i >= len(y) - 1:
        return 0.0
    denom = y[i - 1] - 2.0 * y[i] + y[i + 1]
    if denom == 0.0:
        return 0.0
    return 0.5 * (y[i - 1] - y[i + 1]) / denom


def _acf_peak(buffer: AudioBuffer, fmin: float, fmax: float):
    """Strongest period candidate: (refined lag, r(T), r(2T)) or None.

    r values are the unbiased normalised autocorrelation at one and two
    candidate periods.
    """
    x = np.asarray(buffer.samples, dtype=float)
    fs = buffer.sample_rate
    if len(x) == 0:
        raise DomainError("empty buffer")
    if not 0.0 < fmin < fmax:
        raise DomainError(f"bad search range [{fmin}, {fmax}]")
    min_len = int(math.ceil(4.0 * fs / fmin))
    if len(x) < min_len:
        raise DomainError(
            f"buffer of {len(x)} samples is shorter than four periods of "
            f"{fmin} Hz ({min_len} samples)"
        )
    x = x - x.mean()
    n = len(x)
    # full autocorrelation via FFT
    size = 1 << int(math.ceil(math.log2(2 * n)))
    spectrum = np.fft.rfft(x, size)
    acf = np.fft.irfft(spectrum * np.conj(spectrum), size)[:n]
    if acf[0] <= 0.0:
        return None
    lags = np.arange(n)
    # unbiased estimate so long lags are not penalised by the taper
    unbiased = acf * (n / np.maximum(n - lags, 1))
    norm = unbiased / unbiased[0]
    lo = max(int(fs / fmax), 1)
    hi = min(int(math.ceil(fs / fmin)), n - 2)
    if hi <= lo:
        return None
    segment = norm[lo : hi + 1]
    best = float(segment.max())
    # A periodic signal peaks at every multiple of its period, all near the
    # same height, so argmax would pick an arbitrary multiple. Take the
    # earliest local maximum in reach of the range maximum instead; the
    # local-max condition also rejects the short-lag falloff from r(0).
    summits = (
        np.nonzero(
            (segment[1:-1] >= segment[:-2])
            & (segment[1:-1] >= segment[2:])
            & (segment[1:-1] >= 0.95 * best)
        )[0]
        + 1
    )
    peak = (int(summits[0]) if len(summits) else int(np.argmax(segment))) + lo
    lag = peak + _parabolic_refine(norm, peak)
    r2 = float(norm[min(2 * peak, n - 1)])
    return lag, float(norm[peak]), r2


def estimate_f0(buffer: AudioBuffer, fmin: float = 50.0, fmax: float = 2000.0):
    """Autocorrelation pitch estimate in Hz, or None when unvoiced.

    The buffer must hold at least four periods of fmin. The lag of the
    strongest normalised autocorrelation peak in [1/fmax, 1/fmin] is
    refined parabolically; peaks below 0.3 are treated as unvoiced.
    """
    found = _acf_peak(buffer, fmin, fmax)
    if found is None:
        return None
    lag, r1, _ = found
    if r1 < VOICING_THRESHOLD:
        return None
    return buffer.sample_rate / lag


def voicing_strength(buffer: AudioBuffer, fmin: float = 50.0,
                     fmax: float = 2000.0) -> float:
    """Sustained-periodicity score: min of the normalised autocorrelation
    at one and two candidate periods (0 when nothing qualifies).

    Resonator-coloured noise can correlate strongly over a single period;
    requiring the second keeps breath noise out."""
    found = _acf_peak(buffer, fmin, fmax)
    if found is None:
        return 0.0
    _, r1, r2 = found
    return max(min(r1, r2), 0.0)


def detect_voicing(buffer: AudioBuffer, fmin: float = 50.0,
                   fmax: float = 2000.0) -> bool:
    """True when the buffer carries sustained periodicity (voiced sound)."""
    return voicing_strength(buffer, fmin, fmax) >= VOICING_CONFIRM_THRESHOLD


def voiced_fraction(buffer: AudioBuffer, fmin: float = 50.0,
                    fmax: float = 2000.0, frame_s: float = 0.04,
                    hop_s: float = 0.02) -> float:
    """Fraction of analysis frames that detect_voicing accepts."""
    fs = buffer.sample_rate
    frame = max(int(round(frame_s * fs)), int(math.ceil(4.0 * fs / fmin)))
    hop = max(int(round(hop_s * fs)), 1)
    x = np.asarray(buffer.samples, dtype=float)
    if len(x) < frame:
        raise DomainError("buffer shorter than one analysis frame")
    count = (len(x) - frame) // hop + 1
    hits = sum(
        detect_voicing(AudioBuffer(fs, x[i * hop : i * hop + frame]), fmin, fmax)
        for i in range(count)
    )
    return hits / count


def track_f0(buffer: AudioBuffer, fmin: float = 50.0, fmax: float = 2000.0,
             frame_s: float = 0.03, hop_s: float = 0.01):
    """Frame-wise pitch track: (frame centre times, f0 array with NaN for
    unvoiced frames). Frames are widened if needed to hold four fmin periods."""
    fs = buffer.sample_rate
    frame = max(int(round(frame_s * fs)), int(math.ceil(4.0 * fs / fmin)))
    hop = max(int(round(hop_s * fs)), 1)
    x = np.asarray(buffer.samples, dtype=float)
    if len(x) < frame:
        raise DomainError("buffer shorter than one analysis frame")
    count = (len(x) - frame) // hop + 1
    times = np.empty(count)
    values = np.full(count, np.nan)
    for i in range(count):
        start = i * hop
        chunk = AudioBuffer(fs, x[start : start + frame])
        times[i] = (start + frame / 2) / fs
        f0 = estimate_f0(chunk, fmin, fmax)
        if f0 is not None:
            values[i] = f0
    return times, values


def spectral_peaks(spec: Spectrogram, count: int):
    """The `count` most prominent peaks of the time-averaged spectrum.

    Returns (frequencies ascending, complete) where complete is False when
    fewer qualifying maxima exist than requested. Prominence is measured
    against the local median so broadband tilt and harmonic ripple do not
    register.
    """
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    power = np.mean(10.0 ** (spec.magnitudes / 10.0), axis=0)
    avg_db = 10.0 * np.log10(np.maximum(power, 10.0 ** (DB_FLOOR / 10.0)))
    nbins = len(avg_db)
    if nbins < 3:
        return [], False
    # light smoothing so averaging ripple cannot split one broad peak
    avg_db = np.convolve(avg_db, np.ones(3) / 3.0, mode="same")
    bin_width = spec.frequency_bins[1] - spec.frequency_bins[0]

    candidates = []
    for i in range(1, nbins - 1):
        if not (avg_db[i] > avg_db[i - 1] and avg_db[i] >= avg_db[i + 1]):
            continue
        span_hz = max(
            PEAK_MEDIAN_HALF_SPAN_MIN_HZ,
            PEAK_MEDIAN_HALF_SPAN_FRACTION * i * bin_width,
        )
        half_span = max(int(span_hz / bin_width), 2)
        lo = max(i - half_span, 0)
        hi = min(i + half_span + 1, nbins)
        prominence = avg_db[i] - np.median(avg_db[lo:hi])
        if prominence < PEAK_PROMINENCE_DB:
            continue
        freq = (i + _parabolic_refine(avg_db, i)) * bin_width
        candidates.append((prominence, freq))

    candidates.sort(key=lambda item: -item[0])
    chosen: list[float] = []
    for _, freq in candidates:
        near = any(
            abs(freq - kept) < PEAK_SEPARATION_FRACTION * max(freq, kept)
            for kept in chosen
        )
        if not near:
            chosen.append(freq)
        if len(chosen) == count:
            break
    chosen.sort()
    return chosen, len(chosen) == count


def count_envelope_peaks(buffer: AudioBuffer, min_spacing_s: float,
                         smooth_s: float = 0.1,
                         height_fraction: float = 0.4) -> int:
    """Count amplitude-envelope peaks (e.g. exhalations in a breathing
    session): moving-average of |x|, peaks above height_fraction of the
    envelope maximum, at least min_spacing_s apart."""
    from scipy.signal import find_peaks

    fs = buffer.sample_rate
    k = max(int(round(smooth_s * fs)), 1)
    env = np.convolve(np.abs(np.asarray(buffer.samples, dtype=float)),
                      np.ones(k) / k, mode="same")
    if env.max() <= 0.0:
        return 0
    peaks, _ = find_peaks(
        env,
        height=height_fraction * env.max(),
        distance=max(int(round(min_spacing_s * fs)), 1),
    )
    return len(peaks)


def export_csv(spec: Spectrogram, path) -> None:
    """Grid as CSV: header row of bin frequencies, one row per frame with
    the frame time in the first column."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time_s"] + [f"{f:.3f}" for f in spec.frequency_bins])
        for t, row in zip(spec.frame_times, spec.magnitudes):
            writer.writerow([f"{t:.6f}"] + [f"{v:.2f}" for v in row])


def export_png(spec: Spectrogram, path, floor_db: float = -90.0,
               ceil_db: float = 0.0) -> None:
    """Greyscale spectrogram image, time across, frequency up, dark = loud."""
    from PIL import Image

    grid = np.clip((spec.magnitudes - floor_db) / (ceil_db - floor_db), 0.0, 1.0)
    # rows = frequency (low at the bottom), columns = time; dark = high energy
    pixels = (255.0 * (1.0 - grid.T[::-1])).astype(np.uint8)
    Image.fromarray(pixels, mode="L").save(path)
