"""Instrument tests: the instruments themselves are verified against
closed-form signals (pure tones, white noise, synthesised pitch)."""

import csv

import numpy as np
import pytest

import mammalvoc as mv
from mammalvoc import analysis
from mammalvoc.engine import glottal_sample
from mammalvoc.errors import DomainError
from mammalvoc.rng import NoiseSource

FS = 44100


def sine(freq, seconds=1.0, fs=FS, amplitude=1.0):
    t = np.arange(int(seconds * fs)) / fs
    return mv.AudioBuffer(fs, amplitude * np.sin(2 * np.pi * freq * t))


def glottal_tone(f0, seconds=0.5, vq=0.5, fs=FS):
    n = int(seconds * fs)
    inc = np.full(n, f0 / fs)
    phase = (np.cumsum(inc) - inc) % 1.0
    return mv.AudioBuffer(fs, glottal_sample(phase, vq, inc))


class TestSpectrogram:
    def test_pure_tone_peaks_in_every_frame(self):
        spec = mv.spectrogram(sine(1000.0), window=2048)
        bin_width = spec.frequency_bins[1] - spec.frequency_bins[0]
        target = 1000.0 / bin_width
        peaks = np.argmax(spec.magnitudes, axis=1)
        assert np.all(np.abs(peaks - target) <= 1.0)

    def test_silence_sits_on_the_floor(self):
        spec = mv.spectrogram(mv.AudioBuffer(FS, np.zeros(FS)), window=1024)
        assert np.all(spec.magnitudes == analysis.DB_FLOOR)

    def test_frame_count_formula(self):
        buf = mv.AudioBuffer(FS, np.zeros(10_000))
        spec = mv.spectrogram(buf, window=2048, hop=256)
        assert spec.magnitudes.shape[0] == (10_000 - 2048) // 256 + 1
        assert spec.magnitudes.shape[1] == 2048 // 2 + 1

    def test_bins_span_to_nyquist(self):
        spec = mv.spectrogram(sine(500.0), window=1024)
        assert spec.frequency_bins[0] == 0.0
        assert spec.frequency_bins[-1] == FS / 2

    def test_white_noise_is_flat_within_3db(self):
        noise = mv.AudioBuffer(FS, NoiseSource(11).uniform(20 * FS))
        spec = mv.spectrogram(noise)
        power = np.mean(10 ** (spec.magnitudes / 10), axis=0)
        db = 10 * np.log10(power)
        sel = (spec.frequency_bins >= 100.0) & (spec.frequency_bins <= 10_000.0)
        assert np.max(np.abs(db[sel] - np.median(db[sel]))) < 3.0

    def test_short_buffer_rejected(self):
        with pytest.raises(DomainError):
            mv.spectrogram(mv.AudioBuffer(FS, np.zeros(100)), window=2048)

    def test_bad_hop_rejected(self):
        with pytest.raises(DomainError):
            mv.spectrogram(sine(440.0), window=1024, hop=0)

    def test_parseval_with_rectangular_window(self):
        # energy bookkeeping: non-overlapping rectangular frames must
        # conserve signal energy through the FFT within 1%
        x = NoiseSource(7).uniform(FS)
        window = 1024
        spec = mv.spectrogram(
            mv.AudioBuffer(FS, x), window=window, hop=window,
            window_fn="rectangular",
        )
        magnitude = 10 ** (spec.magnitudes / 20) * window / 2  # back to |X_k|
        weights = np.full(spec.magnitudes.shape[1], 2.0)
        weights[0] = weights[-1] = 1.0
        frames = spec.magnitudes.shape[0]
        energy_spec = float(((magnitude**2) * weights).sum()) / window
        energy_signal = float(np.sum(x[: frames * window] ** 2))
        assert energy_spec == pytest.approx(energy_signal, rel=0.01)


class TestEstimateF0:
    def test_synthesised_440(self):
        est = mv.estimate_f0(glottal_tone(440.0), 100, 2000)
        assert est == pytest.approx(440.0, abs=2.0)

    def test_white_noise_is_unvoiced(self):
        noise = mv.AudioBuffer(FS, NoiseSource(9).uniform(FS))
        assert mv.estimate_f0(noise, 50, 2000) is None

    def test_sweep_accuracy_half_percent(self):
        for f0 in np.linspace(100, 2000, 20):
            est = mv.estimate_f0(glottal_tone(float(f0)), 80, 2500)
            assert abs(est - f0) / f0 <= 0.005

    def test_empty_buffer_rejected(self):
        with pytest.raises(DomainError):
            mv.estimate_f0(mv.AudioBuffer(FS, np.zeros(0)), 50, 2000)

    def test_too_short_rejected(self):
        # under four periods of fmin
        with pytest.raises(DomainError):
            mv.estimate_f0(mv.AudioBuffer(FS, np.zeros(1000)), 50.0, 2000)

    def test_bad_range_rejected(self):
        with pytest.raises(DomainError):
            mv.estimate_f0(glottal_tone(440.0), 500.0, 100.0)

    def test_tracks_the_contour_peak(self, miro_params, miro_voiced):
        mid = len(miro_voiced.samples) // 2
        half = int(0.015 * miro_voiced.sample_rate)
        chunk = mv.AudioBuffer(
            miro_voiced.sample_rate, miro_voiced.samples[mid - half : mid + half]
        )
        expected = miro_params.f0_base * (1 + miro_params.f0_excursion)
        assert mv.estimate_f0(chunk, 300, 2000) == pytest.approx(expected, rel=0.02)


class TestVoicing:
    def test_breath_frames_are_rejected(self, miro_breath):
        assert mv.voiced_fraction(miro_breath, 400, 1600) == 0.0

    def test_voiced_frames_are_accepted(self, miro_voiced):
        assert mv.voiced_fraction(miro_voiced, 400, 1600) > 0.5

    def test_strength_ordering(self, miro_breath):
        tone = glottal_tone(500.0)
        assert mv.voicing_strength(tone, 100, 2000) > 0.9
        mid = len(miro_breath.samples) // 2
        chunk = mv.AudioBuffer(
            miro_breath.sample_rate, miro_breath.samples[mid : mid + 4410]
        )
        assert mv.voicing_strength(chunk, 400, 1600) < 0.45


class TestSpectralPeaks:
    def test_pure_tone(self):
        spec = mv.spectrogram(sine(1000.0))
        peaks, complete = mv.spectral_peaks(spec, 1)
        assert complete
        assert peaks[0] == pytest.approx(1000.0, rel=0.01)

    def test_silence_returns_empty_with_flag(self):
        spec = mv.spectrogram(mv.AudioBuffer(FS, np.zeros(FS)))
        peaks, complete = mv.spectral_peaks(spec, 3)
        assert peaks == [] and complete is False

    def test_breath_formants_match_tube_predictions(self, miro_params, miro_breath):
        spec = mv.spectrogram(miro_breath)
        peaks, complete = mv.spectral_peaks(spec, 3)
        predicted = [
            c.center_frequency
            for c in mv.tract_configs(
                miro_params.tract_length, miro_params.mouth_open_base
            )
        ]
        assert complete
        for found, target in zip(peaks, predicted):
            assert found == pytest.approx(target, rel=0.05)

    def test_ascending_order(self, miro_breath):
        peaks, _ = mv.spectral_peaks(mv.spectrogram(miro_breath), 3)
        assert peaks == sorted(peaks)

    def test_stable_under_time_reversal(self, miro_breath):
        spec_fwd = mv.spectrogram(miro_breath)
        spec_rev = mv.spectrogram(
            mv.AudioBuffer(miro_breath.sample_rate, miro_breath.samples[::-1].copy())
        )
        fwd, _ = mv.spectral_peaks(spec_fwd, 3)
        rev, _ = mv.spectral_peaks(spec_rev, 3)
        bin_width = spec_fwd.frequency_bins[1] - spec_fwd.frequency_bins[0]
        assert all(abs(a - b) <= bin_width for a, b in zip(fwd, rev))

    def test_count_validated(self, miro_breath):
        with pytest.raises(DomainError):
            mv.spectral_peaks(mv.spectrogram(miro_breath), 0)


class TestEnvelopePeaks:
    def test_counts_amplitude_bursts(self):
        t = np.arange(5 * FS) / FS
        carrier = NoiseSource(3).uniform(5 * FS)
        gate = (np.sin(2 * np.pi * 1.0 * t) > 0.5).astype(float)
        buf = mv.AudioBuffer(FS, carrier * gate)
        assert mv.count_envelope_peaks(buf, min_spacing_s=0.5) == 5

    def test_silence_counts_zero(self):
        assert mv.count_envelope_peaks(mv.AudioBuffer(FS, np.zeros(FS)), 0.5) == 0


class TestExports:
    def test_csv_grid_round_trip(self, tmp_path):
        spec = mv.spectrogram(sine(500.0, seconds=0.2), window=1024, hop=512)
        path = tmp_path / "grid.csv"
        mv.export_csv(spec, path)
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0][0] == "time_s"
        assert len(rows) == spec.magnitudes.shape[0] + 1
        assert len(rows[1]) == spec.magnitudes.shape[1] + 1
        assert float(rows[1][1]) == pytest.approx(spec.magnitudes[0, 0], abs=0.01)

    def test_png_dimensions_and_polarity(self, tmp_path):
        from PIL import Image

        spec = mv.spectrogram(sine(1000.0), window=1024, hop=512)
        path = tmp_path / "spec.png"
        mv.export_png(spec, path)
        with Image.open(path) as img:
            assert img.size == (spec.magnitudes.shape[0], spec.magnitudes.shape[1])
            pixels = np.asarray(img)
        bin_width = spec.frequency_bins[1] - spec.frequency_bins[0]
        tone_row = pixels.shape[0] - 1 - int(round(1000.0 / bin_width))
        # dark = high energy: the tone row must be darker than the image mean
        assert pixels[tone_row].mean() < pixels.mean() / 2
