"""Sample-generation pipeline: lungs (airflow envelope) -> larynx (glottal
source + aspiration) -> vocal tract (three formant resonators + uvula) ->
post-processing.

Rendering is block based: parameter changes are absorbed at block
boundaries (256 samples), which is also what keeps the streaming path
real-time safe. All randomness comes from the pinned counter-based
generator in rng.py, so identical requests render bit-identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from . import allometry
from .errors import DomainError, DurationCapError
from .rng import NoiseSource, derive_seed
from .voice import (
    TEMPLATES,
    AffectState,
    VocalisationTemplate,
    VoiceParams,
    apply_affect,
    arousal_airflow_factor,
)

BLOCK_SIZE = 256
RENDER_CAP_S = 30.0

# Envelope edge fractions of the utterance duration.
ATTACK_FRACTION = 0.10
RELEASE_FRACTION = 0.15

# Loudness reference: the flow of a ~2 kg animal maps to a full-scale
# envelope; more flow keeps the envelope at 1 and adds gain at the mix.
REFERENCE_FLOW_L_S = allometry.flow_rate(
    allometry.lung_capacity(2.0) / 1000.0, allometry.breathing_rate(2.0)
)

# Mix-stage make-up gain, calibrated so a neutral ~2 kg voiced render
# peaks around -7.5 dBFS (clear of the soft-clip knee with one doubling
# of airflow in hand).
SOURCE_GAIN = 1.0

FORMANT_COUNT = 3
FORMANT_BANDWIDTH_FRACTION = 0.10
FORMANT_BANDWIDTH_FLOOR_HZ = 50.0
# Section gains taper so the first formant dominates, as in voiced
# mammal spectra; rescaled per configuration to ~0 dB aggregate at F1.
PARALLEL_FORMANT_GAINS = (1.0, 0.63, 0.40)

DC_HIGHPASS_HZ = 20.0
SOFTCLIP_KNEE = 0.8
NORMALIZE_PEAK = 10.0 ** (-3.0 / 20.0)  # -3 dBFS

# Breathing scheduler defaults.
DEFAULT_P_VOC = 0.3
INHALE_FRACTION = 0.45
INHALE_LEVEL = 0.3

# The glottal oscillator cannot run meaningfully above this fraction of
# the sample rate; extreme mass/excursion combinations clamp here.
MAX_PHASE_INC = 0.45


@dataclass
class AudioBuffer:
    """Mono float samples at a fixed rate; values nominally in [-1, 1]."""

    sample_rate: int
    samples: np.ndarray

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class ResonatorConfig:
    """One band-pass section: centre/bandwidth in Hz plus a linear gain."""

    center_frequency: float
    bandwidth: float
    gain: float


@dataclass(frozen=True)
class RenderRequest:
    """Everything that determines a render; seed covers all stochastics."""

    params: VoiceParams
    affect: AffectState = field(default_factory=AffectState)
    seed: int = 0
    utterance_kind: str = "voiced"


# ---------------------------------------------------------------------------
# lungs


def _envelope_shape(x) -> np.ndarray:
    """Attack-sustain-release over normalised time x in [0, 1]."""
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    a = x < ATTACK_FRACTION
    out = np.where(a, 0.5 - 0.5 * np.cos(np.pi * x / ATTACK_FRACTION), out)
    r = x > 1.0 - RELEASE_FRACTION
    out = np.where(r, 0.5 - 0.5 * np.cos(np.pi * (1.0 - x) / RELEASE_FRACTION), out)
    return out


def lungs_envelope(t, duration: float, flow_rate_l_s: float):
    """Airflow envelope in [0, 1] at time(s) t of an utterance.

    Raised-cosine edges around a sustained peak proportional to flow,
    normalised by the ~2 kg reference flow. The envelope clamps at 1;
    surplus loudness is applied as gain at the mix stage instead.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t > duration):
        raise DomainError(f"t outside [0, {duration}]")
    peak = min(max(flow_rate_l_s / REFERENCE_FLOW_L_S, 0.0), 1.0)
    return peak * _envelope_shape(t / duration)


# ---------------------------------------------------------------------------
# larynx


def _polyblep(phase: np.ndarray, inc: np.ndarray) -> np.ndarray:
    # Two-sample polynomial correction around the sawtooth wrap; inc = 0
    # selects nothing, so unsmoothed evaluation falls out naturally.
    out = np.zeros_like(phase)
    lo = phase < inc
    if np.any(lo):
        t = phase[lo] / inc[lo]
        out[lo] = 2.0 * t - t * t - 1.0
    hi = phase > 1.0 - inc
    if np.any(hi):
        t = (phase[hi] - 1.0) / inc[hi]
        out[hi] = t * t + 2.0 * t + 1.0
    return out


def glottal_sample(phase, voice_quality: float, phase_increment=0.0):
    """Glottal pulse value(s) at phase in [0, 1).

    A blend of a dull parabolic pulse (-12 dB/oct) and a polyBLEP-smoothed
    sawtooth (-6 dB/oct); voice_quality = 0 is fully dark, 1 fully bright.
    phase_increment (f0/fs) sizes the antialiasing correction. Both shapes
    are zero-mean over a period.
    """
    scalar = np.isscalar(phase)
    ph = np.atleast_1d(np.asarray(phase, dtype=float))
    inc = np.broadcast_to(np.asarray(phase_increment, dtype=float), ph.shape)
    saw = 2.0 * ph - 1.0 - _polyblep(ph, inc)
    dark = 6.0 * ph * ph - 6.0 * ph + 1.0
    out = voice_quality * saw + (1.0 - voice_quality) * dark
    return float(out[0]) if scalar else out


def pitch_contour(t, duration: float, f0_base, f0_excursion: float,
                  quantisation_steps: int = 0):
    """Rise-fall pitch in Hz: base * (1 + excursion * sin(pi*t/duration)).

    With quantisation_steps > 0 the hump is sample-and-held onto that many
    equal levels, so steps=1 gives a single plateau above the base.
    """
    t = np.asarray(t, dtype=float)
    hump = np.sin(np.pi * t / duration)
    if quantisation_steps > 0:
        hump = np.round(hump * quantisation_steps) / quantisation_steps
    return f0_base * (1.0 + f0_excursion * hump)


def _advance_phase(phase0: float, inc: np.ndarray):
    cs = np.cumsum(inc)
    phases = (phase0 + cs - inc) % 1.0
    return phases, float((phase0 + cs[-1]) % 1.0)


def larynx_process(airflow, f0_now, params: VoiceParams, noise_source: NoiseSource,
                   voiced: bool = True, phase: float = 0.0, phase2: float = 0.0):
    """Excitation for one block, gated multiplicatively by airflow.

    Voiced: glottal pulses at f0 mixed with aspiration noise at the
    params.aspiration ratio; with dual folds enabled, two equal-amplitude
    oscillators offset by fold_detune. Unvoiced: noise only. Returns
    (samples, end_phase, end_phase2) so oscillators thread across blocks.
    """
    airflow = np.atleast_1d(np.asarray(airflow, dtype=float))
    n = airflow.shape[0]
    noise = noise_source.uniform(n)
    if not voiced:
        return airflow * noise, phase, phase2
    f0 = np.broadcast_to(np.asarray(f0_now, dtype=float), (n,))
    inc = np.minimum(f0 / params.sample_rate, MAX_PHASE_INC)
    ph, phase = _advance_phase(phase, inc)
    pulse = glottal_sample(ph, params.voice_quality, inc)
    if params.dual_folds_enabled:
        inc2 = np.minimum(
            (f0 + params.fold_detune) / params.sample_rate, MAX_PHASE_INC
        )
        ph2, phase2 = _advance_phase(phase2, inc2)
        pulse = 0.5 * (pulse + glottal_sample(ph2, params.voice_quality, inc2))
    mixed = (1.0 - params.aspiration) * pulse + params.aspiration * noise
    return airflow * mixed, phase, phase2


# ---------------------------------------------------------------------------
# vocal tract


def tract_configs(tract_length_cm: float, mouth_opening: float):
    """Three resonator configs for the current tube shape.

    Centres follow the uniform-tube law; bandwidths are proportional-Q
    with a floor; the tapered section gains are rescaled so the aggregate
    parallel response at the first centre sits at ~0 dB.
    """
    centers = [
        allometry.formant_frequency(n, mouth_opening, tract_length_cm)
        for n in range(1, FORMANT_COUNT + 1)
    ]
    bandwidths = [
        max(FORMANT_BANDWIDTH_FRACTION * fc, FORMANT_BANDWIDTH_FLOOR_HZ)
        for fc in centers
    ]
    f1 = centers[0]

    def mag_at_f1(fc, bw):
        if fc == f1:
            return 1.0
        return 1.0 / math.sqrt(1.0 + ((f1 * f1 - fc * fc) / (f1 * bw)) ** 2)

    aggregate = math.sqrt(
        sum(
            (g * mag_at_f1(fc, bw)) ** 2
            for g, fc, bw in zip(PARALLEL_FORMANT_GAINS, centers, bandwidths)
        )
    )
    return tuple(
        ResonatorConfig(fc, bw, g / aggregate)
        for fc, bw, g in zip(centers, bandwidths, PARALLEL_FORMANT_GAINS)
    )


def resonator_coefficients(config: ResonatorConfig, sample_rate: int):
    """Constant-peak-gain band-pass biquad (b, a) for one section.

    Centres landing outside (0, Nyquist) for small tracts/rates are pulled
    inside; the poles are then inside the unit circle for any positive
    bandwidth, so stability is structural rather than tuned.
    """
    fc = min(max(config.center_frequency, 1.0), 0.49 * sample_rate)
    q = fc / config.bandwidth
    w0 = 2.0 * math.pi * fc / sample_rate
    alpha = math.sin(w0) / (2.0 * q)
    a0 = 1.0 + alpha
    b = np.array([alpha, 0.0, -alpha]) * (config.gain / a0)
    a = np.array([1.0, -2.0 * math.cos(w0) / a0, (1.0 - alpha) / a0])
    return b, a


def resonator_pole_radius(config: ResonatorConfig, sample_rate: int) -> float:
    """Pole magnitude of the realised section (must be < 1)."""
    _, a = resonator_coefficients(config, sample_rate)
    return math.sqrt(a[2])


def mouth_trajectory(t, syllabic_rate: float, base: float, depth: float):
    """Mouth closure m(t): one open-close cycle per syllable period,
    swinging from base to base+depth; static at the base when depth is 0."""
    t = np.asarray(t, dtype=float)
    m = base + depth * (1.0 - np.cos(2.0 * np.pi * syllabic_rate * t)) / 2.0
    return np.clip(m, 0.0, 1.0)


def uvula_modulate(samples, t, uvula_rate: float, uvula_depth: float):
    """Uvula trill as amplitude modulation; depth 0 is the exact identity."""
    if uvula_depth == 0.0:
        return samples
    t = np.asarray(t, dtype=float)
    mod = 1.0 - uvula_depth * (1.0 + np.cos(2.0 * np.pi * uvula_rate * t)) / 2.0
    return samples * mod


# ---------------------------------------------------------------------------
# post-processing


def _soft_clip(x: np.ndarray) -> np.ndarray:
    # Monotone limiter: identity below the knee, tanh above, asymptote 1.
    out = np.array(x, dtype=float, copy=True)
    over = np.abs(out) > SOFTCLIP_KNEE
    if np.any(over):
        span = 1.0 - SOFTCLIP_KNEE
        excess = (np.abs(out[over]) - SOFTCLIP_KNEE) / span
        out[over] = np.sign(out[over]) * (SOFTCLIP_KNEE + span * np.tanh(excess))
    return out


def _dc_blocker_coefficients(sample_rate: int):
    pole = math.exp(-2.0 * math.pi * DC_HIGHPASS_HZ / sample_rate)
    gain = (1.0 + pole) / 2.0
    return np.array([gain, -gain]), np.array([1.0, -pole])


def post_process(buffer: AudioBuffer, normalize: bool = False) -> AudioBuffer:
    """DC removal (20 Hz one-pole high-pass), soft-clip into [-1, 1], and
    optional peak normalisation to -3 dBFS."""
    b, a = _dc_blocker_coefficients(buffer.sample_rate)
    samples = lfilter(b, a, np.asarray(buffer.samples, dtype=float))
    samples = _soft_clip(samples)
    if normalize:
        peak = float(np.max(np.abs(samples))) if len(samples) else 0.0
        if peak > 0.0:
            samples = samples * (NORMALIZE_PEAK / peak)
    return AudioBuffer(buffer.sample_rate, samples)


# ---------------------------------------------------------------------------
# the block renderer


class UtteranceStream:
    """Block-based renderer for a single utterance.

    Parameters may be replaced between blocks (set_params) and are
    absorbed at the next block boundary; the effective f0 base is
    interpolated across one block to avoid zipper artefacts. Duration,
    template, seed and sample rate are fixed at creation.
    """

    def __init__(self, params: VoiceParams, affect: AffectState | None = None,
                 *, kind: str = "voiced", seed: int = 0,
                 duration: float | None = None, block_size: int = BLOCK_SIZE):
        params.validate()
        affect = affect if affect is not None else AffectState()
        if kind not in TEMPLATES:
            raise DomainError(
                f"unknown utterance kind {kind!r}; one of {sorted(TEMPLATES)}"
            )
        self._template: VocalisationTemplate = TEMPLATES[kind]
        self._params = params
        self._affect = affect
        self._pending = None
        self._block_size = int(block_size)
        self._sample_rate = int(params.sample_rate)

        eff = apply_affect(params, affect)
        capacity_l = allometry.lung_capacity(eff.mass) / 1000.0
        base_flow = allometry.flow_rate(capacity_l, allometry.breathing_rate(eff.mass))
        effective_flow = base_flow * eff.airflow_scale
        if duration is not None:
            self._duration = float(duration)
        elif effective_flow <= 0.0:
            # Zero airflow renders silence; keep the unscaled period so a
            # buffer still comes back instead of a division blow-up.
            self._duration = allometry.utterance_duration(capacity_l, base_flow)
        else:
            self._duration = (
                allometry.utterance_duration(capacity_l, effective_flow)
                * self._template.duration_scale
            )
        if self._duration > RENDER_CAP_S:
            raise DurationCapError(
                f"utterance of {self._duration:.1f} s exceeds the "
                f"{RENDER_CAP_S:.0f} s render cap"
            )
        self._n_total = max(int(round(self._duration * self._sample_rate)), 0)
        self._pos = 0
        self._phase = 0.0
        self._phase2 = 0.0
        self._noise = NoiseSource(seed)
        self._zis = [np.zeros(2) for _ in range(FORMANT_COUNT)]
        self._prev_f0_base: float | None = None
        # telemetry snapshots, refreshed each rendered block
        self.last_f0: float | None = None
        self.last_mouth: float = params.mouth_open_base
        self.last_centers: tuple = ()

    @property
    def duration(self) -> float:
        return self._duration

    @property
    def sample_rate(self) -> int:
        return self._sample_rate

    @property
    def total_samples(self) -> int:
        return self._n_total

    @property
    def finished(self) -> bool:
        return self._pos >= self._n_total

    def set_params(self, params: VoiceParams, affect: AffectState | None = None):
        """Queue new parameters; they land at the next block boundary."""
        params.validate()
        self._pending = (params, affect if affect is not None else self._affect)

    def _loudness(self, eff: VoiceParams) -> float:
        capacity_l = allometry.lung_capacity(eff.mass) / 1000.0
        flow = allometry.flow_rate(capacity_l, allometry.breathing_rate(eff.mass))
        return flow * eff.airflow_scale / REFERENCE_FLOW_L_S

    def _shape(self, x: np.ndarray) -> np.ndarray:
        tpl = self._template
        if tpl.envelope == "pulsed":
            pulses = (1.0 - np.cos(2.0 * np.pi * (tpl.syllables or 1) * x)) / 2.0
            return _envelope_shape(x) * pulses
        if tpl.envelope == "burst":
            pulses = (1.0 - np.cos(2.0 * np.pi * (tpl.syllables or 1) * x)) / 2.0
            return pulses**3 * (1.0 - x)
        return _envelope_shape(x)

    def next_block(self, n: int | None = None) -> np.ndarray:
        """Render the next n samples (zero-padded past the end)."""
        n = self._block_size if n is None else int(n)
        out = np.zeros(n)
        if self.finished:
            return out
        if self._pending is not None:
            self._params, self._affect = self._pending
            self._pending = None
        eff = apply_affect(self._params, self._affect)
        fs = self._sample_rate
        k = min(n, self._n_total - self._pos)
        t = np.arange(self._pos, self._pos + k) / fs
        x = t / self._duration

        loudness = self._loudness(eff)
        airflow = min(max(loudness, 0.0), 1.0) * self._shape(x)

        if self._template.voiced:
            base = eff.f0_base
            if self._prev_f0_base is not None and self._prev_f0_base != base:
                base = np.linspace(self._prev_f0_base, base, k, endpoint=False)
            self._prev_f0_base = eff.f0_base
            f0 = pitch_contour(
                t, self._duration, base, eff.f0_excursion, eff.quantisation_steps
            )
            excitation, self._phase, self._phase2 = larynx_process(
                airflow, f0, eff, self._noise, True, self._phase, self._phase2
            )
            self.last_f0 = float(np.asarray(f0).reshape(-1)[k // 2])
        else:
            excitation, self._phase, self._phase2 = larynx_process(
                airflow, 0.0, eff, self._noise, False, self._phase, self._phase2
            )
            self.last_f0 = None

        mix = excitation * (max(loudness, 1.0) * SOURCE_GAIN)

        if self._template.static_tract:
            mouth = float(eff.mouth_open_base)
        else:
            mouth = float(
                mouth_trajectory(
                    t[k // 2], eff.syllabic_rate,
                    eff.mouth_open_base, eff.mouth_open_depth,
                )
            )
        configs = tract_configs(eff.tract_length, mouth)
        y = np.zeros(k)
        for i, config in enumerate(configs):
            b, a = resonator_coefficients(config, fs)
            section, self._zis[i] = lfilter(b, a, mix, zi=self._zis[i])
            y += section

        if self._template.uvula and eff.uvula_depth > 0.0:
            y = uvula_modulate(y, t, eff.uvula_rate, eff.uvula_depth)

        self.last_mouth = mouth
        self.last_centers = tuple(c.center_frequency for c in configs)
        out[:k] = y
        self._pos += k
        return out

    def render(self) -> np.ndarray:
        """All remaining samples in one array (exactly total_samples long)."""
        blocks = []
        while not self.finished:
            blocks.append(self.next_block())
        if not blocks:
            return np.zeros(0)
        return np.concatenate(blocks)[: self._n_total]


def render_utterance(request: RenderRequest, *, postprocess: bool = True,
                     normalize: bool = False) -> AudioBuffer:
    """Render one utterance to an AudioBuffer.

    Deterministic: the same request yields bit-identical samples. The
    duration is the mass-derived utterance period divided by the
    (affect-scaled) airflow; renders above the 30 s cap are refused.
    """
    stream = UtteranceStream(
        request.params, request.affect,
        kind=request.utterance_kind, seed=request.seed,
    )
    buffer = AudioBuffer(stream.sample_rate, stream.render())
    if postprocess:
        buffer = post_process(buffer, normalize=normalize)
    return buffer


# ---------------------------------------------------------------------------
# breathing scheduler


def _mix_into(out: np.ndarray, start: int, segment: np.ndarray):
    stop = min(start + len(segment), len(out))
    if stop > start:
        out[start:stop] += segment[: stop - start]


def breathing_session(params: VoiceParams, affect: AffectState | None = None,
                      wall_duration: float = 10.0, seed: int = 0,
                      p_voc: float = DEFAULT_P_VOC) -> AudioBuffer:
    """Cyclic breathing with stochastic vocalisation on exhales.

    The cycle rate is the mass-derived breathing rate scaled by the
    arousal airflow curve. Each cycle is a quiet inhale then an exhale;
    with probability p_voc (one pinned-RNG draw per cycle) the exhale is
    replaced by a voiced utterance of the same span. Deterministic per
    (params, affect, seed).
    """
    params.validate()
    affect = affect if affect is not None else AffectState()
    if wall_duration > RENDER_CAP_S:
        raise DurationCapError(
            f"session of {wall_duration:.1f} s exceeds the "
            f"{RENDER_CAP_S:.0f} s cap"
        )
    fs = params.sample_rate
    rate = allometry.breathing_rate(params.mass) * arousal_airflow_factor(
        affect.arousal
    )
    cycle = 1.0 / rate
    out = np.zeros(int(round(wall_duration * fs)))
    parent = NoiseSource(seed)

    for k in range(int(wall_duration / cycle)):
        t0 = k * cycle
        gate = (parent.uniform(1)[0] + 1.0) / 2.0  # uniform in [0, 1)
        inhale = UtteranceStream(
            params, affect, kind="breath",
            seed=derive_seed(seed, 2 * k), duration=cycle * INHALE_FRACTION,
        )
        seg = post_process(AudioBuffer(fs, inhale.render())).samples
        _mix_into(out, int(round(t0 * fs)), INHALE_LEVEL * seg)

        exhale_kind = "voiced" if gate < p_voc else "breath"
        exhale = UtteranceStream(
            params, affect, kind=exhale_kind,
            seed=derive_seed(seed, 2 * k + 1),
            duration=cycle * (1.0 - INHALE_FRACTION),
        )
        seg = post_process(AudioBuffer(fs, exhale.render())).samples
        _mix_into(out, int(round((t0 + cycle * INHALE_FRACTION) * fs)), seg)

    return AudioBuffer(fs, out)


# ---------------------------------------------------------------------------
# live session stream


class SessionEngine:
    """Continuous block stream for a live design session.

    Exact silence while idle, utterances on demand; parameter updates and
    vocalise commands land between blocks, honouring the real-time
    contract (the per-block path allocates nothing unbounded and does no
    I/O). Each vocalisation draws a fresh child seed so a session's audio
    is a pure function of (seed, message log).
    """

    def __init__(self, params: VoiceParams, affect: AffectState | None = None,
                 seed: int = 0, block_size: int = BLOCK_SIZE):
        params.validate()
        self.params = params
        self.affect = affect if affect is not None else AffectState()
        self._seed = seed
        self._utterances = 0
        self._block = int(block_size)
        self._stream: UtteranceStream | None = None
        self.position = 0
        self._fs = int(params.sample_rate)
        self._dc_b, self._dc_a = _dc_blocker_coefficients(self._fs)
        self._dc_zi = np.zeros(1)

    @property
    def sample_rate(self) -> int:
        return self._fs

    @property
    def block_size(self) -> int:
        return self._block

    @property
    def vocalising(self) -> bool:
        return self._stream is not None and not self._stream.finished

    def set_state(self, params: VoiceParams, affect: AffectState | None = None):
        params.validate()
        self.params = params
        if affect is not None:
            self.affect = affect
        if self.vocalising:
            self._stream.set_params(params, self.affect)

    def vocalise(self, kind: str = "voiced") -> UtteranceStream:
        self._stream = UtteranceStream(
            self.params, self.affect, kind=kind,
            seed=derive_seed(self._seed, self._utterances),
        )
        self._utterances += 1
        return self._stream

    def telemetry(self) -> dict:
        stream = self._stream
        if stream is None or stream.finished:
            return {"f0": None, "mouth": self.params.mouth_open_base, "formants": []}
        return {
            "f0": stream.last_f0,
            "mouth": stream.last_mouth,
            "formants": list(stream.last_centers),
        }

    def next_block(self) -> np.ndarray:
        self.position += self._block
        if not self.vocalising:
            # Bit-exact digital silence between utterances; the DC blocker
            # restarts clean at the next one.
            self._dc_zi = np.zeros(1)
            return np.zeros(self._block)
        raw = self._stream.next_block(self._block)
        y, self._dc_zi = lfilter(self._dc_b, self._dc_a, raw, zi=self._dc_zi)
        return _soft_clip(y)
