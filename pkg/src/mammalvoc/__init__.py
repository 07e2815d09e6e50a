"""mammalvoc: a parametric mammalian vocal synthesiser.

One body-mass parameter plus a valence/arousal affect state drive a
lungs -> larynx -> vocal tract -> post-processing pipeline; scaling laws
set lung capacity, breathing rate, airflow, fundamental frequency and
tract length, and everything remains hand-adjustable on top.
"""

from .allometry import (
    AllometricProfile,
    FormantSpec,
    breathing_rate,
    flow_rate,
    formant_frequency,
    fundamental_frequency,
    lung_capacity,
    profile,
    tract_length,
    utterance_duration,
)
from .analysis import (
    Spectrogram,
    count_envelope_peaks,
    detect_voicing,
    estimate_f0,
    export_csv,
    export_png,
    spectral_peaks,
    spectrogram,
    track_f0,
    voiced_fraction,
    voicing_strength,
)
from .engine import (
    AudioBuffer,
    RenderRequest,
    ResonatorConfig,
    SessionEngine,
    UtteranceStream,
    breathing_session,
    post_process,
    render_utterance,
    tract_configs,
)
from .errors import DomainError, DurationCapError, UnknownPresetError, WavFormatError
from .voice import (
    AffectState,
    Preset,
    VoiceParams,
    apply_affect,
    default_registry,
    load_presets,
    params_from_mass,
    resolve_preset,
    save_presets,
)
from .wavfile import WavSpec, read_wav, wav_spec, write_wav

__version__ = "0.1.0"

__all__ = [
    "AffectState",
    "AllometricProfile",
    "AudioBuffer",
    "DomainError",
    "DurationCapError",
    "FormantSpec",
    "Preset",
    "RenderRequest",
    "ResonatorConfig",
    "SessionEngine",
    "Spectrogram",
    "UnknownPresetError",
    "UtteranceStream",
    "VoiceParams",
    "WavFormatError",
    "WavSpec",
    "apply_affect",
    "breathing_rate",
    "breathing_session",
    "count_envelope_peaks",
    "default_registry",
    "detect_voicing",
    "estimate_f0",
    "export_csv",
    "export_png",
    "flow_rate",
    "formant_frequency",
    "fundamental_frequency",
    "load_presets",
    "lung_capacity",
    "params_from_mass",
    "post_process",
    "profile",
    "read_wav",
    "render_utterance",
    "resolve_preset",
    "save_presets",
    "spectral_peaks",
    "spectrogram",
    "tract_configs",
    "tract_length",
    "track_f0",
    "utterance_duration",
    "voiced_fraction",
    "voicing_strength",
    "wav_spec",
    "write_wav",
]
