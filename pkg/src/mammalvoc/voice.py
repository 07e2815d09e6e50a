"""Voice parameter set, affect mapping, and the preset registry."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace

from . import allometry
from .errors import DomainError, UnknownPresetError

# Affect mapping constants. The underlying behaviours are directional
# (high arousal -> more airflow -> shorter/louder; low valence -> flatter
# pitch); the magnitudes below are this implementation's calibration and
# live only here.
AROUSAL_AIRFLOW_BASE = 2.0     # airflow multiplier at arousal +1 (1/x at -1)
VALENCE_EXCURSION_LOW = 0.1    # pitch-excursion multiplier at valence -1
VALENCE_EXCURSION_HIGH = 1.5   # pitch-excursion multiplier at valence +1
VALENCE_QUALITY_SHIFT = 0.3    # max voice-quality shift toward tense

# Legal ranges for every bounded parameter, shared by validation, the
# service protocol, and the UI. None means "strictly positive".
PARAM_RANGES: dict[str, tuple[float, float]] = {
    "mass": (allometry.MASS_MIN_KG, allometry.MASS_MAX_KG),
    "f0_base": (10.0, 8000.0),
    "f0_excursion": (0.0, 2.0),
    "voice_quality": (0.0, 1.0),
    "aspiration": (0.0, 1.0),
    "quantisation_steps": (0, 64),
    "fold_detune": (0.0, 400.0),
    "tract_length": (allometry.TRACT_LENGTH_FLOOR_CM, 200.0),
    "mouth_open_base": (0.0, 1.0),
    "mouth_open_depth": (0.0, 1.0),
    "syllabic_rate": (0.1, 20.0),
    "uvula_rate": (0.1, 100.0),
    "uvula_depth": (0.0, 1.0),
    "airflow_scale": (0.0, 16.0),
    "sample_rate": (16000, 48000),
}


@dataclass(frozen=True)
class VoiceParams:
    """The full slider set of the design environment.

    Defaults correspond to a 1 kg animal (where the mass laws are all
    identities) with a moderate, slightly breathy voice.
    """

    mass: float = 1.0                 # kg
    f0_base: float = 1000.0           # Hz
    f0_excursion: float = 0.12        # fraction of f0_base for the rise-fall
    voice_quality: float = 0.5        # 0 = lax/dark, 1 = tense/bright
    aspiration: float = 0.15          # noise mix, 0..1
    quantisation_steps: int = 0       # 0 = continuous pitch contour
    dual_folds_enabled: bool = False
    fold_detune: float = 20.0         # Hz offset of the second fold set
    tract_length: float = 3.15        # cm
    mouth_open_base: float = 0.2      # 0 = open, 1 = closed (tube closure m)
    mouth_open_depth: float = 0.4
    syllabic_rate: float = 3.0        # Hz, mouth open-close cycles
    uvula_rate: float = 25.0          # Hz
    uvula_depth: float = 0.0          # 0 = uvula off
    airflow_scale: float = 1.0        # multiplier on the mass-derived flow
    sample_rate: int = 44100          # Hz

    def validate(self) -> "VoiceParams":
        """Raise DomainError naming the first out-of-range field."""
        for name, (lo, hi) in PARAM_RANGES.items():
            value = getattr(self, name)
            if not (lo <= value <= hi):
                raise DomainError(f"{name}={value!r} outside legal range [{lo}, {hi}]")
        if self.quantisation_steps != int(self.quantisation_steps):
            raise DomainError("quantisation_steps must be an integer")
        if self.mouth_open_base + self.mouth_open_depth > 1.0:
            raise DomainError(
                "mouth_open_base + mouth_open_depth must not exceed 1, got "
                f"{self.mouth_open_base} + {self.mouth_open_depth}"
            )
        return self


@dataclass(frozen=True)
class AffectState:
    """Point in the valence/arousal plane; components clamp to [-1, 1]."""

    valence: float = 0.0
    arousal: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "valence", min(max(float(self.valence), -1.0), 1.0))
        object.__setattr__(self, "arousal", min(max(float(self.arousal), -1.0), 1.0))


def arousal_airflow_factor(arousal: float) -> float:
    """Log-linear airflow multiplier: 0.5 at -1, 1 at 0, 2 at +1."""
    return AROUSAL_AIRFLOW_BASE**arousal


def valence_excursion_factor(valence: float) -> float:
    """Piecewise log-linear pitch-excursion multiplier: 0.1 / 1 / 1.5."""
    if valence < 0.0:
        return (1.0 / VALENCE_EXCURSION_LOW) ** valence
    return VALENCE_EXCURSION_HIGH**valence


def apply_affect(params: VoiceParams, affect: AffectState) -> VoiceParams:
    """Effective parameters under an affect state; pure, inputs untouched.

    Arousal scales airflow (loudness and tempo); valence scales pitch
    excursion and, when positive, pushes voice quality toward tense.
    """
    quality = min(
        1.0, params.voice_quality + max(affect.valence, 0.0) * VALENCE_QUALITY_SHIFT
    )
    return replace(
        params,
        airflow_scale=params.airflow_scale * arousal_airflow_factor(affect.arousal),
        f0_excursion=params.f0_excursion * valence_excursion_factor(affect.valence),
        voice_quality=quality,
    )


def params_from_mass(mass: float, **overrides) -> VoiceParams:
    """VoiceParams with every mass-derived field set from the scaling laws.

    Only f0_base and tract_length are stored (timing and loudness are
    re-derived from mass at render time); everything else keeps its
    default unless overridden here.
    """
    prof = allometry.profile(mass)
    base = VoiceParams(
        mass=mass,
        f0_base=prof.fundamental_frequency_hz,
        tract_length=prof.tract_length_cm,
    )
    return replace(base, **overrides) if overrides else base


@dataclass(frozen=True)
class VocalisationTemplate:
    """Recipe for one utterance type: voicing, envelope, syllables, uvula."""

    voiced: bool
    envelope: str                   # "smooth" | "pulsed" | "burst"
    syllables: int | None = None    # pulse count for pulsed/burst envelopes
    uvula: bool = True              # allow uvula amplitude modulation
    static_tract: bool = False      # hold the mouth at its base position
    duration_scale: float = 1.0
    inhale: bool = False            # produced on the in-breath (snore)


TEMPLATES: dict[str, VocalisationTemplate] = {
    "voiced": VocalisationTemplate(voiced=True, envelope="smooth"),
    "breath": VocalisationTemplate(
        voiced=False, envelope="smooth", uvula=False, static_tract=True
    ),
    "snore": VocalisationTemplate(
        voiced=False, envelope="smooth", static_tract=True, inhale=True
    ),
    "laugh": VocalisationTemplate(voiced=True, envelope="pulsed", syllables=5),
    "sneeze": VocalisationTemplate(
        voiced=False, envelope="burst", syllables=1, uvula=False, duration_scale=0.35
    ),
    "cough": VocalisationTemplate(
        voiced=False, envelope="burst", syllables=2, uvula=False, duration_scale=0.3
    ),
}
TEMPLATES["normal"] = TEMPLATES["voiced"]


@dataclass(frozen=True)
class Preset:
    """A named slider snapshot: animal (mass-derived) or vocalisation type."""

    name: str
    kind: str  # "animal" | "vocalisation-type"
    overrides: dict = field(default_factory=dict)
    template: str | None = None  # utterance kind for vocalisation types


def _animal(name: str, mass: float, **extra) -> Preset:
    prof = allometry.profile(mass)
    overrides = {
        "mass": mass,
        "f0_base": prof.fundamental_frequency_hz,
        "tract_length": prof.tract_length_cm,
    }
    overrides.update(extra)
    return Preset(name=name, kind="animal", overrides=overrides)


def default_registry() -> dict[str, Preset]:
    """The shipped presets. Animal masses are typical adult values."""
    presets = [
        _animal("rat", 0.3),
        _animal("cat", 4.0),
        _animal("dog", 15.0),
        _animal("sheep", 60.0),
        _animal("cow", 600.0),
        # The robot profile: ~2 kg, single fold set, audible uvula.
        _animal(
            "miro",
            2.0,
            dual_folds_enabled=False,
            uvula_depth=0.25,
            uvula_rate=25.0,
        ),
        Preset("normal", "vocalisation-type", template="voiced"),
        Preset("breath", "vocalisation-type", template="breath"),
        Preset(
            "snore",
            "vocalisation-type",
            overrides={"uvula_depth": 0.6, "uvula_rate": 25.0},
            template="snore",
        ),
        Preset(
            "laugh",
            "vocalisation-type",
            overrides={"syllabic_rate": 4.0},
            template="laugh",
        ),
        Preset("sneeze", "vocalisation-type", template="sneeze"),
        Preset("cough", "vocalisation-type", template="cough"),
    ]
    return {p.name: p for p in presets}


_FIELD_TYPES = {f.name: f.type for f in fields(VoiceParams)}


def resolve_preset(
    name: str,
    base: VoiceParams,
    registry: dict[str, Preset] | None = None,
) -> VoiceParams:
    """Apply a preset's overrides to base; unknown names list what exists."""
    registry = default_registry() if registry is None else registry
    if name not in registry:
        raise UnknownPresetError(name, registry)
    preset = registry[name]
    unknown = set(preset.overrides) - set(_FIELD_TYPES)
    if unknown:
        raise DomainError(f"preset {name!r} overrides unknown fields: {sorted(unknown)}")
    return replace(base, **preset.overrides).validate()


def save_presets(registry: dict[str, Preset], path) -> None:
    """Write the registry as JSON: {"presets": [{name, kind, overrides, template}]}."""
    doc = {
        "presets": [
            {
                "name": p.name,
                "kind": p.kind,
                "overrides": p.overrides,
                "template": p.template,
            }
            for p in registry.values()
        ]
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_presets(path, merge_defaults: bool = True) -> dict[str, Preset]:
    """Read a preset JSON file; by default layered over the shipped set."""
    with open(path) as fh:
        doc = json.load(fh)
    registry = default_registry() if merge_defaults else {}
    for entry in doc["presets"]:
        registry[entry["name"]] = Preset(
            name=entry["name"],
            kind=entry["kind"],
            overrides=dict(entry.get("overrides") or {}),
            template=entry.get("template"),
        )
    return registry
