"""Closed-form scaling laws from body mass to vocal-apparatus parameters.

All relations describe a generic land mammal. Units: mass kg, lung
capacity mL (but litres wherever flow is computed), rates Hz, tract
length cm, flow L/s, duration s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

# Supported body-mass range: roughly mouse to elephant, with margin.
# Outside it the laws are unvalidated, so profile() refuses rather than
# extrapolating.
MASS_MIN_KG = 0.01
MASS_MAX_KG = 10000.0

# Speed of sound inside a warm, humid vocal tract, cm/s.
SPEED_OF_SOUND_CM_S = 35000.0

# The tract-length law goes non-positive below ~0.53 kg and the formant
# law yields 0 Hz for n=1 with the mouth fully closed; these floors keep
# the downstream resonators well defined.
TRACT_LENGTH_FLOOR_CM = 1.0
FORMANT_FLOOR_HZ = 30.0

# Fraction of lung volume spent per vocalisation, and the combined
# flow constant (0.42 of capacity, airflow restricted by 2.62, over half
# a breath period: 0.42 * 2 / 2.62 rounds to 0.32).
USABLE_LUNG_FRACTION = 0.42
FLOW_CONSTANT = 0.32


@dataclass(frozen=True)
class AllometricProfile:
    """Every mass-derived quantity of the vocal apparatus."""

    mass_kg: float
    lung_capacity_ml: float
    breathing_rate_hz: float
    flow_rate_l_s: float
    fundamental_frequency_hz: float
    tract_length_cm: float
    utterance_duration_s: float


@dataclass(frozen=True)
class FormantSpec:
    """One tube resonance: which mode, how closed the mouth is, and where
    the resulting peak lands (post-floor)."""

    index: int
    mouth_opening: float
    speed_of_sound: float
    tract_length: float
    frequency: float


def _check_positive(value, name: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return value


def lung_capacity(mass_kg: float) -> float:
    """Lung capacity in millilitres: 53.5 * M^1.06."""
    mass_kg = _check_positive(mass_kg, "mass")
    return 53.5 * mass_kg**1.06


def breathing_rate(mass_kg: float) -> float:
    """Resting breathing rate in Hz: 0.84 * M^-0.26."""
    mass_kg = _check_positive(mass_kg, "mass")
    return 0.84 * mass_kg**-0.26


def flow_rate(capacity_l: float, breathing_rate_hz: float) -> float:
    """Volumetric airflow in litres/second: 0.32 * C * B (C in litres)."""
    capacity_l = _check_positive(capacity_l, "capacity")
    breathing_rate_hz = _check_positive(breathing_rate_hz, "breathing rate")
    return FLOW_CONSTANT * capacity_l * breathing_rate_hz


def utterance_duration(capacity_l: float, flow_rate_l_s: float) -> float:
    """Length of one vocalisation in seconds: usable lung volume over flow.

    Uses 42% of capacity; with the default flow law this collapses to
    0.42/(0.32*B) = 1.3125/B, independent of capacity.
    """
    capacity_l = _check_positive(capacity_l, "capacity")
    flow_rate_l_s = _check_positive(flow_rate_l_s, "flow rate")
    return USABLE_LUNG_FRACTION * capacity_l / flow_rate_l_s


def fundamental_frequency(mass_kg: float) -> float:
    """Mean vocal-fold rate in Hz: M^-0.4 kHz, returned in Hz."""
    mass_kg = _check_positive(mass_kg, "mass")
    return 1000.0 * mass_kg**-0.4


def tract_length(mass_kg: float) -> float:
    """Vocal-tract length in cm: 3.15 + 11.53*log10(M), floored.

    Base-10 log: it reproduces the ~6.6 cm tract of a ~2 kg animal
    (natural log would give 11.1 cm). The floor covers masses below
    ~0.53 kg where the regression goes non-positive.
    """
    mass_kg = _check_positive(mass_kg, "mass")
    return max(3.15 + 11.53 * math.log10(mass_kg), TRACT_LENGTH_FLOOR_CM)


def formant_frequency(
    n: int,
    mouth_opening: float,
    tract_length_cm: float,
    speed_of_sound: float = SPEED_OF_SOUND_CM_S,
) -> float:
    """Centre of the nth tract resonance in Hz for a uniform tube.

    (2n - (m+1)) * c / (4L), where m in [0,1] runs open -> closed. The
    result is floored (n=1 with a fully closed mouth hits 0 Hz raw).
    """
    if int(n) != n or n < 1:
        raise DomainError(f"formant index must be an integer >= 1, got {n!r}")
    mouth_opening = float(mouth_opening)
    if not 0.0 <= mouth_opening <= 1.0:
        raise DomainError(f"mouth opening must be in [0, 1], got {mouth_opening!r}")
    tract_length_cm = _check_positive(tract_length_cm, "tract length")
    raw = (2 * n - (mouth_opening + 1.0)) * speed_of_sound / (4.0 * tract_length_cm)
    return max(raw, FORMANT_FLOOR_HZ)


def formant(
    n: int,
    mouth_opening: float,
    tract_length_cm: float,
    speed_of_sound: float = SPEED_OF_SOUND_CM_S,
) -> FormantSpec:
    """formant_frequency packaged with the inputs that produced it."""
    return FormantSpec(
        index=int(n),
        mouth_opening=float(mouth_opening),
        speed_of_sound=float(speed_of_sound),
        tract_length=float(tract_length_cm),
        frequency=formant_frequency(n, mouth_opening, tract_length_cm, speed_of_sound),
    )


def profile(mass_kg: float) -> AllometricProfile:
    """The full chained profile for one body mass.

    Each field equals the corresponding single-law result exactly; flow
    and duration are computed in litres.
    """
    mass_kg = _check_positive(mass_kg, "mass")
    if not MASS_MIN_KG <= mass_kg <= MASS_MAX_KG:
        raise DomainError(
            f"mass {mass_kg!r} kg outside supported range "
            f"[{MASS_MIN_KG}, {MASS_MAX_KG}]"
        )
    capacity_ml = lung_capacity(mass_kg)
    rate = breathing_rate(mass_kg)
    flow = flow_rate(capacity_ml / 1000.0, rate)
    return AllometricProfile(
        mass_kg=mass_kg,
        lung_capacity_ml=capacity_ml,
        breathing_rate_hz=rate,
        flow_rate_l_s=flow,
        fundamental_frequency_hz=fundamental_frequency(mass_kg),
        tract_length_cm=tract_length(mass_kg),
        utterance_duration_s=utterance_duration(capacity_ml / 1000.0, flow),
    )
