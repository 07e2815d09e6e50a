# Designing a voice by hand: start from a body mass, then pull the
# sliders like the design studio would, listening via rendered WAVs.

import dataclasses
import pathlib

from mammalvoc import (
    AffectState, RenderRequest, export_png, params_from_mass,
    render_utterance, spectrogram, write_wav,
)

out = pathlib.Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

# 1. The physics picks the defaults: a 2 kg animal.
params = params_from_mass(2.0)
print(f"mass-derived: F0 {params.f0_base:.0f} Hz, tract {params.tract_length:.2f} cm")

buffer = render_utterance(RenderRequest(params, seed=1))
write_wav(buffer, out / "voice_plain.wav")

# 2. Same body, different character: breathier, darker, with a slow
#    wide mouth and the trilled uvula timbre.
designed = dataclasses.replace(
    params,
    voice_quality=0.25,
    aspiration=0.35,
    syllabic_rate=2.0,
    mouth_open_depth=0.6,
    mouth_open_base=0.1,
    uvula_depth=0.3,
)
buffer = render_utterance(RenderRequest(designed, seed=1))
write_wav(buffer, out / "voice_designed.wav")
export_png(spectrogram(buffer), out / "voice_designed.png")

# 3. Quantised pitch gives the contour a melodic, robotic staircase.
stepped = dataclasses.replace(designed, quantisation_steps=3, f0_excursion=0.4)
buffer = render_utterance(RenderRequest(stepped, seed=1))
write_wav(buffer, out / "voice_stepped.wav")

# 4. Mood is orthogonal to anatomy: an excited render of the same voice.
excited = render_utterance(
    RenderRequest(designed, AffectState(valence=0.8, arousal=0.8), seed=1)
)
write_wav(excited, out / "voice_excited.wav")

print("wrote", sorted(p.name for p in out.glob("voice_*")))
