# A living robot idles audibly: cyclic breathing at the mass-derived
# rhythm, with calls popping out of random exhalations. Also renders the
# menagerie (each animal preset) and every vocalisation type.

import pathlib

from mammalvoc import (
    AffectState, RenderRequest, VoiceParams, breathing_session,
    params_from_mass, render_utterance, resolve_preset, write_wav,
)

out = pathlib.Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

miro = resolve_preset("miro", VoiceParams())

# ~0.7 Hz breathing; about a third of exhales become calls.
calm = breathing_session(miro, AffectState(), wall_duration=15.0, seed=3)
write_wav(calm, out / "breathing_calm.wav")

# An agitated session: faster cycle, shorter louder calls.
excited = breathing_session(
    miro, AffectState(valence=-0.5, arousal=+1.0), wall_duration=15.0, seed=3
)
write_wav(excited, out / "breathing_excited.wav")

for animal in ("rat", "cat", "dog", "sheep", "cow"):
    params = resolve_preset(animal, VoiceParams())
    buffer = render_utterance(RenderRequest(params, seed=7))
    write_wav(buffer, out / f"animal_{animal}.wav")
    print(f"{animal:>6}: {params.mass:6.1f} kg, F0 {params.f0_base:7.1f} Hz, "
          f"{buffer.duration:4.2f} s")

base = params_from_mass(2.0)
for kind in ("breath", "snore", "laugh", "sneeze", "cough"):
    params = resolve_preset(kind, base)
    buffer = render_utterance(RenderRequest(params, seed=5, utterance_kind=kind))
    write_wav(buffer, out / f"type_{kind}.wav")

print("wrote", len(list(out.glob("*.wav"))), "WAV files into", out)
