# The four corners of the affect plane, rendered with one fixed seed so
# the only differences are the valence/arousal mappings: high arousal is
# shorter and louder, high valence swings the pitch further.

import pathlib

import numpy as np

from mammalvoc import (
    AffectState, RenderRequest, VoiceParams, export_png, render_utterance,
    resolve_preset, spectrogram, track_f0, write_wav,
)

out = pathlib.Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

params = resolve_preset("miro", VoiceParams())

for valence in (-1.0, +1.0):
    for arousal in (-1.0, +1.0):
        request = RenderRequest(params, AffectState(valence, arousal), seed=11)
        buffer = render_utterance(request)
        tag = f"v{'+' if valence > 0 else '-'}a{'+' if arousal > 0 else '-'}"
        write_wav(buffer, out / f"affect_{tag}.wav")
        export_png(spectrogram(buffer), out / f"affect_{tag}.png")
        _, f0 = track_f0(buffer, 400, 1600)
        print(f"valence {valence:+.0f} arousal {arousal:+.0f}: "
              f"{buffer.duration:5.2f} s, F0 spread {np.nanstd(f0):6.1f} Hz")
