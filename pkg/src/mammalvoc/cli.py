"""Command-line front door: profiles, renders, spectrograms, breathing
sessions, and the live design service.

Exit codes: 0 success, 2 usage or domain error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import allometry, analysis, engine, voice, wavfile
from .errors import DomainError, UnknownPresetError, WavFormatError

ENV_SAMPLE_RATE = "MAMMALVOC_SAMPLE_RATE"

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_IO = 3


def _default_sample_rate() -> int:
    return int(os.environ.get(ENV_SAMPLE_RATE, 44100))


def _parse_override(text: str):
    if "=" not in text:
        raise DomainError(f"override {text!r} is not key=value")
    key, raw = text.split("=", 1)
    key = key.strip()
    field_types = {f.name: f.type for f in dataclasses.fields(voice.VoiceParams)}
    if key not in field_types:
        raise DomainError(
            f"unknown parameter {key!r}; one of {', '.join(sorted(field_types))}"
        )
    kind = field_types[key]
    raw = raw.strip()
    if kind == "bool":
        if raw.lower() in ("1", "true", "yes", "on"):
            return key, True
        if raw.lower() in ("0", "false", "no", "off"):
            return key, False
        raise DomainError(f"{key} expects a boolean, got {raw!r}")
    if kind == "int":
        return key, int(raw)
    return key, float(raw)


def _registry(args):
    if getattr(args, "presets", None):
        return voice.load_presets(args.presets)
    return voice.default_registry()


def _build_params(args) -> tuple[voice.VoiceParams, str]:
    """Resolve preset/mass/--set into params and an utterance kind."""
    registry = _registry(args)
    params = voice.VoiceParams(sample_rate=args.sample_rate)
    kind = "voiced"
    if args.mass is not None:
        params = voice.params_from_mass(args.mass, sample_rate=args.sample_rate)
    if getattr(args, "preset", None):
        params = voice.resolve_preset(args.preset, params, registry)
        template = registry[args.preset].template
        if template:
            kind = template
    if getattr(args, "kind", None):
        kind = args.kind
    overrides = dict(_parse_override(item) for item in (args.set or []))
    if overrides:
        params = dataclasses.replace(params, **overrides)
    return params.validate(), kind


def cmd_profile(args) -> int:
    prof = allometry.profile(args.mass)
    if args.json:
        print(json.dumps(dataclasses.asdict(prof), indent=2, sort_keys=True))
        return EXIT_OK
    rows = [
        ("mass", f"{prof.mass_kg:g} kg"),
        ("lung capacity", f"{prof.lung_capacity_ml:.1f} mL"),
        ("breathing rate", f"{prof.breathing_rate_hz:.2f} Hz"),
        ("flow rate", f"{prof.flow_rate_l_s:.4f} L/s"),
        ("fundamental frequency", f"{prof.fundamental_frequency_hz:.1f} Hz"),
        ("vocal tract length", f"{prof.tract_length_cm:.2f} cm"),
        ("utterance duration", f"{prof.utterance_duration_s:.2f} s"),
    ]
    width = max(len(label) for label, _ in rows)
    for label, value in rows:
        print(f"{label:<{width}}  {value}")
    return EXIT_OK


def cmd_synth(args) -> int:
    params, kind = _build_params(args)
    request = engine.RenderRequest(
        params=params,
        affect=voice.AffectState(args.valence, args.arousal),
        seed=args.seed,
        utterance_kind=kind,
    )
    buffer = engine.render_utterance(request, normalize=args.normalize)
    wavfile.write_wav(buffer, args.output)

    summary = {
        "output": args.output,
        "duration_s": round(buffer.duration, 4),
        "sample_rate": buffer.sample_rate,
        "kind": kind,
        "f0_base_hz": round(params.f0_base, 2),
    }
    if voice.TEMPLATES[kind].voiced:
        fmin = max(params.f0_base * 0.4, 40.0)
        fmax = min(params.f0_base * 4.0, buffer.sample_rate / 2 * 0.9)
        try:
            _, track = analysis.track_f0(buffer, fmin, fmax)
            if np.any(~np.isnan(track)):
                summary["f0_mean_hz"] = round(float(np.nanmean(track)), 2)
        except DomainError:
            pass
    if args.json:
        print(json.dumps(summary, sort_keys=True))
    else:
        bits = [f"wrote {summary['output']}", f"{summary['duration_s']} s"]
        if "f0_mean_hz" in summary:
            bits.append(f"mean F0 {summary['f0_mean_hz']} Hz")
        print(", ".join(bits))
    return EXIT_OK


def cmd_spectrogram(args) -> int:
    buffer = wavfile.read_wav(args.input)
    spec = analysis.spectrogram(buffer, window=args.window, hop=args.hop)
    wrote = []
    if args.output:
        analysis.export_png(spec, args.output)
        wrote.append(args.output)
    if args.csv:
        analysis.export_csv(spec, args.csv)
        wrote.append(args.csv)
    if not wrote:
        raise DomainError("nothing to do: pass -o IMAGE and/or --csv GRID")
    print("wrote " + ", ".join(wrote))
    return EXIT_OK


def cmd_breathe(args) -> int:
    params, _ = _build_params(args)
    buffer = engine.breathing_session(
        params,
        voice.AffectState(args.valence, args.arousal),
        wall_duration=args.duration,
        seed=args.seed,
        p_voc=args.p_voc,
    )
    wavfile.write_wav(buffer, args.output)
    print(f"wrote {args.output}, {buffer.duration:.2f} s")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    registry = _registry(args)
    app = create_app(presets=registry, ui_dir=args.ui_dir, seed=args.seed)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mammalvoc",
        description="Parametric mammalian vocal synthesiser",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_affect=True):
        p.add_argument("--preset", help="preset name (see voice presets)")
        p.add_argument("--mass", type=float, help="body mass in kg")
        p.add_argument(
            "--set", action="append", metavar="KEY=VALUE",
            help="parameter override, applied after the preset",
        )
        p.add_argument("--seed", type=int, default=0)
        p.add_argument(
            "--sample-rate", type=int, default=_default_sample_rate(),
            help=f"default 44100, or ${ENV_SAMPLE_RATE}",
        )
        p.add_argument("--presets", help="preset registry JSON file")
        if with_affect:
            p.add_argument("--valence", type=float, default=0.0)
            p.add_argument("--arousal", type=float, default=0.0)

    p = sub.add_parser("profile", help="print the allometric profile for a mass")
    p.add_argument("--mass", type=float, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("synth", help="render one utterance to a WAV file")
    add_common(p)
    p.add_argument("--kind", choices=sorted(voice.TEMPLATES),
                   help="utterance kind (defaults to the preset's)")
    p.add_argument("--normalize", action="store_true",
                   help="peak-normalise to -3 dBFS")
    p.add_argument("--json", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("spectrogram", help="spectrogram image/CSV of a WAV file")
    p.add_argument("input")
    p.add_argument("-o", "--output", help="greyscale PNG path")
    p.add_argument("--csv", help="CSV grid path")
    p.add_argument("--window", type=int, default=analysis.DEFAULT_WINDOW)
    p.add_argument("--hop", type=int, default=analysis.DEFAULT_HOP)
    p.set_defaults(func=cmd_spectrogram)

    p = sub.add_parser("breathe", help="render a breathing session to WAV")
    add_common(p)
    p.add_argument("--duration", type=float, default=10.0,
                   help="wall-clock session length in seconds")
    p.add_argument("--p-voc", type=float, default=engine.DEFAULT_P_VOC,
                   help="per-exhale vocalisation probability")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_breathe)

    p = sub.add_parser("serve", help="run the live voice-design service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8642)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--presets", help="preset registry JSON file")
    p.add_argument("--ui-dir", help="static UI bundle to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, UnknownPresetError, WavFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
