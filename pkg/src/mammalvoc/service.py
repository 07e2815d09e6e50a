"""Live voice-design service: JSON control messages plus binary audio
frames over one websocket, with the UI served as static files.

Protocol (version 1)
--------------------
Client -> server (JSON text frames):
    {"type": "set_param", "name": <VoiceParams field>, "value": <number|bool>}
    {"type": "set_affect", "valence": v, "arousal": a}
    {"type": "apply_preset", "name": <preset>}
    {"type": "vocalise", "kind": <utterance kind, default "voiced">}
    {"type": "get_state"}

Server -> client:
    {"type": "hello", "protocol", "session", "sample_rate", "block_size",
     "params", "affect", "ranges", "presets", "kinds"}
    {"type": "ack", "of": <client type>, "effective_sample": N, ...}
    {"type": "state", "params", "affect", "position"}
    {"type": "error", "code", "message"}
    {"type": "telemetry", "position", "f0", "mouth", "formants"}
    {"type": "gap", "dropped", "from_seq"}
    binary frames: uint32 LE sequence number + 16-bit LE PCM payload.

Every client message yields exactly one ack/state or one error, and a
rejected message leaves the session state untouched. Parameter changes
take effect at the next block boundary (the "effective_sample" of the
ack).
"""

from __future__ import annotations

import asyncio
import dataclasses
import json
import struct
import time
from collections import deque

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .engine import BLOCK_SIZE, SessionEngine
from .errors import DomainError, UnknownPresetError
from .rng import derive_seed
from .voice import (
    PARAM_RANGES,
    TEMPLATES,
    AffectState,
    VoiceParams,
    default_registry,
    resolve_preset,
)
from .wavfile import encode_pcm16

PROTOCOL_VERSION = 1
TELEMETRY_EVERY_BLOCKS = 4
# Back-pressure: at most this much rendered audio may wait for a slow
# client before the oldest frames are dropped (with a gap notice).
MAX_BUFFERED_SECONDS = 2.0

_BOOL_FIELDS = {"dual_folds_enabled"}
_INT_FIELDS = {"quantisation_steps", "sample_rate"}


class FrameBuffer:
    """Bounded FIFO of audio frames with drop-oldest overflow accounting."""

    def __init__(self, capacity: int):
        self.capacity = int(capacity)
        self._frames: deque = deque()
        self.dropped_since_notice = 0
        self.first_dropped_seq: int | None = None

    def push(self, seq: int, payload: bytes):
        if len(self._frames) >= self.capacity:
            old_seq, _ = self._frames.popleft()
            if self.dropped_since_notice == 0:
                self.first_dropped_seq = old_seq
            self.dropped_since_notice += 1
        self._frames.append((seq, payload))

    def pop(self):
        return self._frames.popleft() if self._frames else None

    def take_gap_notice(self):
        """One gap message covering everything dropped since the last one."""
        if self.dropped_since_notice == 0:
            return None
        notice = {
            "type": "gap",
            "dropped": self.dropped_since_notice,
            "from_seq": self.first_dropped_seq,
        }
        self.dropped_since_notice = 0
        self.first_dropped_seq = None
        return notice

    def __len__(self):
        return len(self._frames)


class Session:
    """One design session: parameter state plus a streaming engine.

    handle() is synchronous and runs between audio blocks, so every
    accepted change lands exactly at the next block boundary.
    """

    def __init__(self, seed: int = 0, params: VoiceParams | None = None,
                 affect: AffectState | None = None, presets=None,
                 session_id: str = "local", block_size: int = BLOCK_SIZE):
        self.params = (params or VoiceParams()).validate()
        self.affect = affect or AffectState()
        self.presets = presets if presets is not None else default_registry()
        self.engine = SessionEngine(self.params, self.affect, seed, block_size)
        self.session_id = session_id
        self.seq = 0

    # -- outgoing snapshots ------------------------------------------------

    def hello(self) -> dict:
        return {
            "type": "hello",
            "protocol": PROTOCOL_VERSION,
            "session": self.session_id,
            "sample_rate": self.engine.sample_rate,
            "block_size": self.engine.block_size,
            "params": dataclasses.asdict(self.params),
            "affect": dataclasses.asdict(self.affect),
            "ranges": {k: list(v) for k, v in PARAM_RANGES.items()},
            "presets": sorted(self.presets),
            "kinds": sorted(TEMPLATES),
        }

    def state_message(self) -> dict:
        return {
            "type": "state",
            "params": dataclasses.asdict(self.params),
            "affect": dataclasses.asdict(self.affect),
            "position": self.engine.position,
        }

    def telemetry_message(self) -> dict:
        data = self.engine.telemetry()
        data.update(type="telemetry", position=self.engine.position)
        return data

    # -- control -----------------------------------------------------------

    @staticmethod
    def _error(code: str, message: str) -> dict:
        return {"type": "error", "code": code, "message": message}

    def _ack(self, of: str, **extra) -> dict:
        ack = {"type": "ack", "of": of, "effective_sample": self.engine.position}
        ack.update(extra)
        return ack

    def handle(self, message) -> list[dict]:
        """Process one client message; exactly one reply (ack/state/error)."""
        if not isinstance(message, dict) or "type" not in message:
            return [self._error("bad_message", "expected a JSON object with 'type'")]
        kind = message["type"]
        if kind == "set_param":
            return [self._set_param(message)]
        if kind == "set_affect":
            return [self._set_affect(message)]
        if kind == "apply_preset":
            return [self._apply_preset(message)]
        if kind == "vocalise":
            return [self._vocalise(message)]
        if kind == "get_state":
            return [self.state_message()]
        return [self._error("bad_message", f"unknown message type {kind!r}")]

    def _set_param(self, message) -> dict:
        name = message.get("name")
        if not isinstance(name, str) or name not in {
            f.name for f in dataclasses.fields(VoiceParams)
        }:
            return self._error("unknown_param", f"unknown parameter {name!r}")
        if name == "sample_rate":
            return self._error(
                "out_of_range", "sample_rate is fixed for the session"
            )
        value = message.get("value")
        if isinstance(value, bool):
            if name not in _BOOL_FIELDS:
                return self._error("out_of_range", f"{name} expects a number")
        elif isinstance(value, (int, float)):
            if name in _BOOL_FIELDS:
                return self._error("out_of_range", f"{name} expects a boolean")
            value = int(value) if name in _INT_FIELDS else float(value)
            if name in _INT_FIELDS and message.get("value") != value:
                return self._error("out_of_range", f"{name} expects an integer")
        else:
            return self._error("out_of_range", f"{name} expects a number")
        candidate = dataclasses.replace(self.params, **{name: value})
        try:
            candidate.validate()
        except DomainError as exc:
            if name in PARAM_RANGES:
                lo, hi = PARAM_RANGES[name]
                return self._error(
                    "out_of_range", f"{name} must be within [{lo}, {hi}]"
                )
            return self._error("out_of_range", str(exc))
        self.params = candidate
        self.engine.set_state(self.params, self.affect)
        return self._ack("set_param", name=name, value=value)

    def _set_affect(self, message) -> dict:
        try:
            valence = float(message.get("valence", 0.0))
            arousal = float(message.get("arousal", 0.0))
        except (TypeError, ValueError):
            return self._error("bad_message", "valence/arousal must be numbers")
        self.affect = AffectState(valence, arousal)
        self.engine.set_state(self.params, self.affect)
        return self._ack(
            "set_affect", valence=self.affect.valence, arousal=self.affect.arousal
        )

    def _apply_preset(self, message) -> dict:
        name = message.get("name")
        try:
            self.params = resolve_preset(name, self.params, self.presets)
        except UnknownPresetError as exc:
            return self._error("unknown_preset", str(exc))
        except DomainError as exc:
            return self._error("out_of_range", str(exc))
        self.engine.set_state(self.params, self.affect)
        return self._ack(
            "apply_preset", name=name, params=dataclasses.asdict(self.params)
        )

    def _vocalise(self, message) -> dict:
        kind = message.get("kind", "voiced")
        if kind not in TEMPLATES:
            return self._error(
                "bad_message", f"unknown kind {kind!r}; one of {sorted(TEMPLATES)}"
            )
        try:
            stream = self.engine.vocalise(kind)
        except DomainError as exc:
            return self._error("out_of_range", str(exc))
        return self._ack("vocalise", kind=kind, duration_s=stream.duration)

    # -- audio ---------------------------------------------------------------

    def next_frame(self) -> tuple[int, bytes]:
        """Render the next block as (sequence number, PCM payload)."""
        block = self.engine.next_block()
        seq = self.seq
        self.seq += 1
        return seq, encode_pcm16(block)


def frame_bytes(seq: int, payload: bytes) -> bytes:
    return struct.pack("<I", seq) + payload


def create_app(presets=None, ui_dir=None, seed: int = 0,
               params: VoiceParams | None = None, realtime: bool = True):
    """The ASGI app: websocket endpoint at /ws, UI bundle at / when given."""
    app = FastAPI(title="mammalvoc design service")
    connection_counter = {"n": 0}

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        connection_counter["n"] += 1
        session = Session(
            seed=derive_seed(seed, connection_counter["n"]),
            params=params,
            presets=presets,
            session_id=f"s{connection_counter['n']}",
        )
        fs = session.engine.sample_rate
        block_time = session.engine.block_size / fs
        buffer = FrameBuffer(int(MAX_BUFFERED_SECONDS / block_time))
        await websocket.send_json(session.hello())

        recv_task = asyncio.create_task(websocket.receive())
        started = time.monotonic()
        blocks_done = 0
        try:
            while True:
                if realtime:
                    deadline = started + (blocks_done + 1) * block_time
                    timeout = max(deadline - time.monotonic(), 0.0)
                else:
                    timeout = 0.0
                done, _ = await asyncio.wait({recv_task}, timeout=timeout)
                if recv_task in done:
                    incoming = recv_task.result()
                    if incoming["type"] == "websocket.disconnect":
                        break
                    replies = _replies_for(session, incoming)
                    for reply in replies:
                        await websocket.send_json(reply)
                    recv_task = asyncio.create_task(websocket.receive())
                    continue

                # render everything due by now (one block when unpaced)
                due = 1
                if realtime:
                    elapsed = time.monotonic() - started
                    due = max(int(elapsed / block_time) - blocks_done, 1)
                for _ in range(due):
                    buffer.push(*session.next_frame())
                blocks_done += due

                notice = buffer.take_gap_notice()
                if notice is not None:
                    await websocket.send_json(notice)
                while True:
                    frame = buffer.pop()
                    if frame is None:
                        break
                    await websocket.send_bytes(frame_bytes(*frame))
                if session.seq % TELEMETRY_EVERY_BLOCKS == 0:
                    await websocket.send_json(session.telemetry_message())
        except WebSocketDisconnect:
            pass
        finally:
            recv_task.cancel()

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def _replies_for(session: Session, incoming: dict) -> list[dict]:
    if "text" in incoming and incoming["text"] is not None:
        try:
            message = json.loads(incoming["text"])
        except json.JSONDecodeError:
            return [Session._error("bad_message", "frame is not valid JSON")]
        return session.handle(message)
    return [Session._error("bad_message", "expected a JSON text frame")]
