/**
 * Wire protocol (version 1) shared with the synthesiser service.
 *
 * Control messages are JSON text frames; audio arrives as binary frames
 * of a uint32 little-endian sequence number followed by 16-bit LE PCM.
 */

export const PROTOCOL_VERSION = 1;

export type ParamValue = number | boolean;

export interface HelloMessage {
  type: "hello";
  protocol: number;
  session: string;
  sample_rate: number;
  block_size: number;
  params: Record<string, ParamValue>;
  affect: { valence: number; arousal: number };
  ranges: Record<string, [number, number]>;
  presets: string[];
  kinds: string[];
}

export interface AckMessage {
  type: "ack";
  of: string;
  effective_sample: number;
  name?: string;
  value?: ParamValue;
  valence?: number;
  arousal?: number;
  params?: Record<string, ParamValue>;
  kind?: string;
  duration_s?: number;
}

export interface StateMessage {
  type: "state";
  params: Record<string, ParamValue>;
  affect: { valence: number; arousal: number };
  position: number;
}

export interface ErrorMessage {
  type: "error";
  code: string;
  message: string;
}

export interface TelemetryMessage {
  type: "telemetry";
  position: number;
  f0: number | null;
  mouth: number;
  formants: number[];
}

export interface GapMessage {
  type: "gap";
  dropped: number;
  from_seq: number;
}

export type ServerMessage =
  | HelloMessage
  | AckMessage
  | StateMessage
  | ErrorMessage
  | TelemetryMessage
  | GapMessage;

export type ClientMessage =
  | { type: "set_param"; name: string; value: ParamValue }
  | { type: "set_affect"; valence: number; arousal: number }
  | { type: "apply_preset"; name: string }
  | { type: "vocalise"; kind?: string }
  | { type: "get_state" };

const SERVER_TYPES = new Set([
  "hello", "ack", "state", "error", "telemetry", "gap",
]);

/** Parse a JSON text frame; null for anything that is not a known message. */
export function parseServerMessage(text: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const type = (data as { type?: unknown }).type;
  if (typeof type !== "string" || !SERVER_TYPES.has(type)) return null;
  return data as ServerMessage;
}

export function serialize(message: ClientMessage): string {
  return JSON.stringify(message);
}

export interface AudioFrame {
  seq: number;
  /** samples scaled to [-1, 1] */
  samples: Float32Array;
}

/** Decode one binary audio frame. */
export function decodeAudioFrame(buffer: ArrayBuffer): AudioFrame {
  if (buffer.byteLength < 4 || (buffer.byteLength - 4) % 2 !== 0) {
    throw new Error(`malformed audio frame of ${buffer.byteLength} bytes`);
  }
  const view = new DataView(buffer);
  const seq = view.getUint32(0, true);
  const count = (buffer.byteLength - 4) / 2;
  const samples = new Float32Array(count);
  for (let i = 0; i < count; i++) {
    samples[i] = view.getInt16(4 + 2 * i, true) / 32767;
  }
  return { seq, samples };
}
