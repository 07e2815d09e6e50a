/**
 * UI state store.
 *
 * The committed values always mirror the last server-acknowledged state;
 * optimistic slider edits live in a separate pending layer that is shown
 * with a "pending" marker and never promoted without an ack. A rejected
 * edit snaps back simply by dropping its pending entry.
 */

import type {
  AckMessage,
  HelloMessage,
  ParamValue,
  StateMessage,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "open" | "closed";

export interface DisplayedParam {
  value: ParamValue;
  pending: boolean;
}

export class UiStore {
  status: ConnectionStatus = "connecting";
  params: Record<string, ParamValue> = {};
  affect = { valence: 0, arousal: 0 };
  ranges: Record<string, [number, number]> = {};
  presets: string[] = [];
  kinds: string[] = [];
  sampleRate = 44100;
  blockSize = 256;
  position = 0;

  private pending = new Map<string, ParamValue>();
  private listeners = new Set<() => void>();

  subscribe(listener: () => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  setStatus(status: ConnectionStatus): void {
    this.status = status;
    if (status !== "open") this.pending.clear();
    this.notify();
  }

  /** What a control should show: pending edit if any, else committed. */
  displayed(name: string): DisplayedParam {
    if (this.pending.has(name)) {
      return { value: this.pending.get(name)!, pending: true };
    }
    return { value: this.params[name], pending: false };
  }

  displayedSnapshot(): Record<string, ParamValue> {
    const out: Record<string, ParamValue> = { ...this.params };
    for (const [name, value] of this.pending) out[name] = value;
    return out;
  }

  hasPending(name: string): boolean {
    return this.pending.has(name);
  }

  /** An optimistic local edit, awaiting the server's verdict. */
  beginEdit(name: string, value: ParamValue): void {
    this.pending.set(name, value);
    this.notify();
  }

  applyHello(hello: HelloMessage): void {
    this.params = { ...hello.params };
    this.affect = { ...hello.affect };
    this.ranges = { ...hello.ranges };
    this.presets = [...hello.presets];
    this.kinds = [...hello.kinds];
    this.sampleRate = hello.sample_rate;
    this.blockSize = hello.block_size;
    this.pending.clear();
    this.notify();
  }

  /** Full snapshot refresh (get_state reply); clears every pending edit. */
  applyState(state: StateMessage): void {
    this.params = { ...state.params };
    this.affect = { ...state.affect };
    this.position = state.position;
    this.pending.clear();
    this.notify();
  }

  applyAck(ack: AckMessage): void {
    if (ack.of === "set_param" && ack.name !== undefined) {
      this.params[ack.name] = ack.value as ParamValue;
      // only clear the pending edit it answered; a newer drag value may
      // still be in flight
      if (this.pending.get(ack.name) === ack.value) {
        this.pending.delete(ack.name);
      }
    } else if (ack.of === "apply_preset" && ack.params) {
      // every slider moves to the preset's returned positions
      this.params = { ...ack.params };
      this.pending.clear();
    } else if (ack.of === "set_affect") {
      this.affect = {
        valence: ack.valence ?? this.affect.valence,
        arousal: ack.arousal ?? this.affect.arousal,
      };
    }
    this.position = ack.effective_sample;
    this.notify();
  }

  /** A rejected edit: drop the optimistic value so the control snaps back. */
  rejectEdit(name?: string): void {
    if (name !== undefined) {
      this.pending.delete(name);
    } else {
      this.pending.clear();
    }
    this.notify();
  }
}
