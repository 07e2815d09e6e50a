/**
 * WebSocket wrapper: dispatches server messages into the store, exposes a
 * typed send, and reconnects with backoff. After a reconnect a single
 * get_state round trip restores the full mirrored state.
 */

import type { AudioFrame, ClientMessage, ServerMessage } from "./protocol.js";
import { decodeAudioFrame, parseServerMessage, serialize } from "./protocol.js";
import type { UiStore } from "./state.js";

export interface ConnectionHandlers {
  onAudio?: (frame: AudioFrame) => void;
  onMessage?: (message: ServerMessage) => void;
  onError?: (message: string) => void;
}

/** Route one server message into the store; returns the parsed message. */
export function dispatchMessage(
  store: UiStore,
  message: ServerMessage,
  handlers: ConnectionHandlers = {},
): void {
  switch (message.type) {
    case "hello":
      store.applyHello(message);
      break;
    case "state":
      store.applyState(message);
      break;
    case "ack":
      store.applyAck(message);
      break;
    case "error":
      // a rejected edit snaps the control back to the acknowledged value
      store.rejectEdit(extractParamName(message.message));
      handlers.onError?.(message.message);
      break;
    default:
      break;
  }
  handlers.onMessage?.(message);
}

function extractParamName(errorMessage: string): string | undefined {
  // service errors lead with the parameter name ("f0_base must be ...")
  const match = /^([a-z0-9_]+)\s/.exec(errorMessage);
  return match?.[1];
}

export class Connection {
  private socket: WebSocket | null = null;
  private retryMs = 500;
  private closedByUs = false;
  private everConnected = false;

  constructor(
    private url: string,
    private store: UiStore,
    private handlers: ConnectionHandlers = {},
  ) {}

  open(): void {
    this.closedByUs = false;
    this.store.setStatus("connecting");
    const socket = new WebSocket(this.url);
    socket.binaryType = "arraybuffer";
    this.socket = socket;

    socket.onopen = () => {
      this.retryMs = 500;
      this.store.setStatus("open");
      if (this.everConnected) {
        // one round trip restores everything the UI mirrors
        this.send({ type: "get_state" });
      }
      this.everConnected = true;
    };
    socket.onmessage = (event: MessageEvent) => {
      if (typeof event.data === "string") {
        const message = parseServerMessage(event.data);
        if (message) dispatchMessage(this.store, message, this.handlers);
      } else {
        this.handlers.onAudio?.(decodeAudioFrame(event.data as ArrayBuffer));
      }
    };
    socket.onclose = () => {
      this.store.setStatus("closed");
      if (!this.closedByUs) {
        setTimeout(() => this.open(), this.retryMs);
        this.retryMs = Math.min(this.retryMs * 2, 8000);
      }
    };
  }

  send(message: ClientMessage): boolean {
    if (this.socket?.readyState === WebSocket.OPEN) {
      this.socket.send(serialize(message));
      return true;
    }
    return false;
  }

  close(): void {
    this.closedByUs = true;
    this.socket?.close();
  }
}
