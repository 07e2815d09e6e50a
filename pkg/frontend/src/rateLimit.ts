/**
 * Drag coalescing: during a continuous slider drag only the most recent
 * value matters, and the server should see at most ~30 messages per
 * second per parameter. Intermediate values are dropped, the trailing
 * value is always delivered.
 */

export const MIN_SEND_INTERVAL_MS = 34; // just under 30 msg/s

type Sender = (name: string, value: number | boolean) => void;

export class DragCoalescer {
  private lastSent = new Map<string, number>();
  private queued = new Map<string, number | boolean>();
  private timers = new Map<string, ReturnType<typeof setTimeout>>();

  constructor(
    private send: Sender,
    private intervalMs: number = MIN_SEND_INTERVAL_MS,
    private now: () => number = () => Date.now(),
  ) {}

  update(name: string, value: number | boolean): void {
    const elapsed = this.now() - (this.lastSent.get(name) ?? -Infinity);
    if (elapsed >= this.intervalMs) {
      this.deliver(name, value);
      return;
    }
    // coalesce: remember only the newest value, schedule one trailing send
    this.queued.set(name, value);
    if (!this.timers.has(name)) {
      this.timers.set(
        name,
        setTimeout(() => this.flush(name), this.intervalMs - elapsed),
      );
    }
  }

  private flush(name: string): void {
    this.timers.delete(name);
    const value = this.queued.get(name);
    if (value !== undefined) {
      this.queued.delete(name);
      this.deliver(name, value);
    }
  }

  private deliver(name: string, value: number | boolean): void {
    this.lastSent.set(name, this.now());
    this.send(name, value);
  }

  /** Cancel timers (e.g. on disconnect); queued values are dropped. */
  dispose(): void {
    for (const timer of this.timers.values()) clearTimeout(timer);
    this.timers.clear();
    this.queued.clear();
  }
}
