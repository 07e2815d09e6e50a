/**
 * Live playback of the streamed PCM frames through Web Audio.
 *
 * Frames are queued into a small jitter buffer; playback begins once four
 * frames are waiting and each buffer is scheduled back to back on the
 * audio clock, so UI jank never gaps the sound.
 */

const JITTER_FRAMES = 4;

export class StreamPlayer {
  private context: AudioContext | null = null;
  private nextStartTime = 0;
  private queue: Float32Array[] = [];
  private primed = false;

  constructor(private sampleRate: number) {}

  /** Browsers require a user gesture before audio can start. */
  async unlock(): Promise<void> {
    if (!this.context) {
      this.context = new AudioContext({ sampleRate: this.sampleRate });
    }
    if (this.context.state === "suspended") {
      await this.context.resume();
    }
  }

  get running(): boolean {
    return this.context !== null && this.context.state === "running";
  }

  push(samples: Float32Array): void {
    if (!this.running) return;
    this.queue.push(samples);
    if (!this.primed && this.queue.length < JITTER_FRAMES) return;
    this.primed = true;
    while (this.queue.length > 0) {
      this.schedule(this.queue.shift()!);
    }
  }

  private schedule(samples: Float32Array): void {
    const context = this.context!;
    const buffer = context.createBuffer(1, samples.length, this.sampleRate);
    // fresh copy pins the backing store to a plain ArrayBuffer
    buffer.copyToChannel(new Float32Array(samples), 0);
    const source = context.createBufferSource();
    source.buffer = buffer;
    source.connect(context.destination);
    if (this.nextStartTime < context.currentTime) {
      // underran: restart slightly ahead and let the jitter buffer refill
      this.nextStartTime = context.currentTime + 0.02;
      this.primed = false;
    }
    source.start(this.nextStartTime);
    this.nextStartTime += buffer.duration;
  }
}
