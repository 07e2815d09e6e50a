/**
 * Scrolling spectrogram fed by the live PCM stream. Columns are computed
 * client-side (one FFT per hop) so the display exercises the audio path
 * end to end; at the default 1024-sample hop that is ~43 columns/s at
 * 44.1 kHz.
 */

import { hannWindow, magnitudeDb } from "./fft.js";

export const FFT_SIZE = 1024;
export const HOP = 1024;
const CEIL_DB = 0;
const FLOOR_DB = -80;

/** Accumulates samples and emits one dB column per hop. */
export class ColumnBuilder {
  private window = hannWindow(FFT_SIZE);
  private buffer = new Float32Array(0);

  push(samples: Float32Array): Float64Array[] {
    const joined = new Float32Array(this.buffer.length + samples.length);
    joined.set(this.buffer);
    joined.set(samples, this.buffer.length);
    const columns: Float64Array[] = [];
    let offset = 0;
    while (joined.length - offset >= FFT_SIZE) {
      columns.push(magnitudeDb(joined.subarray(offset, offset + FFT_SIZE), this.window));
      offset += HOP;
    }
    this.buffer = joined.slice(offset);
    return columns;
  }
}

export class SpectrogramView {
  private ctx: CanvasRenderingContext2D;
  private builder = new ColumnBuilder();
  private stalled = false;
  private lastColumnAt = 0;

  constructor(private canvas: HTMLCanvasElement, private maxHz = 10000) {
    this.ctx = canvas.getContext("2d")!;
    this.ctx.fillStyle = "#10141a";
    this.ctx.fillRect(0, 0, canvas.width, canvas.height);
  }

  pushSamples(samples: Float32Array, sampleRate: number): void {
    for (const column of this.builder.push(samples)) {
      this.drawColumn(column, sampleRate);
    }
  }

  private drawColumn(column: Float64Array, sampleRate: number): void {
    const { width, height } = this.canvas;
    // scroll left by one pixel column
    this.ctx.drawImage(this.canvas, 1, 0, width - 1, height, 0, 0, width - 1, height);
    const image = this.ctx.createImageData(1, height);
    const maxBin = Math.min(
      column.length - 1,
      Math.floor((this.maxHz / (sampleRate / 2)) * (column.length - 1)),
    );
    for (let y = 0; y < height; y++) {
      const bin = Math.round(((height - 1 - y) / (height - 1)) * maxBin);
      const level = (column[bin] - FLOOR_DB) / (CEIL_DB - FLOOR_DB);
      const v = Math.max(0, Math.min(1, level));
      const idx = y * 4;
      // dark background, warm highlights
      image.data[idx] = 16 + 239 * v;
      image.data[idx + 1] = 20 + 160 * v * v;
      image.data[idx + 2] = 26 + 60 * v * v;
      image.data[idx + 3] = 255;
    }
    this.ctx.putImageData(image, width - 1, 0);
    this.lastColumnAt = performance.now();
    if (this.stalled) this.setStalled(false);
  }

  /** Freeze indicator when the stream stops feeding columns. */
  checkStall(): void {
    const stalled = performance.now() - this.lastColumnAt > 500;
    if (stalled !== this.stalled) this.setStalled(stalled);
  }

  private setStalled(stalled: boolean): void {
    this.stalled = stalled;
    this.canvas.classList.toggle("stalled", stalled);
  }
}
