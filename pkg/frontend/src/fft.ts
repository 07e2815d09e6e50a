/**
 * Small iterative radix-2 FFT, enough for a scrolling spectrogram
 * computed client-side from the PCM stream.
 */

/** In-place complex FFT; re and im must have the same power-of-two length. */
export function fft(re: Float64Array, im: Float64Array): void {
  const n = re.length;
  if (n === 0 || (n & (n - 1)) !== 0) {
    throw new Error(`FFT size must be a power of two, got ${n}`);
  }
  // bit-reversal permutation
  for (let i = 1, j = 0; i < n; i++) {
    let bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      [re[i], re[j]] = [re[j], re[i]];
      [im[i], im[j]] = [im[j], im[i]];
    }
  }
  for (let len = 2; len <= n; len <<= 1) {
    const angle = (-2 * Math.PI) / len;
    const wRe = Math.cos(angle);
    const wIm = Math.sin(angle);
    for (let i = 0; i < n; i += len) {
      let curRe = 1;
      let curIm = 0;
      for (let k = 0; k < len / 2; k++) {
        const a = i + k;
        const b = i + k + len / 2;
        const tRe = re[b] * curRe - im[b] * curIm;
        const tIm = re[b] * curIm + im[b] * curRe;
        re[b] = re[a] - tRe;
        im[b] = im[a] - tIm;
        re[a] += tRe;
        im[a] += tIm;
        const nextRe = curRe * wRe - curIm * wIm;
        curIm = curRe * wIm + curIm * wRe;
        curRe = nextRe;
      }
    }
  }
}

export function hannWindow(size: number): Float64Array {
  const win = new Float64Array(size);
  for (let i = 0; i < size; i++) {
    win[i] = 0.5 - 0.5 * Math.cos((2 * Math.PI * i) / size);
  }
  return win;
}

/**
 * Hann-windowed magnitude spectrum in dB for one analysis frame,
 * normalised so a full-scale sine reads ~0 dB. Returns size/2+1 bins.
 */
export function magnitudeDb(
  samples: Float32Array | Float64Array,
  window: Float64Array,
  floorDb = -100,
): Float64Array {
  const n = window.length;
  const re = new Float64Array(n);
  const im = new Float64Array(n);
  const count = Math.min(samples.length, n);
  for (let i = 0; i < count; i++) re[i] = samples[i] * window[i];
  fft(re, im);
  let windowSum = 0;
  for (let i = 0; i < n; i++) windowSum += window[i];
  const scale = 2 / windowSum;
  const out = new Float64Array(n / 2 + 1);
  const floor = Math.pow(10, floorDb / 20);
  for (let k = 0; k <= n / 2; k++) {
    const mag = Math.hypot(re[k], im[k]) * scale;
    out[k] = 20 * Math.log10(Math.max(mag, floor));
  }
  return out;
}
