/**
 * Studio entry point: one websocket to the synthesiser, sliders and pads
 * on the left, live audio out, scrolling spectrogram below.
 */

import { StreamPlayer } from "./audio.js";
import { Connection } from "./connection.js";
import { SpectrogramView } from "./spectrogram.js";
import { UiStore } from "./state.js";
import { StudioUi } from "./ui.js";

const store = new UiStore();
const root = document.getElementById("app")!;
const canvas = document.getElementById("spectrogram") as HTMLCanvasElement;

let player: StreamPlayer | null = null;
let spectrogram: SpectrogramView | null = null;
let testTone = false;
let tonePhase = 0;

const wsUrl = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`;
const connection = new Connection(wsUrl, store, {
  onAudio: (frame) => {
    let samples = frame.samples;
    if (testTone) {
      // local 1 kHz marker injected into the analysis path only
      samples = new Float32Array(samples.length);
      const step = (2 * Math.PI * 1000) / store.sampleRate;
      for (let i = 0; i < samples.length; i++) {
        samples[i] = frame.samples[i] + 0.3 * Math.sin(tonePhase);
        tonePhase += step;
      }
      tonePhase %= 2 * Math.PI;
    }
    player?.push(frame.samples);
    spectrogram?.pushSamples(samples, store.sampleRate);
  },
  onError: (message) => ui.toast(message),
});

const ui = new StudioUi(root, store, connection, {
  onVocalise: (kind) => connection.send({ type: "vocalise", kind }),
  onTestTone: (enabled) => (testTone = enabled),
});

store.subscribe(() => {
  if (!spectrogram && store.sampleRate) {
    spectrogram = new SpectrogramView(canvas);
  }
});

const audioButton = document.getElementById("enable-audio") as HTMLButtonElement;
audioButton.addEventListener("click", async () => {
  player = player ?? new StreamPlayer(store.sampleRate);
  await player.unlock();
  audioButton.textContent = "audio running";
  audioButton.disabled = true;
});

setInterval(() => spectrogram?.checkStall(), 250);
connection.open();
