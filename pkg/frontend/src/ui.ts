/**
 * DOM construction: sliders for every synth parameter, preset buttons,
 * the valence/arousal pad, vocalise buttons, toasts, and wiring back to
 * the connection. Controls always display the last acknowledged value;
 * in-flight edits are marked pending until the server answers.
 */

import type { Connection } from "./connection.js";
import type { ParamValue } from "./protocol.js";
import { DragCoalescer } from "./rateLimit.js";
import type { UiStore } from "./state.js";

interface SliderSpec {
  name: string;
  label: string;
  step: number;
  integer?: boolean;
}

// Display order mirrors the signal path: body, source, tract, timing.
const SLIDERS: SliderSpec[] = [
  { name: "mass", label: "body mass (kg)", step: 0.1 },
  { name: "f0_base", label: "pitch base (Hz)", step: 1 },
  { name: "f0_excursion", label: "pitch excursion", step: 0.01 },
  { name: "voice_quality", label: "voice quality", step: 0.01 },
  { name: "aspiration", label: "aspiration", step: 0.01 },
  { name: "quantisation_steps", label: "pitch quantisation", step: 1, integer: true },
  { name: "fold_detune", label: "fold detune (Hz)", step: 1 },
  { name: "tract_length", label: "tract length (cm)", step: 0.1 },
  { name: "mouth_open_base", label: "mouth base", step: 0.01 },
  { name: "mouth_open_depth", label: "mouth depth", step: 0.01 },
  { name: "syllabic_rate", label: "syllabic rate (Hz)", step: 0.1 },
  { name: "uvula_rate", label: "uvula rate (Hz)", step: 0.5 },
  { name: "uvula_depth", label: "uvula depth", step: 0.01 },
  { name: "airflow_scale", label: "airflow scale", step: 0.05 },
];

export interface UiCallbacks {
  onVocalise: (kind: string) => void;
  onTestTone: (enabled: boolean) => void;
}

export class StudioUi {
  private coalescer: DragCoalescer;
  private sliderInputs = new Map<string, HTMLInputElement>();
  private sliderReadouts = new Map<string, HTMLElement>();
  private dualFoldsBox: HTMLInputElement | null = null;
  private padDot: HTMLElement | null = null;
  private toasts: HTMLElement;
  private controlsForm: HTMLFieldSetElement;

  constructor(
    private root: HTMLElement,
    private store: UiStore,
    private connection: Connection,
    private callbacks: UiCallbacks,
  ) {
    this.coalescer = new DragCoalescer((name, value) => {
      this.connection.send({ type: "set_param", name, value });
    });
    this.toasts = document.createElement("div");
    this.toasts.className = "toasts";
    this.controlsForm = document.createElement("fieldset");
    this.controlsForm.className = "controls";
    this.build();
    store.subscribe(() => this.refresh());
  }

  toast(message: string): void {
    const el = document.createElement("div");
    el.className = "toast";
    el.textContent = message;
    this.toasts.appendChild(el);
    setTimeout(() => el.remove(), 4000);
  }

  private build(): void {
    const status = document.createElement("div");
    status.id = "status";
    this.root.appendChild(status);

    const presets = document.createElement("div");
    presets.id = "presets";
    this.root.appendChild(presets);

    const columns = document.createElement("div");
    columns.className = "columns";
    this.root.appendChild(columns);

    const sliderPane = document.createElement("div");
    sliderPane.className = "pane";
    this.controlsForm.append(...SLIDERS.map((spec) => this.buildSlider(spec)));
    this.controlsForm.appendChild(this.buildDualFolds());
    sliderPane.appendChild(this.controlsForm);
    columns.appendChild(sliderPane);

    const rightPane = document.createElement("div");
    rightPane.className = "pane";
    rightPane.appendChild(this.buildAffectPad());
    rightPane.appendChild(this.buildVocaliseRow());
    columns.appendChild(rightPane);

    this.root.appendChild(this.toasts);
  }

  private buildSlider(spec: SliderSpec): HTMLElement {
    const row = document.createElement("label");
    row.className = "slider-row";
    const text = document.createElement("span");
    text.textContent = spec.label;
    const input = document.createElement("input");
    input.type = "range";
    input.step = String(spec.step);
    input.dataset.param = spec.name;
    const readout = document.createElement("span");
    readout.className = "readout";
    input.addEventListener("input", () => {
      const value = spec.integer ? parseInt(input.value, 10) : parseFloat(input.value);
      this.store.beginEdit(spec.name, value);
      this.coalescer.update(spec.name, value);
    });
    row.append(text, input, readout);
    this.sliderInputs.set(spec.name, input);
    this.sliderReadouts.set(spec.name, readout);
    return row;
  }

  private buildDualFolds(): HTMLElement {
    const row = document.createElement("label");
    row.className = "slider-row checkbox-row";
    const text = document.createElement("span");
    text.textContent = "dual vocal folds";
    const box = document.createElement("input");
    box.type = "checkbox";
    box.addEventListener("change", () => {
      this.store.beginEdit("dual_folds_enabled", box.checked);
      this.connection.send({
        type: "set_param", name: "dual_folds_enabled", value: box.checked,
      });
    });
    this.dualFoldsBox = box;
    row.append(text, box);
    return row;
  }

  private buildAffectPad(): HTMLElement {
    const wrap = document.createElement("div");
    wrap.id = "affect";
    const title = document.createElement("div");
    title.textContent = "affect (x: valence, y: arousal)";
    const pad = document.createElement("div");
    pad.id = "affect-pad";
    const dot = document.createElement("div");
    dot.id = "affect-dot";
    pad.appendChild(dot);
    this.padDot = dot;

    const sendFromPointer = (event: PointerEvent) => {
      const rect = pad.getBoundingClientRect();
      const valence = ((event.clientX - rect.left) / rect.width) * 2 - 1;
      const arousal = 1 - ((event.clientY - rect.top) / rect.height) * 2;
      this.connection.send({
        type: "set_affect",
        valence: Math.max(-1, Math.min(1, valence)),
        arousal: Math.max(-1, Math.min(1, arousal)),
      });
    };
    let dragging = false;
    pad.addEventListener("pointerdown", (event) => {
      dragging = true;
      pad.setPointerCapture(event.pointerId);
      sendFromPointer(event);
    });
    pad.addEventListener("pointermove", (event) => {
      if (dragging) sendFromPointer(event);
    });
    pad.addEventListener("pointerup", () => (dragging = false));
    pad.addEventListener("dblclick", () => {
      this.connection.send({ type: "set_affect", valence: 0, arousal: 0 });
    });
    wrap.append(title, pad);
    return wrap;
  }

  private buildVocaliseRow(): HTMLElement {
    const wrap = document.createElement("div");
    wrap.id = "vocalise";
    const main = document.createElement("button");
    main.id = "vocalise-main";
    main.textContent = "vocalise";
    main.addEventListener("click", () => this.callbacks.onVocalise("voiced"));
    wrap.appendChild(main);
    const kindRow = document.createElement("div");
    kindRow.id = "kinds";
    wrap.appendChild(kindRow);

    const tone = document.createElement("button");
    tone.id = "test-tone";
    tone.textContent = "1 kHz test tone";
    let on = false;
    tone.addEventListener("click", () => {
      on = !on;
      tone.classList.toggle("active", on);
      this.callbacks.onTestTone(on);
    });
    wrap.appendChild(tone);
    return wrap;
  }

  /** Reflect the store into the DOM (values, markers, enablement). */
  refresh(): void {
    const status = this.root.querySelector("#status")!;
    status.textContent = this.store.status;
    status.className = this.store.status;
    this.controlsForm.disabled = this.store.status !== "open";

    const presets = this.root.querySelector("#presets")!;
    if (presets.childElementCount !== this.store.presets.length) {
      presets.replaceChildren(
        ...this.store.presets.map((name) => {
          const button = document.createElement("button");
          button.textContent = name;
          button.addEventListener("click", () => {
            this.connection.send({ type: "apply_preset", name });
          });
          return button;
        }),
      );
    }
    const kinds = this.root.querySelector("#kinds");
    if (kinds && kinds.childElementCount !== this.store.kinds.length) {
      kinds.replaceChildren(
        ...this.store.kinds.map((kind) => {
          const button = document.createElement("button");
          button.textContent = kind;
          button.addEventListener("click", () => this.callbacks.onVocalise(kind));
          return button;
        }),
      );
    }

    for (const spec of SLIDERS) {
      const input = this.sliderInputs.get(spec.name)!;
      const readout = this.sliderReadouts.get(spec.name)!;
      const range = this.store.ranges[spec.name];
      if (range) {
        input.min = String(range[0]);
        input.max = String(range[1]);
      }
      const shown = this.store.displayed(spec.name);
      if (shown.value !== undefined && document.activeElement !== input) {
        input.value = String(shown.value);
      }
      readout.textContent = formatValue(shown.value);
      input.parentElement!.classList.toggle("pending", shown.pending);
    }
    if (this.dualFoldsBox) {
      const shown = this.store.displayed("dual_folds_enabled");
      this.dualFoldsBox.checked = Boolean(shown.value);
      this.dualFoldsBox.parentElement!.classList.toggle("pending", shown.pending);
    }
    if (this.padDot) {
      const { valence, arousal } = this.store.affect;
      this.padDot.style.left = `${((valence + 1) / 2) * 100}%`;
      this.padDot.style.top = `${((1 - arousal) / 2) * 100}%`;
    }
  }
}

function formatValue(value: ParamValue | undefined): string {
  if (value === undefined) return "";
  if (typeof value === "boolean") return value ? "on" : "off";
  return Number.isInteger(value) ? String(value) : value.toFixed(2);
}
