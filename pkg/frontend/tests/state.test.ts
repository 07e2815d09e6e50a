import { describe, expect, it } from "vitest";

import type { AckMessage, HelloMessage, StateMessage } from "../src/protocol.js";
import { UiStore } from "../src/state.js";

const hello: HelloMessage = {
  type: "hello",
  protocol: 1,
  session: "s1",
  sample_rate: 44100,
  block_size: 256,
  params: { f0_base: 1000, mass: 1, dual_folds_enabled: false },
  affect: { valence: 0, arousal: 0 },
  ranges: { f0_base: [10, 8000], mass: [0.01, 10000] },
  presets: ["miro", "cow"],
  kinds: ["voiced", "breath"],
};

function freshStore(): UiStore {
  const store = new UiStore();
  store.applyHello(hello);
  return store;
}

describe("UiStore", () => {
  it("mirrors the hello snapshot", () => {
    const store = freshStore();
    expect(store.displayed("f0_base")).toEqual({ value: 1000, pending: false });
    expect(store.presets).toEqual(["miro", "cow"]);
  });

  it("never shows an unacknowledged value as committed", () => {
    const store = freshStore();
    store.beginEdit("f0_base", 500);
    const shown = store.displayed("f0_base");
    expect(shown.value).toBe(500);
    expect(shown.pending).toBe(true);
    // the committed layer is untouched until the ack arrives
    expect(store.params.f0_base).toBe(1000);
  });

  it("commits on ack and clears the matching pending edit", () => {
    const store = freshStore();
    store.beginEdit("f0_base", 500);
    const ack: AckMessage = {
      type: "ack", of: "set_param", effective_sample: 512,
      name: "f0_base", value: 500,
    };
    store.applyAck(ack);
    expect(store.displayed("f0_base")).toEqual({ value: 500, pending: false });
    expect(store.position).toBe(512);
  });

  it("keeps a newer in-flight edit pending when an older ack lands", () => {
    const store = freshStore();
    store.beginEdit("f0_base", 500);
    store.beginEdit("f0_base", 600); // user kept dragging
    store.applyAck({
      type: "ack", of: "set_param", effective_sample: 256,
      name: "f0_base", value: 500,
    });
    const shown = store.displayed("f0_base");
    expect(shown).toEqual({ value: 600, pending: true });
  });

  it("snaps back on a rejected edit", () => {
    const store = freshStore();
    store.beginEdit("f0_base", 99999);
    store.rejectEdit("f0_base");
    expect(store.displayed("f0_base")).toEqual({ value: 1000, pending: false });
  });

  it("preset ack moves every slider to the returned positions", () => {
    const store = freshStore();
    store.beginEdit("f0_base", 123);
    const ack: AckMessage = {
      type: "ack", of: "apply_preset", effective_sample: 1024, name: "miro",
      params: { f0_base: 757.86, mass: 2, dual_folds_enabled: false },
    };
    store.applyAck(ack);
    expect(store.displayedSnapshot()).toEqual(ack.params);
    expect(store.hasPending("f0_base")).toBe(false);
  });

  it("reconnection restores state from one get_state round trip", () => {
    const store = freshStore();
    store.beginEdit("f0_base", 444);
    store.setStatus("closed");
    store.setStatus("open");
    const snapshot: StateMessage = {
      type: "state",
      params: { f0_base: 757.86, mass: 2, dual_folds_enabled: true },
      affect: { valence: 0.5, arousal: -0.25 },
      position: 4096,
    };
    store.applyState(snapshot);
    // displayed values equal the server snapshot exactly
    expect(store.displayedSnapshot()).toEqual(snapshot.params);
    expect(store.affect).toEqual(snapshot.affect);
    expect(store.position).toBe(4096);
  });

  it("drops pending edits when the connection drops mid-drag", () => {
    const store = freshStore();
    store.beginEdit("f0_base", 500);
    store.setStatus("closed");
    expect(store.displayed("f0_base")).toEqual({ value: 1000, pending: false });
  });
});
