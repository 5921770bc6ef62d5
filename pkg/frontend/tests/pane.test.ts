import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { GatewayClient } from "../src/api";
import { TranslatePane } from "../src/pane";
import { RecordingView } from "./recordingView";
import { StubGateway } from "./stubGateway";

function setup(options: { consent?: boolean; debounceMs?: number } = {}) {
  const stub = new StubGateway();
  const client = new GatewayClient("http://gateway.test", stub.fetch);
  const view = new RecordingView();
  const pane = new TranslatePane(client, view, {
    debounceMs: options.debounceMs ?? 300,
    direction: { src: "cs", tgt: "uk" },
    getConsent: () => options.consent ?? false,
  });
  return { stub, view, pane };
}

describe("debounce", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("emits exactly one request per settled input", async () => {
    const { stub, pane } = setup();
    pane.onInput("a");
    await vi.advanceTimersByTimeAsync(100);
    pane.onInput("ab");
    await vi.advanceTimersByTimeAsync(100);
    pane.onInput("abc");
    await vi.advanceTimersByTimeAsync(300);
    expect(stub.requests.length).toBe(1);
    expect(stub.requests[0].texts).toEqual(["abc"]);
  });

  it("empty input clears panes and sends nothing", async () => {
    const { stub, view, pane } = setup();
    pane.onInput("abc");
    await vi.advanceTimersByTimeAsync(300);
    expect(view.translation).toBe("UK<abc>");
    pane.onInput("");
    await vi.advanceTimersByTimeAsync(1000);
    expect(view.translation).toBe("");
    expect(stub.requests.length).toBe(1);
  });

  it("separate settled inputs each translate", async () => {
    const { stub, pane } = setup();
    pane.onInput("první");
    await vi.advanceTimersByTimeAsync(300);
    pane.onInput("druhý");
    await vi.advanceTimersByTimeAsync(300);
    expect(stub.requests.map((r) => r.texts[0])).toEqual(["první", "druhý"]);
  });
});

describe("stale responses", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("never renders an older response over a newer one", async () => {
    const { stub, view, pane } = setup();
    stub.mode = "deferred";
    pane.onInput("starý");
    await vi.advanceTimersByTimeAsync(300);
    pane.onInput("nový");
    await vi.advanceTimersByTimeAsync(300);
    expect(stub.deferred.length).toBe(2);
    // answer the newer request first, then the older one
    stub.deferred[1].resolve();
    await vi.runAllTimersAsync();
    expect(view.translation).toBe("UK<nový>");
    stub.deferred[0].resolve();
    await vi.runAllTimersAsync();
    expect(view.translation).toBe("UK<nový>");
    expect(view.renderedTranslations).not.toContain("UK<starý>");
  });

  it("never renders a translation for input the pane no longer shows", async () => {
    const { stub, view, pane } = setup();
    stub.mode = "deferred";
    pane.onInput("zastaralé");
    await vi.advanceTimersByTimeAsync(300);
    pane.onInput("čerstvé");  // typing continues while request is in flight
    stub.deferred[0].resolve();
    await vi.runAllTimersAsync();
    expect(view.renderedTranslations).not.toContain("UK<zastaralé>");
    await vi.advanceTimersByTimeAsync(300);
    stub.deferred[1].resolve();
    await vi.runAllTimersAsync();
    expect(view.translation).toBe("UK<čerstvé>");
  });

  it("gateway errors surface as a banner and keep the input", async () => {
    const { view, pane, stub } = setup();
    stub.mode = "fail";
    pane.onInput("selhání");
    await vi.advanceTimersByTimeAsync(300);
    await vi.runAllTimersAsync();
    expect(view.error).not.toBeNull();
    expect(pane.snapshot().input).toBe("selhání");
  });
});

describe("swap", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("exchanges contents, reverses direction, and swap-twice restores state", async () => {
    const { view, pane } = setup();
    pane.onInput("Dobrý den");
    await vi.advanceTimersByTimeAsync(300);
    await vi.runAllTimersAsync();
    const before = pane.snapshot();
    expect(before.direction).toEqual({ src: "cs", tgt: "uk" });
    expect(before.translation).toBe("UK<Dobrý den>");

    pane.swap();
    const swapped = pane.snapshot();
    expect(swapped.direction).toEqual({ src: "uk", tgt: "cs" });
    expect(swapped.input).toBe("UK<Dobrý den>");
    expect(swapped.translation).toBe("Dobrý den");
    expect(view.input).toBe("UK<Dobrý den>");

    pane.swap();
    expect(pane.snapshot()).toEqual(before);
  });
});

describe("transliteration lines", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("renders gateway-provided transliteration under both panes", async () => {
    const { stub, view, pane } = setup();
    pane.onInput("нашу");
    await vi.advanceTimersByTimeAsync(300);
    await vi.runAllTimersAsync();
    expect(stub.requests[0].include_translit).toBe(true);
    expect(view.translitSrc).toBe("srcT<нашу>");
    expect(view.translitTgt).toBe("tgtT<нашу>");
  });
});
