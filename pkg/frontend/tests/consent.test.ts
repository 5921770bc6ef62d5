import { beforeEach, afterEach, describe, expect, it, vi } from "vitest";

import { GatewayClient } from "../src/api";
import { ConsentPreference, StorageLike } from "../src/consent";
import { Conversation } from "../src/conversation";
import { TranslatePane } from "../src/pane";
import { RecordingView } from "./recordingView";
import { StubGateway } from "./stubGateway";

class MemoryStorage implements StorageLike {
  private data = new Map<string, string>();

  getItem(key: string): string | null {
    return this.data.get(key) ?? null;
  }

  setItem(key: string, value: string): void {
    this.data.set(key, value);
  }
}

describe("consent preference", () => {
  it("defaults to OFF on a fresh profile", () => {
    expect(new ConsentPreference(new MemoryStorage()).get()).toBe(false);
  });

  it("persists the toggle", () => {
    const storage = new MemoryStorage();
    const pref = new ConsentPreference(storage);
    pref.set(true);
    expect(new ConsentPreference(storage).get()).toBe(true);
    pref.set(false);
    expect(new ConsentPreference(storage).get()).toBe(false);
  });
});

describe("consent on the wire", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("fresh profile sends logging_consent=false on every request", async () => {
    const stub = new StubGateway();
    const client = new GatewayClient("http://gateway.test", stub.fetch);
    const pref = new ConsentPreference(new MemoryStorage());
    const pane = new TranslatePane(client, new RecordingView(), {
      debounceMs: 10,
      getConsent: () => pref.get(),
    });
    const conversation = new Conversation(client, { getConsent: () => pref.get() });

    pane.onInput("Dobrý den");
    await vi.advanceTimersByTimeAsync(20);
    await vi.runAllTimersAsync();
    await conversation.step("Ahoj");
    expect(stub.requests.length).toBe(2);
    expect(stub.requests.every((r) => r.logging_consent === false)).toBe(true);
  });

  it("toggle ON then OFF: later requests carry false", async () => {
    const stub = new StubGateway();
    const client = new GatewayClient("http://gateway.test", stub.fetch);
    const pref = new ConsentPreference(new MemoryStorage());
    const pane = new TranslatePane(client, new RecordingView(), {
      debounceMs: 10,
      getConsent: () => pref.get(),
    });

    pref.set(true);
    pane.onInput("jedna");
    await vi.advanceTimersByTimeAsync(20);
    await vi.runAllTimersAsync();
    pref.set(false);
    pane.onInput("dvě");
    await vi.advanceTimersByTimeAsync(20);
    await vi.runAllTimersAsync();

    expect(stub.requests.map((r) => r.logging_consent)).toEqual([true, false]);
  });
});
