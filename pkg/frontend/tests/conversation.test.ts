import { describe, expect, it } from "vitest";

import { GatewayClient } from "../src/api";
import { Conversation } from "../src/conversation";
import { StubGateway } from "./stubGateway";

function setup(consent = false) {
  const stub = new StubGateway();
  const client = new GatewayClient("http://gateway.test", stub.fetch);
  const conversation = new Conversation(client, { getConsent: () => consent });
  return { stub, conversation };
}

describe("conversation mode", () => {
  it("appends a turn in the active speaker's direction and toggles", async () => {
    const { conversation } = setup();
    const turn = await conversation.step("Dobrý den");
    expect(turn).not.toBeNull();
    expect(turn!.speaker).toBe("A");
    expect(turn!.direction).toEqual({ src: "cs", tgt: "uk" });
    expect(conversation.activeSpeaker).toBe("B");
  });

  it("consecutive turns by different speakers alternate direction", async () => {
    const { conversation } = setup();
    await conversation.step("Dobrý den");
    const reply = await conversation.step("добрий день");
    expect(reply!.speaker).toBe("B");
    expect(reply!.direction).toEqual({ src: "uk", tgt: "cs" });
    expect(conversation.turns.map((t) => t.direction.src)).toEqual(["cs", "uk"]);
    expect(conversation.activeSpeaker).toBe("A");
  });

  it("empty utterance adds no turn and keeps the speaker", async () => {
    const { stub, conversation } = setup();
    const turn = await conversation.step("   ");
    expect(turn).toBeNull();
    expect(conversation.turns).toEqual([]);
    expect(conversation.activeSpeaker).toBe("A");
    expect(stub.requests.length).toBe(0);
  });

  it("translation failure appends nothing and keeps the floor", async () => {
    const { stub, conversation } = setup();
    stub.mode = "fail";
    await expect(conversation.step("selže")).rejects.toThrow();
    expect(conversation.turns).toEqual([]);
    expect(conversation.activeSpeaker).toBe("A");
  });

  it("manual speaker selection overrides the default alternation", async () => {
    const { conversation } = setup();
    await conversation.step("Ahoj");
    conversation.setSpeaker("A");
    const turn = await conversation.step("Ještě já");
    expect(turn!.speaker).toBe("A");
    expect(turn!.direction).toEqual({ src: "cs", tgt: "uk" });
  });

  it("turns carry both transliteration lines", async () => {
    const { conversation } = setup();
    const turn = await conversation.step("Dobrý den");
    expect(turn!.translitSrc).toBe("srcT<Dobrý den>");
    expect(turn!.translitTgt).toBe("tgtT<Dobrý den>");
  });
});
