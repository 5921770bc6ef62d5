import { Direction, GatewayClient } from "./api";
import { Conversation, Speaker } from "./conversation";
import { ConsentPreference } from "./consent";
import { PaneView, TranslatePane } from "./pane";

const GATEWAY_URL =
  (import.meta.env?.VITE_GATEWAY_URL as string | undefined) ?? "http://127.0.0.1:8080";

const LANG_NAMES: Record<string, string> = { cs: "čeština", uk: "українська" };

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function buildPaneView(): PaneView {
  const input = el<HTMLTextAreaElement>("source-input");
  const output = el<HTMLDivElement>("target-output");
  const translitSrc = el<HTMLDivElement>("source-translit");
  const translitTgt = el<HTMLDivElement>("target-translit");
  const banner = el<HTMLDivElement>("error-banner");
  const srcLabel = el<HTMLSpanElement>("source-lang");
  const tgtLabel = el<HTMLSpanElement>("target-lang");
  return {
    renderResult(translation, src, tgt) {
      output.textContent = translation;
      translitSrc.textContent = src;
      translitTgt.textContent = tgt;
    },
    clearResult() {
      output.textContent = "";
      translitSrc.textContent = "";
      translitTgt.textContent = "";
    },
    showError(message) {
      banner.textContent = message;
      banner.hidden = false;
    },
    clearError() {
      banner.textContent = "";
      banner.hidden = true;
    },
    setInput(text) {
      input.value = text;
    },
    setDirection(direction: Direction) {
      srcLabel.textContent = LANG_NAMES[direction.src] ?? direction.src;
      tgtLabel.textContent = LANG_NAMES[direction.tgt] ?? direction.tgt;
    },
  };
}

function renderTurns(conversation: Conversation): void {
  const list = el<HTMLDivElement>("conversation-turns");
  list.replaceChildren();
  for (const turn of conversation.turns) {
    const bubble = document.createElement("div");
    bubble.className = `turn speaker-${turn.speaker.toLowerCase()}`;
    const source = document.createElement("div");
    source.className = "turn-source";
    source.textContent = turn.source;
    const translated = document.createElement("div");
    translated.className = "turn-translated";
    translated.textContent = turn.translated;
    const translit = document.createElement("div");
    translit.className = "turn-translit";
    translit.textContent = turn.translitTgt;
    bubble.append(source, translated, translit);
    list.append(bubble);
  }
  const active = el<HTMLSpanElement>("active-speaker");
  active.textContent = `mluví ${conversation.activeSpeaker}`;
}

function main(): void {
  const client = new GatewayClient(GATEWAY_URL);
  const consent = new ConsentPreference();
  const consentToggle = el<HTMLInputElement>("consent-toggle");
  consentToggle.checked = consent.get();
  consentToggle.addEventListener("change", () => consent.set(consentToggle.checked));

  const pane = new TranslatePane(client, buildPaneView(), {
    debounceMs: 300,
    direction: { src: "cs", tgt: "uk" },
    getConsent: () => consent.get(),
  });
  const input = el<HTMLTextAreaElement>("source-input");
  input.addEventListener("input", () => pane.onInput(input.value));
  el<HTMLButtonElement>("swap-button").addEventListener("click", () => pane.swap());

  const conversation = new Conversation(client, { getConsent: () => consent.get() });
  const utterance = el<HTMLInputElement>("utterance-input");
  const speakerButtons: Record<Speaker, HTMLButtonElement> = {
    A: el<HTMLButtonElement>("speaker-a"),
    B: el<HTMLButtonElement>("speaker-b"),
  };
  for (const speaker of ["A", "B"] as Speaker[]) {
    speakerButtons[speaker].addEventListener("click", () => {
      conversation.setSpeaker(speaker);
      renderTurns(conversation);
    });
  }
  el<HTMLFormElement>("utterance-form").addEventListener("submit", async (event) => {
    event.preventDefault();
    try {
      const turn = await conversation.step(utterance.value);
      if (turn) {
        utterance.value = "";
        renderTurns(conversation);
      }
    } catch {
      // translation failed: keep the utterance editable, flag it
      utterance.classList.add("failed");
      setTimeout(() => utterance.classList.remove("failed"), 1200);
    }
  });
  renderTurns(conversation);
}

document.addEventListener("DOMContentLoaded", main);
