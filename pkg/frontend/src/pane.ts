/**
 * Dual-pane translation controller.
 *
 * Typing is debounced so one settled input produces one request; every
 * request carries a sequence number and only the newest response may
 * render, so a stale translation can never appear under fresher input.
 * Swapping exchanges pane contents and reverses the direction; swapping
 * twice restores the original state.
 */

import {
  Direction,
  GatewayClient,
  TranslateResponse,
  reverse,
} from "./api";

export interface PaneView {
  renderResult(translation: string, translitSrc: string, translitTgt: string): void;
  clearResult(): void;
  showError(message: string): void;
  clearError(): void;
  setInput(text: string): void;
  setDirection(direction: Direction): void;
}

export interface PaneOptions {
  debounceMs?: number;
  direction?: Direction;
  getConsent: () => boolean;
  clientId?: string;
}

interface PaneSnapshot {
  input: string;
  translation: string;
  direction: Direction;
}

export class TranslatePane {
  readonly client: GatewayClient;
  readonly view: PaneView;
  private readonly debounceMs: number;
  private readonly getConsent: () => boolean;
  private readonly clientId?: string;

  private direction: Direction;
  private input = "";
  private translation = "";
  private timer: ReturnType<typeof setTimeout> | null = null;
  private sequence = 0;
  private rendered = 0;
  requestsSent = 0;

  constructor(client: GatewayClient, view: PaneView, options: PaneOptions) {
    this.client = client;
    this.view = view;
    this.debounceMs = options.debounceMs ?? 300;
    this.direction = options.direction ?? { src: "cs", tgt: "uk" };
    this.getConsent = options.getConsent;
    this.clientId = options.clientId;
    this.view.setDirection(this.direction);
  }

  getDirection(): Direction {
    return { ...this.direction };
  }

  snapshot(): PaneSnapshot {
    return {
      input: this.input,
      translation: this.translation,
      direction: { ...this.direction },
    };
  }

  /** Debounced input handler; empty input clears panes without a request. */
  onInput(text: string): void {
    this.input = text;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    if (text.trim() === "") {
      this.translation = "";
      this.view.clearResult();
      this.view.clearError();
      return;
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.requestTranslation();
    }, this.debounceMs);
  }

  private async requestTranslation(): Promise<void> {
    const seq = ++this.sequence;
    const requestedInput = this.input;
    this.requestsSent += 1;
    let response: TranslateResponse;
    try {
      response = await this.client.translate({
        src: this.direction.src,
        tgt: this.direction.tgt,
        texts: [requestedInput],
        include_translit: true,
        logging_consent: this.getConsent(),
        client_id: this.clientId,
      });
    } catch (error) {
      if (seq >= this.sequence && this.input === requestedInput) {
        this.view.showError(error instanceof Error ? error.message : String(error));
      }
      return;
    }
    // stale-response discipline: render only the newest answer, and only
    // while the pane still shows the text that produced it
    if (seq < this.rendered || seq < this.sequence) {
      return;
    }
    if (this.input !== requestedInput) {
      return;
    }
    this.rendered = seq;
    this.translation = response.translations[0] ?? "";
    this.view.clearError();
    this.view.renderResult(
      this.translation,
      response.translit_src?.[0] ?? "",
      response.translit_tgt?.[0] ?? "",
    );
  }

  /** Exchange pane contents and reverse the direction. */
  swap(): void {
    const previousTranslation = this.translation;
    const previousInput = this.input;
    this.direction = reverse(this.direction);
    this.input = previousTranslation;
    this.translation = previousInput;
    this.view.setDirection(this.direction);
    this.view.setInput(this.input);
    if (this.translation) {
      this.view.renderResult(this.translation, "", "");
    } else {
      this.view.clearResult();
    }
  }

  /** Immediate (non-debounced) translation, for Enter/submit. */
  async flush(): Promise<void> {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    if (this.input.trim() !== "") {
      await this.requestTranslation();
    }
  }
}
