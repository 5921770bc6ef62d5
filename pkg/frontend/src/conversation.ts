/**
 * Conversation mode: two speakers with fixed directions take turns;
 * each successful utterance appends one turn and hands the floor to the
 * other speaker. A failed translation leaves the utterance editable and
 * the speaker unchanged.
 */

import { Direction, GatewayClient } from "./api";

export type Speaker = "A" | "B";

export interface ConversationTurn {
  speaker: Speaker;
  direction: Direction;
  source: string;
  translated: string;
  translitSrc: string;
  translitTgt: string;
}

export interface ConversationOptions {
  directions?: Record<Speaker, Direction>;
  getConsent: () => boolean;
  clientId?: string;
}

export class Conversation {
  private readonly client: GatewayClient;
  private readonly directions: Record<Speaker, Direction>;
  private readonly getConsent: () => boolean;
  private readonly clientId?: string;

  turns: ConversationTurn[] = [];
  activeSpeaker: Speaker = "A";

  constructor(client: GatewayClient, options: ConversationOptions) {
    this.client = client;
    this.directions = options.directions ?? {
      A: { src: "cs", tgt: "uk" },
      B: { src: "uk", tgt: "cs" },
    };
    this.getConsent = options.getConsent;
    this.clientId = options.clientId;
  }

  directionOf(speaker: Speaker): Direction {
    return { ...this.directions[speaker] };
  }

  setSpeaker(speaker: Speaker): void {
    this.activeSpeaker = speaker;
  }

  /**
   * Translate one utterance for the active speaker. Returns the appended
   * turn, or null for empty input. Throws on gateway failure without
   * appending or toggling, so the utterance stays editable.
   */
  async step(utterance: string): Promise<ConversationTurn | null> {
    if (utterance.trim() === "") {
      return null;
    }
    const speaker = this.activeSpeaker;
    const direction = this.directions[speaker];
    const response = await this.client.translate({
      src: direction.src,
      tgt: direction.tgt,
      texts: [utterance],
      include_translit: true,
      logging_consent: this.getConsent(),
      client_id: this.clientId,
    });
    const turn: ConversationTurn = {
      speaker,
      direction: { ...direction },
      source: utterance,
      translated: response.translations[0] ?? "",
      translitSrc: response.translit_src?.[0] ?? "",
      translitTgt: response.translit_tgt?.[0] ?? "",
    };
    this.turns.push(turn);
    this.activeSpeaker = speaker === "A" ? "B" : "A";
    return turn;
  }
}
