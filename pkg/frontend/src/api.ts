/**
 * Typed client for the translation gateway JSON API (/api/v2).
 * All transliteration shown in the UI comes from the gateway; the client
 * never computes it locally, so one rule table governs every surface.
 */

export type Lang = "cs" | "uk";

export interface Direction {
  src: Lang;
  tgt: Lang;
}

export interface TranslateRequest {
  src: string;
  tgt: string;
  texts: string[];
  include_translit: boolean;
  logging_consent: boolean;
  client_id?: string;
}

export interface TranslateResponse {
  translations: string[];
  translit_src?: string[];
  translit_tgt?: string[];
}

export interface LanguagePair {
  src: string;
  tgt: string;
  kind: "direct" | "pivot";
}

export class GatewayError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, code: string, message: string) {
    super(message);
    this.status = status;
    this.code = code;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class GatewayClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  async translate(request: TranslateRequest): Promise<TranslateResponse> {
    const response = await this.fetchFn(`${this.baseUrl}/api/v2/translate`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    });
    if (!response.ok) {
      let code = "unknown";
      let message = `gateway answered ${response.status}`;
      try {
        const body = await response.json();
        code = body?.error?.code ?? code;
        message = body?.error?.message ?? message;
      } catch {
        // non-JSON error body; keep the defaults
      }
      throw new GatewayError(response.status, code, message);
    }
    return (await response.json()) as TranslateResponse;
  }

  async languages(): Promise<LanguagePair[]> {
    const response = await this.fetchFn(`${this.baseUrl}/api/v2/languages`);
    if (!response.ok) {
      throw new GatewayError(response.status, "unknown", "languages unavailable");
    }
    const body = await response.json();
    return body.pairs as LanguagePair[];
  }
}

export function reverse(direction: Direction): Direction {
  return { src: direction.tgt, tgt: direction.src };
}
