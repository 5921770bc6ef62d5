/**
 * Logging-consent preference: persisted locally, default OFF.
 * Every translate request carries exactly the current toggle value.
 */

const STORAGE_KEY = "mostmt.logging-consent";

export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

export class ConsentPreference {
  private readonly storage: StorageLike;

  constructor(storage?: StorageLike) {
    this.storage = storage ?? window.localStorage;
  }

  get(): boolean {
    return this.storage.getItem(STORAGE_KEY) === "true";
  }

  set(value: boolean): void {
    this.storage.setItem(STORAGE_KEY, value ? "true" : "false");
  }
}
