export interface ConsoleConfig {
  /** Base URL of the assessment service API, no trailing slash. */
  apiBase: string;
}

declare global {
  interface Window {
    FRIA_API_BASE?: string;
  }
}

export function resolveConfig(): ConsoleConfig {
  const fromWindow = typeof window !== "undefined" ? window.FRIA_API_BASE : undefined;
  const base = fromWindow ?? "http://127.0.0.1:8000";
  return { apiBase: base.replace(/\/+$/, "") };
}
