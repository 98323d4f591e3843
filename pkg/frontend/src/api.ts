// Thin fetch client. Each request names a slot; a newer request in the
// same slot aborts the one in flight (latest user input wins).

import type { ApiErrorBody } from "./types.js";

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public round?: number
  ) {
    super(message);
  }
}

export class Cancelled extends Error {}

export class ApiClient {
  private controllers = new Map<string, AbortController>();

  constructor(private base: string = "") {}

  private async request<T>(slot: string | null, path: string, init: RequestInit): Promise<T> {
    let signal: AbortSignal | undefined;
    if (slot !== null) {
      this.controllers.get(slot)?.abort();
      const controller = new AbortController();
      this.controllers.set(slot, controller);
      signal = controller.signal;
    }
    let response: Response;
    try {
      response = await fetch(this.base + path, { ...init, signal });
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") {
        throw new Cancelled(path);
      }
      throw err;
    }
    const body = await response.json();
    if (!response.ok) {
      const error = (body as ApiErrorBody).error;
      throw new ApiError(error?.code ?? "unknown", error?.message ?? response.statusText, error?.round);
    }
    return body as T;
  }

  get<T>(path: string, slot: string | null = null): Promise<T> {
    return this.request<T>(slot, path, { method: "GET" });
  }

  post<T>(path: string, payload: unknown, slot: string | null = null): Promise<T> {
    return this.request<T>(slot, path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }
}
