/* Test doubles: an Api whose methods replay recorded fixtures and count
   calls, so contract tests can assert what went over the wire without a
   server. */

import { Api, ApiCallError } from "../src/api.js";

export type Calls = { method: string; args: unknown[] }[];

/**
 * Builds an Api whose listed methods resolve canned values (or reject
 * with a canned ApiCallError) and logs every call.
 */
export function stubApi(
  replies: Record<string, unknown | (() => unknown)>
): { api: Api; calls: Calls } {
  const calls: Calls = [];
  const api = new Api("", () => {
    throw new Error("stubApi must not reach fetch");
  });
  for (const [method, reply] of Object.entries(replies)) {
    (api as unknown as Record<string, unknown>)[method] = (...args: unknown[]) => {
      calls.push({ method, args });
      const value = typeof reply === "function" ? (reply as () => unknown)() : reply;
      if (value instanceof ApiCallError) {
        return Promise.reject(value);
      }
      return Promise.resolve(value);
    };
  }
  return { api, calls };
}

export function callsTo(calls: Calls, method: string): Calls {
  return calls.filter((c) => c.method === method);
}

/** ApiCallError built from a recorded error fixture ({status, body}). */
export function errorFromFixture(fixture: {
  status: number;
  body: { code: string; message: string; details?: Record<string, unknown> };
}): ApiCallError {
  return new ApiCallError(
    fixture.status,
    fixture.body.code,
    fixture.body.message,
    fixture.body.details ?? {}
  );
}
