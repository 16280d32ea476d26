// Wire protocol: one JSON object per line over stdin/stdout. Requests carry
// a client-assigned integer id which is echoed on every response, success or
// error, so clients can pipeline and match responses in any order.

import { z } from "zod";

export const translateRequestSchema = z.object({
  id: z.number().int(),
  op: z.literal("translate"),
  audio_b64: z.string(),
  prior_text: z.string().default(""),
  language: z.string().default("auto"),
});

export const speakRequestSchema = z.object({
  id: z.number().int(),
  op: z.literal("speak"),
  text: z.string(),
});

export const requestSchema = z.discriminatedUnion("op", [
  translateRequestSchema,
  speakRequestSchema,
]);

export type TranslateRequest = z.infer<typeof translateRequestSchema>;
export type SpeakRequest = z.infer<typeof speakRequestSchema>;
export type Request = z.infer<typeof requestSchema>;

export interface TranslateResponse {
  id: number;
  text: string;
  avg_logprob: number;
  no_speech_prob: number;
  compute_seconds: number;
}

export interface SpeakResponse {
  id: number;
  audio_duration: number;
  compute_seconds: number;
}

export interface ErrorResponse {
  id: number;
  error: string;
}

export type Response = TranslateResponse | SpeakResponse | ErrorResponse;

export type ParseOutcome =
  | { ok: true; request: Request }
  | { ok: false; error: ErrorResponse };

/** Id to blame in an error response, -1 when the line yields none. */
function salvageId(value: unknown): number {
  if (typeof value === "object" && value !== null) {
    const id = (value as Record<string, unknown>).id;
    if (typeof id === "number" && Number.isInteger(id)) {
      return id;
    }
  }
  return -1;
}

/** Parse one request line; malformed input becomes an error response. */
export function parseRequestLine(line: string): ParseOutcome {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch (e) {
    return { ok: false, error: { id: -1, error: `request is not JSON: ${e}` } };
  }
  const parsed = requestSchema.safeParse(raw);
  if (!parsed.success) {
    const issue = parsed.error.issues[0];
    const detail = issue ? `${issue.path.join(".") || "request"}: ${issue.message}` : "bad request";
    return { ok: false, error: { id: salvageId(raw), error: `malformed request: ${detail}` } };
  }
  return { ok: true, request: parsed.data };
}

export function serializeResponse(response: Response): string {
  return JSON.stringify(response) + "\n";
}
