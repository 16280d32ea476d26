// Line-delimited JSON request loop over stdio. Requests are handled
// sequentially in arrival order (the replaying pipeline keeps one query in
// flight per stream, so nothing is lost); every line gets exactly one
// response carrying the request's id, errors included.

import * as readline from "node:readline";
import type { Readable, Writable } from "node:stream";

import type { BridgeConfig } from "./config.js";
import { decodePcm16Base64, CANONICAL_SAMPLE_RATE } from "./audio.js";
import { createEngine, type Engine } from "./engine.js";
import { createTts, type Tts } from "./tts.js";
import {
  parseRequestLine,
  serializeResponse,
  type Request,
  type Response,
} from "./protocol.js";

async function handleRequest(request: Request, engine: Engine, tts: Tts): Promise<Response> {
  if (request.op === "speak") {
    const result = await tts.speak(request.text);
    return { id: request.id, ...result };
  }
  if (request.audio_b64 === "") {
    return { id: request.id, error: "translate request carries no audio" };
  }
  let samples: Float32Array;
  try {
    samples = decodePcm16Base64(request.audio_b64);
  } catch (e) {
    return { id: request.id, error: `bad audio payload: ${e}` };
  }
  const result = await engine.translate({
    samples,
    sampleRate: CANONICAL_SAMPLE_RATE,
    priorText: request.prior_text,
    language: request.language,
  });
  return { id: request.id, ...result };
}

/**
 * Serve the protocol until the input stream ends.
 *
 * Engine and synthesizer are constructed up front so configuration
 * problems (missing model, missing credentials) fail startup instead of
 * surfacing one request at a time.
 */
export async function serve(
  config: BridgeConfig,
  input: Readable,
  output: Writable,
): Promise<void> {
  const engine = await createEngine(config);
  let tts: Tts;
  try {
    tts = createTts(config);
  } catch (e) {
    await engine.close();
    throw e;
  }

  const lines = readline.createInterface({ input, crlfDelay: Infinity });
  try {
    for await (const line of lines) {
      if (line.trim() === "") continue;
      const parsed = parseRequestLine(line);
      let response: Response;
      if (!parsed.ok) {
        response = parsed.error;
      } else {
        try {
          response = await handleRequest(parsed.request, engine, tts);
        } catch (e) {
          response = { id: parsed.request.id, error: String(e) };
        }
      }
      output.write(serializeResponse(response));
    }
  } finally {
    lines.close();
    await tts.close();
    await engine.close();
  }
}
