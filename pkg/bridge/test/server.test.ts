import { spawn } from "node:child_process";
import * as fs from "node:fs";
import * as path from "node:path";
import { PassThrough } from "node:stream";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { encodePcm16Base64 } from "../src/audio.js";
import { DEFAULT_CONFIG } from "../src/config.js";
import { serve } from "../src/server.js";
import { silence, voiced } from "./helpers.js";

const CLI_PATH = path.resolve(
  path.dirname(fileURLToPath(import.meta.url)),
  "..",
  "dist",
  "cli.js",
);

/** Run the request loop in-process over one batch of lines. */
async function roundTrip(lines: string[]): Promise<Record<string, unknown>[]> {
  const input = new PassThrough();
  const output = new PassThrough();
  const done = serve(DEFAULT_CONFIG, input, output);
  for (const line of lines) input.write(line + "\n");
  input.end();
  await done;
  const body = output.read()?.toString("utf-8") ?? "";
  return body
    .split("\n")
    .filter((l: string) => l.length > 0)
    .map((l: string) => JSON.parse(l));
}

describe("serve", () => {
  it("translates a one-second silence clip into a well-formed response", async () => {
    const request = {
      id: 0,
      op: "translate",
      audio_b64: encodePcm16Base64(silence(1.0).samples),
      prior_text: "",
      language: "es",
    };
    const [response] = await roundTrip([JSON.stringify(request)]);
    expect(response.id).toBe(0);
    expect(typeof response.text).toBe("string");
    expect(typeof response.avg_logprob).toBe("number");
    expect(typeof response.compute_seconds).toBe("number");
    const nsp = response.no_speech_prob as number;
    expect(nsp).toBeGreaterThanOrEqual(0);
    expect(nsp).toBeLessThanOrEqual(1);
  });

  it("answers every pipelined request with its own id", async () => {
    const audio = encodePcm16Base64(voiced(0.5).samples);
    const responses = await roundTrip([
      JSON.stringify({ id: 1, op: "translate", audio_b64: audio, prior_text: "", language: "es" }),
      JSON.stringify({ id: 2, op: "speak", text: "hola" }),
    ]);
    expect(responses.map((r) => r.id).sort()).toEqual([1, 2]);
    expect(responses.every((r) => !("error" in r))).toBe(true);
  });

  it("rejects a translate request without audio", async () => {
    const [response] = await roundTrip([
      JSON.stringify({ id: 5, op: "translate", audio_b64: "", prior_text: "", language: "es" }),
    ]);
    expect(response.id).toBe(5);
    expect(response.error).toMatch(/no audio/);
  });

  it("keeps serving after malformed lines", async () => {
    const responses = await roundTrip([
      "garbage",
      JSON.stringify({ id: 7, op: "speak", text: "ab" }),
    ]);
    expect(responses.length).toBe(2);
    expect(responses[0].id).toBe(-1);
    expect(responses[1]).toEqual({ id: 7, audio_duration: 0.12, compute_seconds: 0 });
  });

  it("skips blank lines", async () => {
    const responses = await roundTrip(["", "   ", JSON.stringify({ id: 8, op: "speak", text: "x" })]);
    expect(responses.length).toBe(1);
    expect(responses[0].id).toBe(8);
  });
});

describe("the built command-line server", () => {
  it("speaks the protocol over real stdio", async () => {
    expect(fs.existsSync(CLI_PATH), "run `npm run build` before the tests").toBe(true);
    const child = spawn(process.execPath, [CLI_PATH, "serve"], {
      stdio: ["pipe", "pipe", "inherit"],
    });
    const requests = [
      { id: 1, op: "speak", text: "hello" },
      { id: 2, op: "translate", audio_b64: encodePcm16Base64(silence(1.0).samples), prior_text: "", language: "es" },
    ];
    for (const request of requests) child.stdin.write(JSON.stringify(request) + "\n");
    child.stdin.end();

    const chunks: Buffer[] = [];
    for await (const chunk of child.stdout) chunks.push(chunk as Buffer);
    const exitCode: number = await new Promise((resolve) => child.on("close", resolve));
    expect(exitCode).toBe(0);

    const responses = Buffer.concat(chunks)
      .toString("utf-8")
      .split("\n")
      .filter((l) => l.length > 0)
      .map((l) => JSON.parse(l));
    expect(responses.map((r) => r.id).sort()).toEqual([1, 2]);
    const speak = responses.find((r) => r.id === 1);
    expect(speak.audio_duration).toBeCloseTo(0.3, 9);
    const translate = responses.find((r) => r.id === 2);
    expect(translate.no_speech_prob).toBeGreaterThanOrEqual(0);
    expect(translate.no_speech_prob).toBeLessThanOrEqual(1);
  });
});
