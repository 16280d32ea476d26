import { describe, expect, it } from "vitest";

import { parseRequestLine, serializeResponse } from "../src/protocol.js";

describe("parseRequestLine", () => {
  it("accepts a translate request and fills defaults", () => {
    const line = JSON.stringify({ id: 4, op: "translate", audio_b64: "AAAA" });
    const outcome = parseRequestLine(line);
    expect(outcome.ok).toBe(true);
    if (outcome.ok && outcome.request.op === "translate") {
      expect(outcome.request.id).toBe(4);
      expect(outcome.request.prior_text).toBe("");
      expect(outcome.request.language).toBe("auto");
    }
  });

  it("accepts a speak request", () => {
    const outcome = parseRequestLine(JSON.stringify({ id: 0, op: "speak", text: "hola" }));
    expect(outcome.ok).toBe(true);
    if (outcome.ok) expect(outcome.request.op).toBe("speak");
  });

  it("maps non-JSON lines to id -1", () => {
    const outcome = parseRequestLine("definitely not json");
    expect(outcome.ok).toBe(false);
    if (!outcome.ok) {
      expect(outcome.error.id).toBe(-1);
      expect(outcome.error.error).toMatch(/not JSON/);
    }
  });

  it("maps a missing or non-integer id to -1", () => {
    for (const line of [
      JSON.stringify({ op: "speak", text: "x" }),
      JSON.stringify({ id: "seven", op: "speak", text: "x" }),
      JSON.stringify({ id: 1.5, op: "speak", text: "x" }),
    ]) {
      const outcome = parseRequestLine(line);
      expect(outcome.ok).toBe(false);
      if (!outcome.ok) expect(outcome.error.id).toBe(-1);
    }
  });

  it("blames the sender's id for an unknown op or missing fields", () => {
    const unknownOp = parseRequestLine(JSON.stringify({ id: 9, op: "transcribe" }));
    expect(unknownOp.ok).toBe(false);
    if (!unknownOp.ok) expect(unknownOp.error.id).toBe(9);

    const missingText = parseRequestLine(JSON.stringify({ id: 12, op: "speak" }));
    expect(missingText.ok).toBe(false);
    if (!missingText.ok) {
      expect(missingText.error.id).toBe(12);
      expect(missingText.error.error).toMatch(/text/);
    }
  });
});

describe("serializeResponse", () => {
  it("writes exactly one newline-terminated JSON object", () => {
    const line = serializeResponse({ id: 3, error: "boom" });
    expect(line.endsWith("\n")).toBe(true);
    expect(JSON.parse(line)).toEqual({ id: 3, error: "boom" });
    expect(line.slice(0, -1)).not.toContain("\n");
  });
});
