import { describe, expect, it } from "vitest";

import {
  decide,
  levenshtein,
  normalizedEditDistance,
  normalizeWhitespace,
  parsePolicy,
  policySlug,
  type HypothesisFields,
  type PolicyInput,
} from "../src/policies.js";

function hyp(text: string, noSpeechProb = 0.1): HypothesisFields {
  return { text, avg_logprob: -0.3, no_speech_prob: noSpeechProb, compute_seconds: 0.02 };
}

function input(
  text: string,
  options: { previous?: string | null; eos?: boolean; nsp?: number } = {},
): PolicyInput {
  return {
    current: hyp(text, options.nsp ?? 0.1),
    previous: options.previous == null ? null : hyp(options.previous),
    endOfStream: options.eos ?? false,
  };
}

describe("string helpers", () => {
  it("collapses whitespace like the replaying side", () => {
    expect(normalizeWhitespace("  hola   mundo \t nuevo\n")).toBe("hola mundo nuevo");
    expect(normalizeWhitespace("   ")).toBe("");
  });

  it("computes character edit distance", () => {
    expect(levenshtein("", "")).toBe(0);
    expect(levenshtein("abc", "")).toBe(3);
    expect(levenshtein("kitten", "sitting")).toBe(3);
    expect(levenshtein("flaw", "lawn")).toBe(2);
  });

  it("normalizes by the longer string", () => {
    expect(normalizedEditDistance("", "")).toBe(0);
    expect(normalizedEditDistance("abcd", "abcd")).toBe(0);
    expect(normalizedEditDistance("abcd", "")).toBe(1);
    expect(normalizedEditDistance("kitten", "sitting")).toBeCloseTo(3 / 7, 12);
  });
});

describe("decide", () => {
  it("waits on blank text even at end of stream", () => {
    for (const kind of ["greedy", "offline"] as const) {
      expect(decide({ kind }, input("   ", { eos: true }))).toBe("wait");
      expect(decide({ kind }, input("", { eos: false }))).toBe("wait");
    }
  });

  it("speaks at end of stream whenever text is present", () => {
    expect(decide({ kind: "offline" }, input("hola", { eos: true }))).toBe("speak");
    expect(decide({ kind: "cap", gamma: 1.0 }, input("hola", { eos: true, nsp: 0.9 }))).toBe(
      "speak",
    );
    expect(decide({ kind: "cp", alpha: 0.0 }, input("hola", { eos: true }))).toBe("speak");
  });

  it("greedy speaks mid-stream, offline waits", () => {
    expect(decide({ kind: "greedy" }, input("hola"))).toBe("speak");
    expect(decide({ kind: "offline" }, input("hola"))).toBe("wait");
  });

  it("cap compares confidence against gamma non-strictly", () => {
    // confidence is 1 - no_speech_prob, so nsp 0.1 sits exactly at 0.9
    expect(decide({ kind: "cap", gamma: 0.9 }, input("hola", { nsp: 0.1 }))).toBe("speak");
    expect(decide({ kind: "cap", gamma: 0.9 }, input("hola", { nsp: 0.11 }))).toBe("wait");
  });

  it("cp needs a previous hypothesis that roughly agrees", () => {
    expect(decide({ kind: "cp", alpha: 0.5 }, input("hola mundo"))).toBe("wait");
    expect(
      decide({ kind: "cp", alpha: 0.5 }, input("hola mundo", { previous: "hola mundo" })),
    ).toBe("speak");
    expect(
      decide({ kind: "cp", alpha: 0.1 }, input("hola mundo", { previous: "adios tierra" })),
    ).toBe("wait");
  });
});

describe("policy parsing and naming", () => {
  it("parses spec strings", () => {
    expect(parsePolicy("greedy")).toEqual({ kind: "greedy" });
    expect(parsePolicy("cap:0.9")).toEqual({ kind: "cap", gamma: 0.9 });
    expect(parsePolicy("cp:0.75")).toEqual({ kind: "cp", alpha: 0.75 });
  });

  it("rejects bad specs", () => {
    expect(() => parsePolicy("turbo")).toThrow(/unknown policy/);
    expect(() => parsePolicy("cap")).toThrow(/gamma/);
    expect(() => parsePolicy("greedy:2")).toThrow(/parameter/);
    expect(() => parsePolicy("cap:1.5")).toThrow(/gamma/);
  });

  it("builds the slugs replay file names use", () => {
    expect(policySlug({ kind: "greedy" })).toBe("greedy");
    expect(policySlug({ kind: "cap", gamma: 0.9 })).toBe("cap0.9");
    expect(policySlug({ kind: "cp", alpha: 0.75 })).toBe("cp0.75");
  });
});
