// Speak/wait policies, mirroring the replaying pipeline's semantics exactly.
// The recorder must make the same decision the pipeline will make when it
// replays the trace, otherwise the replay diverges; guard order matters:
// a blank hypothesis always waits (even at end of stream), then end of
// stream always speaks, then the per-policy rule applies.

export type PolicyKind = "greedy" | "offline" | "cap" | "cp";

export interface PolicyConfig {
  kind: PolicyKind;
  gamma?: number; // confidence threshold, cap only
  alpha?: number; // agreement threshold, cp only
}

export interface HypothesisFields {
  text: string;
  avg_logprob: number;
  no_speech_prob: number;
  compute_seconds: number;
}

export interface PolicyInput {
  current: HypothesisFields;
  previous: HypothesisFields | null;
  endOfStream: boolean;
}

export type Action = "speak" | "wait";

export function normalizeWhitespace(s: string): string {
  return s.trim().replace(/\s+/g, " ");
}

/** Character-level minimal edit count with unit costs. */
export function levenshtein(a: string, b: string): number {
  if (a === b) return 0;
  if (a.length < b.length) [a, b] = [b, a];
  if (b.length === 0) return a.length;
  let prev = Array.from({ length: b.length + 1 }, (_, j) => j);
  for (let i = 1; i <= a.length; i++) {
    const cur = [i];
    for (let j = 1; j <= b.length; j++) {
      const subst = prev[j - 1] + (a[i - 1] === b[j - 1] ? 0 : 1);
      cur.push(Math.min(prev[j] + 1, cur[j - 1] + 1, subst));
    }
    prev = cur;
  }
  return prev[b.length];
}

/** levenshtein(a, b) / max(|a|, |b|); 0 when both strings are empty. */
export function normalizedEditDistance(a: string, b: string): number {
  const longest = Math.max(a.length, b.length);
  if (longest === 0) return 0;
  return levenshtein(a, b) / longest;
}

export function validatePolicy(config: PolicyConfig): void {
  if (config.kind === "cap") {
    if (config.gamma === undefined) throw new Error("cap policy requires gamma");
    if (config.gamma < 0 || config.gamma > 1) {
      throw new Error(`gamma must be in [0, 1], got ${config.gamma}`);
    }
  } else if (config.gamma !== undefined) {
    throw new Error(`${config.kind} policy does not take gamma`);
  }
  if (config.kind === "cp") {
    if (config.alpha === undefined) throw new Error("cp policy requires alpha");
    if (config.alpha < 0) throw new Error(`alpha must be >= 0, got ${config.alpha}`);
  } else if (config.alpha !== undefined) {
    throw new Error(`${config.kind} policy does not take alpha`);
  }
}

export function decide(config: PolicyConfig, input: PolicyInput): Action {
  const text = normalizeWhitespace(input.current.text);
  if (text === "") return "wait";
  if (input.endOfStream) return "speak";

  switch (config.kind) {
    case "greedy":
      return "speak";
    case "offline":
      return "wait";
    case "cap": {
      const confidence = 1 - input.current.no_speech_prob;
      return confidence >= config.gamma! ? "speak" : "wait";
    }
    case "cp": {
      if (input.previous === null) return "wait";
      const distance = normalizedEditDistance(
        normalizeWhitespace(input.previous.text),
        text,
      );
      return distance <= config.alpha! ? "speak" : "wait";
    }
  }
}

/** Parse a spec string like "greedy", "cap:0.9" or "cp:0.5". */
export function parsePolicy(spec: string): PolicyConfig {
  const trimmed = spec.trim().toLowerCase();
  const sep = trimmed.indexOf(":");
  const name = sep < 0 ? trimmed : trimmed.slice(0, sep);
  const param = sep < 0 ? "" : trimmed.slice(sep + 1);
  let value: number | undefined;
  if (param !== "") {
    value = Number(param);
    if (!Number.isFinite(value)) throw new Error(`bad policy parameter in ${spec}`);
    if (name !== "cap" && name !== "cp") {
      throw new Error(`${name} policy does not take a parameter`);
    }
  }
  let config: PolicyConfig;
  if (name === "greedy" || name === "offline") {
    config = { kind: name };
  } else if (name === "cap") {
    config = { kind: "cap", gamma: value };
  } else if (name === "cp") {
    config = { kind: "cp", alpha: value };
  } else {
    throw new Error(`unknown policy ${spec}`);
  }
  validatePolicy(config);
  return config;
}

/** Number formatted the way the replaying side formats it in file names. */
export function formatNumber(value: number): string {
  return String(value);
}

/** Filesystem-safe policy identifier used in trace file names. */
export function policySlug(config: PolicyConfig): string {
  if (config.kind === "cap") return `cap${formatNumber(config.gamma!)}`;
  if (config.kind === "cp") return `cp${formatNumber(config.alpha!)}`;
  return config.kind;
}
