// Trace recorder: drives the model through the same chunk/decide loop the
// replaying pipeline runs, and writes its answers in the pipeline's trace
// file format. Replay validates every query's buffer length and prior text
// against these files, so any drift between this loop and the pipeline's
// shows up as a loud divergence error, never silent corruption.

import * as fs from "node:fs";
import * as path from "node:path";

import { readWav, durationSeconds, type Pcm } from "./audio.js";
import {
  decide,
  formatNumber,
  normalizeWhitespace,
  policySlug,
  type HypothesisFields,
  type PolicyConfig,
} from "./policies.js";
import type { Engine } from "./engine.js";

export interface ManifestEntry {
  id: string;
  audioPath: string;
  durationSeconds: number;
  sourceText: string;
  referenceTranslation: string;
  language: string;
}

const MANIFEST_COLUMNS = [
  "id",
  "audio_path",
  "duration_seconds",
  "source_text",
  "reference_translation",
  "language",
] as const;

/** Parse a tab-separated manifest; rows whose audio file is missing are skipped. */
export function loadManifest(manifestPath: string, audioRoot?: string): ManifestEntry[] {
  const root = audioRoot ?? path.dirname(manifestPath);
  const text = fs.readFileSync(manifestPath, "utf-8");
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error(`${manifestPath}: manifest is empty`);
  }
  const header = lines[0].split("\t");
  const missing = MANIFEST_COLUMNS.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new Error(`${manifestPath}: missing columns ${missing.join(", ")}`);
  }
  const index = Object.fromEntries(header.map((name, i) => [name, i]));
  const entries: ManifestEntry[] = [];
  for (let lineno = 1; lineno < lines.length; lineno++) {
    const fields = lines[lineno].split("\t");
    if (fields.length !== header.length) {
      throw new Error(`${manifestPath}:${lineno + 1}: wrong number of fields`);
    }
    const duration = Number(fields[index.duration_seconds]);
    if (!Number.isFinite(duration) || duration <= 0) {
      throw new Error(`${manifestPath}:${lineno + 1}: bad duration`);
    }
    const audioPath = path.resolve(root, fields[index.audio_path]);
    if (!fs.existsSync(audioPath)) {
      console.error(`${manifestPath}:${lineno + 1}: audio file ${audioPath} missing, row skipped`);
      continue;
    }
    entries.push({
      id: fields[index.id],
      audioPath,
      durationSeconds: duration,
      sourceText: fields[index.source_text],
      referenceTranslation: fields[index.reference_translation],
      language: fields[index.language],
    });
  }
  return entries;
}

export interface TraceEntryRecord {
  query_index: number;
  expected_buffer_seconds: number;
  expected_prior_text: string;
  text: string;
  avg_logprob: number;
  no_speech_prob: number;
  compute_seconds: number;
}

interface Chunk {
  samples: Float32Array;
  endOffset: number;
}

function sliceChunks(pcm: Pcm, windowSeconds: number): Chunk[] {
  if (windowSeconds <= 0) {
    throw new Error(`window must be positive, got ${windowSeconds}`);
  }
  const windowSamples = Math.max(1, Math.round(windowSeconds * pcm.sampleRate));
  const chunks: Chunk[] = [];
  for (let start = 0; start < pcm.samples.length; start += windowSamples) {
    const end = Math.min(start + windowSamples, pcm.samples.length);
    chunks.push({
      samples: pcm.samples.subarray(start, end),
      endOffset: end / pcm.sampleRate,
    });
  }
  return chunks;
}

function concat(parts: Float32Array[]): Float32Array {
  const total = parts.reduce((n, p) => n + p.length, 0);
  const out = new Float32Array(total);
  let offset = 0;
  for (const p of parts) {
    out.set(p, offset);
    offset += p.length;
  }
  return out;
}

/**
 * Record the query sequence one utterance produces under one configuration.
 *
 * Mirrors the unpaced simulated-clock loop: the clock jumps to the next
 * chunk boundary when no audio is buffered, every query covers the whole
 * buffer with the committed text as context, chunks whose boundary falls
 * within the query's compute time arrive before the decision is applied,
 * and speaking clears the buffer.
 */
export async function recordUtterance(
  pcm: Pcm,
  windowSeconds: number,
  policy: PolicyConfig,
  engine: Engine,
  language: string,
): Promise<TraceEntryRecord[]> {
  const pending = sliceChunks(pcm, windowSeconds);
  const records: TraceEntryRecord[] = [];
  let arrivals: Chunk[] = [];
  let buffer: Chunk[] = [];
  let committed: string[] = [];
  let previous: HypothesisFields | null = null;
  let sim = 0;

  const arriveUpto = (t: number) => {
    while (pending.length > 0 && pending[0].endOffset <= t) {
      arrivals.push(pending.shift()!);
    }
  };

  for (;;) {
    if (arrivals.length === 0) {
      if (pending.length === 0) break;
      sim = Math.max(sim, pending[0].endOffset);
      arriveUpto(sim);
    }
    buffer.push(...arrivals);
    arrivals = [];
    const endOfStream = pending.length === 0;

    const bufferSeconds = buffer.reduce((s, c) => s + c.samples.length, 0) / pcm.sampleRate;
    const priorText = committed.join(" ");
    const hypothesis = await engine.translate({
      samples: concat(buffer.map((c) => c.samples)),
      sampleRate: pcm.sampleRate,
      priorText,
      language,
    });
    records.push({
      query_index: records.length,
      expected_buffer_seconds: bufferSeconds,
      expected_prior_text: priorText,
      text: hypothesis.text,
      avg_logprob: hypothesis.avg_logprob,
      no_speech_prob: hypothesis.no_speech_prob,
      compute_seconds: hypothesis.compute_seconds,
    });
    const finished = sim + hypothesis.compute_seconds;
    arriveUpto(finished); // chunks that arrived while the query ran
    sim = finished;

    const action = decide(policy, { current: hypothesis, previous, endOfStream });
    if (action === "speak") {
      committed.push(normalizeWhitespace(hypothesis.text));
      buffer = [];
      previous = null;
    } else {
      previous = hypothesis;
      if (endOfStream) buffer = [];
    }
    if (endOfStream) break;
  }
  return records;
}

export function traceFilename(
  utteranceId: string,
  windowSeconds: number,
  policy: PolicyConfig,
): string {
  return `${utteranceId}__w${formatNumber(windowSeconds)}__${policySlug(policy)}.trace.jsonl`;
}

export function writeTraceFile(
  filePath: string,
  records: TraceEntryRecord[],
  comment?: string,
): void {
  const lines: string[] = [];
  if (comment) {
    for (const part of comment.split("\n")) lines.push(`# ${part}`);
  }
  for (const record of records) lines.push(JSON.stringify(record));
  fs.writeFileSync(filePath, lines.join("\n") + "\n", "utf-8");
}

export interface RecordOptions {
  windows: number[];
  policies: PolicyConfig[];
  traceDir: string;
  comment?: string;
}

/** Record every (utterance, window, policy) cell; returns the written paths. */
export async function recordTraces(
  entries: ManifestEntry[],
  engine: Engine,
  options: RecordOptions,
): Promise<string[]> {
  fs.mkdirSync(options.traceDir, { recursive: true });
  const written: string[] = [];
  for (const entry of entries) {
    const pcm = readWav(entry.audioPath);
    if (durationSeconds(pcm) === 0) {
      console.error(`${entry.id}: empty audio, skipped`);
      continue;
    }
    for (const windowSeconds of options.windows) {
      for (const policy of options.policies) {
        const records = await recordUtterance(pcm, windowSeconds, policy, engine, entry.language);
        const target = path.join(options.traceDir, traceFilename(entry.id, windowSeconds, policy));
        writeTraceFile(target, records, options.comment);
        written.push(target);
      }
    }
  }
  return written;
}
