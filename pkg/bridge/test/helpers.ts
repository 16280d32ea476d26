// Shared fixtures: deterministic audio without any model or RNG dependency.

import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { writeWav, type Pcm } from "../src/audio.js";

export const RATE = 16000;

export function silence(seconds: number): Pcm {
  return { samples: new Float32Array(Math.round(seconds * RATE)), sampleRate: RATE };
}

/** Loud deterministic pseudo-speech: every frame is voiced. */
export function voiced(seconds: number, amplitude = 0.4): Pcm {
  const samples = new Float32Array(Math.round(seconds * RATE));
  for (let i = 0; i < samples.length; i++) {
    samples[i] = amplitude * Math.sin(i * 0.31) * (0.7 + 0.3 * Math.sin(i * 0.013));
  }
  return { samples, sampleRate: RATE };
}

/** Voiced audio with a silent gap in the middle. */
export function voicedWithGap(voicedHead: number, gap: number, voicedTail: number): Pcm {
  const head = voiced(voicedHead);
  const mid = silence(gap);
  const tail = voiced(voicedTail, 0.3);
  const samples = new Float32Array(head.samples.length + mid.samples.length + tail.samples.length);
  samples.set(head.samples, 0);
  samples.set(mid.samples, head.samples.length);
  samples.set(tail.samples, head.samples.length + mid.samples.length);
  return { samples, sampleRate: RATE };
}

export function tempDir(prefix: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), prefix));
}

export interface DatasetOnDisk {
  root: string;
  manifestPath: string;
}

/** Write wav files plus a manifest the recorder (and the replayer) can read. */
export function writeDataset(
  entries: { id: string; pcm: Pcm; reference?: string; language?: string }[],
): DatasetOnDisk {
  const root = tempDir("bridge-dataset-");
  fs.mkdirSync(path.join(root, "audio"));
  const rows = ["id\taudio_path\tduration_seconds\tsource_text\treference_translation\tlanguage"];
  for (const entry of entries) {
    const rel = path.join("audio", `${entry.id}.wav`);
    writeWav(path.join(root, rel), entry.pcm);
    const duration = entry.pcm.samples.length / entry.pcm.sampleRate;
    rows.push(
      [
        entry.id,
        rel,
        String(duration),
        "texto de origen",
        entry.reference ?? "reference words here",
        entry.language ?? "es",
      ].join("\t"),
    );
  }
  const manifestPath = path.join(root, "manifest.tsv");
  fs.writeFileSync(manifestPath, rows.join("\n") + "\n", "utf-8");
  return { root, manifestPath };
}
