// Audio plumbing: 16-bit little-endian PCM over the wire and in wav files,
// normalized to float32 in [-1, 1] by dividing by 32767 (so a full-scale
// sample round-trips exactly).

import * as fs from "node:fs";

export const CANONICAL_SAMPLE_RATE = 16000;

export interface Pcm {
  samples: Float32Array;
  sampleRate: number;
}

export function durationSeconds(pcm: Pcm): number {
  return pcm.samples.length / pcm.sampleRate;
}

/** Base64 of s16le PCM -> normalized floats. */
export function decodePcm16Base64(b64: string): Float32Array {
  const buf = Buffer.from(b64, "base64");
  if (buf.length % 2 !== 0) {
    throw new Error(`PCM payload has odd byte count ${buf.length}`);
  }
  const out = new Float32Array(buf.length / 2);
  for (let i = 0; i < out.length; i++) {
    out[i] = buf.readInt16LE(i * 2) / 32767;
  }
  return out;
}

/** Normalized floats -> base64 of s16le PCM (clipped to [-1, 1]). */
export function encodePcm16Base64(samples: Float32Array): string {
  const buf = Buffer.alloc(samples.length * 2);
  for (let i = 0; i < samples.length; i++) {
    const clipped = Math.min(1, Math.max(-1, samples[i]));
    buf.writeInt16LE(Math.round(clipped * 32767), i * 2);
  }
  return buf.toString("base64");
}

function linearResample(samples: Float32Array, rate: number, targetRate: number): Float32Array {
  const nOut = Math.round((samples.length * targetRate) / rate);
  const out = new Float32Array(nOut);
  for (let i = 0; i < nOut; i++) {
    // sample the source signal at this output instant, interpolating
    const t = (i / targetRate) * rate;
    const lo = Math.floor(t);
    const hi = Math.min(lo + 1, samples.length - 1);
    const frac = t - lo;
    out[i] = samples[Math.min(lo, samples.length - 1)] * (1 - frac) + samples[hi] * frac;
  }
  return out;
}

/**
 * Read a RIFF/WAVE file holding mono 16-bit PCM.
 *
 * Other sample rates are linearly resampled to targetRate, matching how the
 * replaying pipeline loads the same file, so per-chunk durations agree.
 */
export function readWav(path: string, targetRate: number = CANONICAL_SAMPLE_RATE): Pcm {
  const buf = fs.readFileSync(path);
  if (buf.length < 12 || buf.toString("ascii", 0, 4) !== "RIFF" || buf.toString("ascii", 8, 12) !== "WAVE") {
    throw new Error(`${path}: not a RIFF/WAVE file`);
  }
  let offset = 12;
  let sampleRate = 0;
  let dataStart = -1;
  let dataLength = 0;
  while (offset + 8 <= buf.length) {
    const chunkId = buf.toString("ascii", offset, offset + 4);
    const chunkSize = buf.readUInt32LE(offset + 4);
    if (chunkId === "fmt ") {
      const audioFormat = buf.readUInt16LE(offset + 8);
      const channels = buf.readUInt16LE(offset + 10);
      const bits = buf.readUInt16LE(offset + 22);
      if (audioFormat !== 1) {
        throw new Error(`${path}: expected PCM (format 1), got format ${audioFormat}`);
      }
      if (channels !== 1) {
        throw new Error(`${path}: expected mono audio, got ${channels} channels`);
      }
      if (bits !== 16) {
        throw new Error(`${path}: expected 16-bit PCM, got ${bits}-bit`);
      }
      sampleRate = buf.readUInt32LE(offset + 12);
    } else if (chunkId === "data") {
      dataStart = offset + 8;
      dataLength = Math.min(chunkSize, buf.length - dataStart);
    }
    // chunks are word-aligned: odd sizes carry one pad byte
    offset += 8 + chunkSize + (chunkSize % 2);
  }
  if (sampleRate === 0 || dataStart < 0) {
    throw new Error(`${path}: missing fmt or data chunk`);
  }
  let samples: Float32Array = new Float32Array(dataLength / 2);
  for (let i = 0; i < samples.length; i++) {
    samples[i] = buf.readInt16LE(dataStart + i * 2) / 32767;
  }
  if (sampleRate !== targetRate && samples.length > 0) {
    samples = linearResample(samples, sampleRate, targetRate);
    sampleRate = targetRate;
  }
  return { samples, sampleRate };
}

/** Write mono 16-bit PCM as a minimal RIFF/WAVE file. */
export function writeWav(path: string, pcm: Pcm): void {
  const dataLength = pcm.samples.length * 2;
  const buf = Buffer.alloc(44 + dataLength);
  buf.write("RIFF", 0, "ascii");
  buf.writeUInt32LE(36 + dataLength, 4);
  buf.write("WAVE", 8, "ascii");
  buf.write("fmt ", 12, "ascii");
  buf.writeUInt32LE(16, 16); // fmt chunk size
  buf.writeUInt16LE(1, 20); // PCM
  buf.writeUInt16LE(1, 22); // mono
  buf.writeUInt32LE(pcm.sampleRate, 24);
  buf.writeUInt32LE(pcm.sampleRate * 2, 28); // byte rate
  buf.writeUInt16LE(2, 32); // block align
  buf.writeUInt16LE(16, 34); // bits per sample
  buf.write("data", 36, "ascii");
  buf.writeUInt32LE(dataLength, 40);
  for (let i = 0; i < pcm.samples.length; i++) {
    const clipped = Math.min(1, Math.max(-1, pcm.samples[i]));
    buf.writeInt16LE(Math.round(clipped * 32767), 44 + i * 2);
  }
  fs.writeFileSync(path, buf);
}
