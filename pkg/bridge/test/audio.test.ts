import * as fs from "node:fs";
import * as path from "node:path";

import { describe, expect, it } from "vitest";

import {
  decodePcm16Base64,
  durationSeconds,
  encodePcm16Base64,
  readWav,
  writeWav,
} from "../src/audio.js";
import { silence, tempDir, voiced, RATE } from "./helpers.js";

describe("pcm16 base64 round trip", () => {
  it("recovers samples within half a quantization step", () => {
    const original = voiced(0.25);
    const decoded = decodePcm16Base64(encodePcm16Base64(original.samples));
    expect(decoded.length).toBe(original.samples.length);
    for (let i = 0; i < decoded.length; i++) {
      expect(Math.abs(decoded[i] - original.samples[i])).toBeLessThanOrEqual(0.5 / 32767);
    }
  });

  it("clips out-of-range samples instead of wrapping", () => {
    const decoded = decodePcm16Base64(encodePcm16Base64(new Float32Array([2.0, -2.0])));
    expect(decoded[0]).toBeCloseTo(1.0, 6);
    expect(decoded[1]).toBeCloseTo(-1.0, 6);
  });

  it("rejects odd-length payloads", () => {
    expect(() => decodePcm16Base64(Buffer.from([1, 2, 3]).toString("base64"))).toThrow(
      /odd byte count/,
    );
  });
});

describe("wav files", () => {
  it("round-trips mono 16 kHz audio", () => {
    const dir = tempDir("bridge-audio-");
    const target = path.join(dir, "tone.wav");
    const original = voiced(0.5);
    writeWav(target, original);
    const loaded = readWav(target);
    expect(loaded.sampleRate).toBe(RATE);
    expect(loaded.samples.length).toBe(original.samples.length);
    for (let i = 0; i < loaded.samples.length; i += 97) {
      expect(Math.abs(loaded.samples[i] - original.samples[i])).toBeLessThanOrEqual(0.5 / 32767);
    }
  });

  it("resamples other rates to the canonical one", () => {
    const dir = tempDir("bridge-audio-");
    const target = path.join(dir, "slow.wav");
    const samples = new Float32Array(8000); // one second at 8 kHz
    for (let i = 0; i < samples.length; i++) samples[i] = 0.3 * Math.sin(i * 0.5);
    writeWav(target, { samples, sampleRate: 8000 });
    const loaded = readWav(target);
    expect(loaded.sampleRate).toBe(RATE);
    expect(loaded.samples.length).toBe(16000);
    expect(durationSeconds(loaded)).toBeCloseTo(1.0, 6);
  });

  it("rejects files that are not mono 16-bit PCM", () => {
    const dir = tempDir("bridge-audio-");
    const target = path.join(dir, "stereo.wav");
    const pcm = silence(0.1);
    writeWav(target, pcm);
    // flip the channel-count field in the fmt chunk to 2
    const buf = fs.readFileSync(target);
    buf.writeUInt16LE(2, 22);
    fs.writeFileSync(target, buf);
    expect(() => readWav(target)).toThrow(/mono/);
  });

  it("rejects non-wav bytes", () => {
    const dir = tempDir("bridge-audio-");
    const target = path.join(dir, "nope.wav");
    fs.writeFileSync(target, Buffer.from("just some text"));
    expect(() => readWav(target)).toThrow(/RIFF/);
  });
});
