// Speech synthesis backends. The stub mirrors the replaying pipeline's mock
// (duration linear in character count) so stub-mode traces are comparable
// with its local runs. Local mode shells out to espeak; remote mode POSTs
// to a hosted service and needs an API key in the environment.

import { spawn, spawnSync } from "node:child_process";

import type { BridgeConfig } from "./config.js";

export interface SpeakResult {
  audio_duration: number;
  compute_seconds: number;
}

export interface Tts {
  speak(text: string): Promise<SpeakResult>;
  close(): Promise<void>;
}

export class StubTts implements Tts {
  constructor(private readonly secondsPerChar: number = 0.06) {}

  async speak(text: string): Promise<SpeakResult> {
    return { audio_duration: text.length * this.secondsPerChar, compute_seconds: 0 };
  }

  async close(): Promise<void> {}
}

export class LocalTts implements Tts {
  constructor(private readonly binary: string = "espeak") {
    const probe = spawnSync(this.binary, ["--version"], { stdio: "ignore" });
    if (probe.error || probe.status !== 0) {
      throw new Error(`local synthesis needs the ${this.binary} binary on PATH`);
    }
  }

  speak(text: string): Promise<SpeakResult> {
    const started = process.hrtime.bigint();
    return new Promise((resolve, reject) => {
      const child = spawn(this.binary, ["-q", "--stdout", text]);
      const parts: Buffer[] = [];
      child.stdout.on("data", (d: Buffer) => parts.push(d));
      child.on("error", reject);
      child.on("close", (code) => {
        if (code !== 0) {
          reject(new Error(`${this.binary} exited with ${code}`));
          return;
        }
        const wav = Buffer.concat(parts);
        if (wav.length < 44) {
          reject(new Error(`${this.binary} produced no audio`));
          return;
        }
        // duration from the wav header: data bytes / byte rate
        const byteRate = wav.readUInt32LE(28);
        const audioSeconds = (wav.length - 44) / byteRate;
        const elapsed = Number(process.hrtime.bigint() - started) / 1e9;
        resolve({ audio_duration: audioSeconds, compute_seconds: elapsed });
      });
    });
  }

  async close(): Promise<void> {}
}

export class RemoteTts implements Tts {
  private readonly key: string;

  constructor(
    private readonly endpoint: string,
    apiKeyEnv: string,
    private readonly timeoutMs: number = 30000,
  ) {
    const key = process.env[apiKeyEnv];
    if (!key) {
      throw new Error(`remote synthesis disabled: set ${apiKeyEnv} to enable it`);
    }
    this.key = key;
  }

  async speak(text: string): Promise<SpeakResult> {
    const started = process.hrtime.bigint();
    const response = await fetch(this.endpoint, {
      method: "POST",
      headers: {
        "Content-Type": "application/json",
        Authorization: `Bearer ${this.key}`,
      },
      body: JSON.stringify({ text }),
      signal: AbortSignal.timeout(this.timeoutMs),
    });
    if (!response.ok) {
      throw new Error(`remote synthesis failed: HTTP ${response.status}`);
    }
    const body: any = await response.json();
    const duration = Number(body?.audio_duration);
    if (!Number.isFinite(duration)) {
      throw new Error(`remote synthesis response malformed: ${JSON.stringify(body)}`);
    }
    const fallback = Number(process.hrtime.bigint() - started) / 1e9;
    const compute = Number.isFinite(Number(body?.compute_seconds))
      ? Number(body.compute_seconds)
      : fallback;
    return { audio_duration: duration, compute_seconds: compute };
  }

  async close(): Promise<void> {}
}

export function createTts(config: BridgeConfig): Tts {
  if (config.ttsMode === "stub") {
    return new StubTts();
  }
  if (config.ttsMode === "local") {
    return new LocalTts();
  }
  const endpoint = config.ttsEndpoint ?? process.env.SIMULSTREAM_TTS_ENDPOINT;
  if (!endpoint) {
    throw new Error("remote synthesis needs --tts-endpoint or SIMULSTREAM_TTS_ENDPOINT");
  }
  return new RemoteTts(endpoint, config.apiKeyEnv);
}
