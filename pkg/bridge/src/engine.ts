// Speech-translation engines. The stub is fully deterministic: same audio
// and prior always yield the same hypothesis, so recorded traces and tests
// are reproducible. A real model can be plugged in behind the same
// interface; it is loaded lazily and failures abort startup loudly.

import type { BridgeConfig } from "./config.js";

export interface TranslateArgs {
  samples: Float32Array;
  sampleRate: number;
  priorText: string;
  language: string;
}

export interface EngineResult {
  text: string;
  avg_logprob: number;
  no_speech_prob: number;
  compute_seconds: number;
}

export interface Engine {
  translate(args: TranslateArgs): Promise<EngineResult>;
  close(): Promise<void>;
}

const LEXICON = [
  "agua", "tierra", "viento", "fuego", "norte", "sur", "este", "oeste",
  "casa", "puente", "campo", "valle", "luz", "sombra", "voz", "tiempo",
  "mar", "cielo", "piedra", "camino", "flor", "noche", "lluvia", "sol",
];

const FRAME_SECONDS = 0.1;
const VOICED_RMS = 0.01;
const SECONDS_PER_WORD = 0.6;

export interface StubEngineOptions {
  /** Simulated model latency charged per second of buffered audio. */
  computeSecondsPerBufferSecond?: number;
  /** Fixed part of the simulated model latency. */
  computeSecondsBase?: number;
}

export class StubEngine implements Engine {
  private readonly computePerSecond: number;
  private readonly computeBase: number;

  constructor(options: StubEngineOptions = {}) {
    this.computePerSecond = options.computeSecondsPerBufferSecond ?? 0.005;
    this.computeBase = options.computeSecondsBase ?? 0.01;
  }

  async translate(args: TranslateArgs): Promise<EngineResult> {
    const { samples, sampleRate } = args;
    const frameLength = Math.max(1, Math.round(FRAME_SECONDS * sampleRate));
    let voicedFrames = 0;
    let frames = 0;
    let energySum = 0;
    for (let start = 0; start < samples.length; start += frameLength) {
      const end = Math.min(start + frameLength, samples.length);
      let sq = 0;
      for (let i = start; i < end; i++) sq += samples[i] * samples[i];
      const rms = Math.sqrt(sq / (end - start));
      frames++;
      energySum += rms;
      if (rms > VOICED_RMS) voicedFrames++;
    }
    const meanRms = frames > 0 ? energySum / frames : 0;
    const voicedSeconds = voicedFrames * FRAME_SECONDS;

    // words appear at a fixed rate within the voiced part; which words is
    // a pure function of the buffer's opening samples, so consecutive
    // queries over a growing buffer keep a stable prefix
    const wordCount = Math.floor(voicedSeconds / SECONDS_PER_WORD);
    let seed = 2166136261;
    const anchor = Math.min(samples.length, sampleRate); // first second only
    for (let i = 0; i < anchor; i += 160) {
      seed = (seed ^ Math.round((samples[i] + 1) * 1000)) >>> 0;
      seed = Math.imul(seed, 16777619) >>> 0;
    }
    const words: string[] = [];
    for (let i = 0; i < wordCount; i++) {
      words.push(LEXICON[(seed + i * 2654435761) % LEXICON.length]);
    }

    const noSpeechProb = Math.min(1, Math.max(0, 1 / (1 + 40 * meanRms)));
    const bufferSeconds = samples.length / sampleRate;
    return {
      text: voicedSeconds >= 0.3 ? words.join(" ") : "",
      avg_logprob: -(0.2 + 0.5 * noSpeechProb),
      no_speech_prob: noSpeechProb,
      compute_seconds: this.computeBase + this.computePerSecond * bufferSeconds,
    };
  }

  async close(): Promise<void> {}
}

// Adapter for a real offline speech-translation model. The import is
// dynamic so the stub path needs no model dependencies installed.
class TransformersEngine implements Engine {
  private constructor(
    private readonly pipe: (audio: Float32Array, options: object) => Promise<unknown>,
    private readonly language: string | undefined,
  ) {}

  static async load(modelSize: string, device: string): Promise<TransformersEngine> {
    let mod: any;
    try {
      const specifier = "@xenova/transformers"; // optional; resolved at runtime
      mod = await import(specifier);
    } catch (e) {
      throw new Error(
        `model "${modelSize}" needs the optional @xenova/transformers dependency: ${e}`,
      );
    }
    const pipe = await mod.pipeline(
      "automatic-speech-recognition",
      `Xenova/whisper-${modelSize}`,
      { device },
    );
    return new TransformersEngine(pipe, undefined);
  }

  async translate(args: TranslateArgs): Promise<EngineResult> {
    const started = process.hrtime.bigint();
    const output: any = await this.pipe(args.samples, {
      language: args.language === "auto" ? undefined : args.language,
      task: "translate",
      initial_prompt: args.priorText || undefined,
      return_timestamps: false,
    });
    const elapsed = Number(process.hrtime.bigint() - started) / 1e9;
    // segment metadata is averaged when the model returns several segments
    const segments: any[] = Array.isArray(output?.chunks) ? output.chunks : [];
    const mean = (key: string, fallback: number) => {
      const values = segments
        .map((s) => s?.[key])
        .filter((v): v is number => typeof v === "number");
      if (values.length === 0) return fallback;
      return values.reduce((a, b) => a + b, 0) / values.length;
    };
    return {
      text: typeof output?.text === "string" ? output.text.trim() : "",
      avg_logprob: mean("avg_logprob", -0.5),
      no_speech_prob: Math.min(1, Math.max(0, mean("no_speech_prob", 0.0))),
      compute_seconds: elapsed,
    };
  }

  async close(): Promise<void> {}
}

export async function createEngine(config: BridgeConfig): Promise<Engine> {
  if (config.modelSize === "stub") {
    return new StubEngine();
  }
  return TransformersEngine.load(config.modelSize, config.device);
}
