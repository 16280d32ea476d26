#!/usr/bin/env node
// Command-line entry: `serve` speaks the wire protocol over stdio until
// stdin closes; `record-trace` drives the model over a dataset and writes
// replayable trace files.

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { DEFAULT_CONFIG, type BridgeConfig, type TtsMode } from "./config.js";
import { createEngine } from "./engine.js";
import { loadManifest, recordTraces } from "./recorder.js";
import { parsePolicy } from "./policies.js";
import { serve } from "./server.js";

function configFrom(argv: {
  modelSize: string;
  device: string;
  tts: string;
  apiKeyEnv: string;
  ttsEndpoint?: string;
}): BridgeConfig {
  return {
    modelSize: argv.modelSize,
    device: argv.device,
    ttsMode: argv.tts as TtsMode,
    apiKeyEnv: argv.apiKeyEnv,
    ttsEndpoint: argv.ttsEndpoint,
  };
}

const modelOptions = {
  "model-size": {
    type: "string",
    default: DEFAULT_CONFIG.modelSize,
    describe: 'model selector; "stub" is the built-in deterministic fake',
  },
  device: { type: "string", default: DEFAULT_CONFIG.device },
} as const;

await yargs(hideBin(process.argv))
  .scriptName("simulstream-bridge")
  .command(
    "serve",
    "answer translate/speak requests over stdin/stdout",
    {
      ...modelOptions,
      tts: {
        choices: ["stub", "local", "remote"] as const,
        default: DEFAULT_CONFIG.ttsMode,
      },
      "api-key-env": { type: "string", default: DEFAULT_CONFIG.apiKeyEnv },
      "tts-endpoint": { type: "string" },
    },
    async (argv) => {
      await serve(configFrom(argv as any), process.stdin, process.stdout);
    },
  )
  .command(
    "record-trace",
    "run the chunk/decide loop over a dataset and write trace files",
    {
      ...modelOptions,
      manifest: { type: "string", demandOption: true, describe: "dataset manifest TSV" },
      "audio-root": { type: "string", describe: "base directory for audio paths" },
      "trace-dir": { type: "string", demandOption: true, describe: "output directory" },
      window: {
        type: "number",
        array: true,
        default: [1.0, 2.0],
        describe: "chunk sizes in seconds",
      },
      policy: {
        type: "string",
        array: true,
        default: ["greedy", "offline", "cap:0.9", "cp:0.75"],
      },
      "min-duration": { type: "number", default: 6.0 },
      limit: { type: "number", default: 75 },
    },
    async (argv) => {
      const config = configFrom({ ...(argv as any), tts: "stub", apiKeyEnv: DEFAULT_CONFIG.apiKeyEnv });
      const policies = (argv.policy as string[]).map(parsePolicy);
      const entries = loadManifest(argv.manifest as string, argv["audio-root"] as string | undefined)
        .filter((e) => e.durationSeconds >= (argv["min-duration"] as number))
        .sort((a, b) => (a.id < b.id ? -1 : a.id > b.id ? 1 : 0))
        .slice(0, argv.limit as number);
      if (entries.length === 0) {
        console.error("no utterances survive the filter");
        process.exitCode = 1;
        return;
      }
      const engine = await createEngine(config);
      try {
        const written = await recordTraces(entries, engine, {
          windows: argv.window as number[],
          policies,
          traceDir: argv["trace-dir"] as string,
          comment: `recorded by simulstream-bridge model=${config.modelSize} device=${config.device} (default decoding parameters)`,
        });
        console.error(`wrote ${written.length} trace files to ${argv["trace-dir"]}`);
      } finally {
        await engine.close();
      }
    },
  )
  .demandCommand(1)
  .strict()
  .fail((msg, err) => {
    console.error(err ? String(err.message ?? err) : msg);
    process.exit(1);
  })
  .parseAsync();
