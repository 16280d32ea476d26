// Runtime configuration shared by the engine, the synthesizer and the server.

export type TtsMode = "local" | "remote" | "stub";

export interface BridgeConfig {
  /** Model selector; "stub" runs the built-in deterministic fake. */
  modelSize: string;
  /** Compute device identifier, forwarded to real model adapters. */
  device: string;
  ttsMode: TtsMode;
  /** Name of the environment variable holding the remote synthesis key. */
  apiKeyEnv: string;
  /** Endpoint for remote synthesis; required only when ttsMode is "remote". */
  ttsEndpoint?: string;
}

export const DEFAULT_CONFIG: BridgeConfig = {
  modelSize: "stub",
  device: "cpu",
  ttsMode: "stub",
  apiKeyEnv: "SIMULSTREAM_TTS_API_KEY",
};
