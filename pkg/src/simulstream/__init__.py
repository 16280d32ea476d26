"""Simultaneous speech translation over incremental re-queries.

Audio arrives in fixed windows and accumulates in a frame buffer; an
offline speech-translation backend is re-queried over the whole buffer
with the already-committed text as context, and a policy decides per
hypothesis whether to speak it (committing it and clearing the buffer) or
wait for more audio. Quality is scored with corpus BLEU, latency with
average lagging, optionally computation-aware.
"""

from .backends import (
    MockTTS,
    ProcessClient,
    ProcessSTBackend,
    ProcessTTSBackend,
    RecordingSTBackend,
    RemoteTTS,
    SpeechRequest,
    SpeechResult,
    STBackend,
    TraceBackend,
    TraceEntry,
    TranslationRequest,
    TTSBackend,
    encode_pcm16,
    trace_filename,
    trace_load,
    write_trace,
)
from .core import (
    CANONICAL_SAMPLE_RATE,
    AudioChunk,
    AudioStream,
    FrameBuffer,
    Hypothesis,
    Transcript,
    TranscriptSegment,
    load_wav,
    save_wav,
)
from .errors import (
    AudioFormatError,
    ContiguityError,
    EmptySegmentError,
    IncompleteLogError,
    MalformedTraceError,
    ManifestError,
    PipelineError,
    PolicyConfigError,
    ProtocolError,
    SimulstreamError,
    TraceDivergenceError,
    TraceExhaustedError,
    TranscriptOrderError,
    TransportError,
)
from .harness import (
    CellMetrics,
    ManifestEntry,
    ReportRow,
    RunOutcome,
    SweepSpec,
    emit_report,
    evaluate_outcomes,
    filter_entries,
    load_manifest,
    metrics_from_logs,
    record_traces,
    render_csv,
    render_markdown,
    run_cell,
    run_entry,
    run_sweep,
    trace_st_factory,
)
from .metrics import (
    BleuScore,
    DelaySequence,
    average_lagging,
    corpus_bleu,
    delays_from_log,
    levenshtein,
    normalize_whitespace,
    normalized_edit_distance,
    tokenize_13a,
)
from .pipeline import (
    ChunkReceived,
    Decision,
    Emission,
    HypothesisSummary,
    PipelineConfig,
    QueryFinished,
    QueryStarted,
    RunLog,
    SpeechFinished,
    StreamEnded,
    run,
    slice_stream,
)
from .policies import (
    Action,
    PolicyConfig,
    PolicyDecision,
    PolicyInput,
    PolicyKind,
    decide,
    parse_policy,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "AudioChunk",
    "AudioFormatError",
    "AudioStream",
    "BleuScore",
    "CANONICAL_SAMPLE_RATE",
    "CellMetrics",
    "ChunkReceived",
    "ContiguityError",
    "Decision",
    "DelaySequence",
    "Emission",
    "EmptySegmentError",
    "FrameBuffer",
    "Hypothesis",
    "HypothesisSummary",
    "IncompleteLogError",
    "MalformedTraceError",
    "ManifestEntry",
    "ManifestError",
    "MockTTS",
    "PipelineConfig",
    "PipelineError",
    "PolicyConfig",
    "PolicyConfigError",
    "PolicyDecision",
    "PolicyInput",
    "PolicyKind",
    "ProcessClient",
    "ProcessSTBackend",
    "ProcessTTSBackend",
    "ProtocolError",
    "QueryFinished",
    "QueryStarted",
    "RecordingSTBackend",
    "RemoteTTS",
    "ReportRow",
    "RunLog",
    "RunOutcome",
    "STBackend",
    "SimulstreamError",
    "SpeechFinished",
    "SpeechRequest",
    "SpeechResult",
    "StreamEnded",
    "SweepSpec",
    "TTSBackend",
    "TraceBackend",
    "TraceDivergenceError",
    "TraceEntry",
    "TraceExhaustedError",
    "Transcript",
    "TranscriptOrderError",
    "TranscriptSegment",
    "TranslationRequest",
    "TransportError",
    "average_lagging",
    "corpus_bleu",
    "decide",
    "delays_from_log",
    "emit_report",
    "encode_pcm16",
    "evaluate_outcomes",
    "filter_entries",
    "levenshtein",
    "load_manifest",
    "load_wav",
    "metrics_from_logs",
    "normalize_whitespace",
    "normalized_edit_distance",
    "parse_policy",
    "record_traces",
    "render_csv",
    "render_markdown",
    "run",
    "run_cell",
    "run_entry",
    "run_sweep",
    "save_wav",
    "slice_stream",
    "tokenize_13a",
    "trace_filename",
    "trace_load",
    "trace_st_factory",
    "write_trace",
]
