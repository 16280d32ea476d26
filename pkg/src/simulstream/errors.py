"""Exception types shared across the package."""


class SimulstreamError(Exception):
    """Base class for all errors raised by this package."""


class AudioFormatError(SimulstreamError):
    """Unsupported audio encoding or sample-rate mismatch within a stream."""


class ContiguityError(SimulstreamError):
    """Chunk does not start where the frame buffer ends."""


class TranscriptOrderError(SimulstreamError):
    """Segment violates the transcript's monotonic timestamp order."""


class EmptySegmentError(SimulstreamError):
    """Attempt to commit a segment with no text."""


class PolicyConfigError(SimulstreamError):
    """Policy parameters inconsistent with the selected policy kind."""


class TransportError(SimulstreamError):
    """Backend unreachable or the backend reported a failure (retriable for TTS)."""


class ProtocolError(SimulstreamError):
    """Backend response violates the wire protocol."""


class MalformedTraceError(SimulstreamError):
    """Trace file fails structural validation (gaps, duplicates, bad JSON)."""


class TraceDivergenceError(SimulstreamError):
    """Live request does not match what the trace was recorded under."""


class TraceExhaustedError(SimulstreamError):
    """More queries issued than the trace holds."""


class IncompleteLogError(SimulstreamError):
    """Run log is missing its terminal event."""


class ManifestError(SimulstreamError):
    """Dataset manifest cannot be parsed."""


class PipelineError(SimulstreamError):
    """A run aborted before the stream completed."""
