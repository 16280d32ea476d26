"""Speak/wait decision policies.

Four policies decide whether a candidate translation is committed and
spoken or discarded until more source audio arrives:

- greedy: always speak (the wait-k-style minimal-latency baseline).
- offline: never speak mid-stream; output appears only at the final flush.
- confidence_aware: speak when model confidence (1 - no_speech_prob)
  reaches the threshold gamma. Higher gamma is stricter.
- consensus: speak when the current and previous hypotheses agree, i.e.
  their normalized character edit distance is at most alpha. Lower alpha
  is stricter.

All policies wait on blank hypotheses and speak at end of stream when the
hypothesis is non-empty, so every run flushes to a complete transcript.
``decide`` is a pure function: the same config and input always produce
the same decision.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .core import Hypothesis
from .errors import PolicyConfigError
from .metrics import normalize_whitespace, normalized_edit_distance


class PolicyKind(Enum):
    GREEDY = "greedy"
    OFFLINE = "offline"
    CONFIDENCE_AWARE = "cap"
    CONSENSUS = "cp"


class Action(Enum):
    SPEAK = "speak"
    WAIT = "wait"


@dataclass(frozen=True)
class PolicyConfig:
    kind: PolicyKind
    gamma: float | None = None  # confidence threshold, confidence_aware only
    alpha: float | None = None  # agreement threshold, consensus only

    def __post_init__(self):
        if self.kind is PolicyKind.CONFIDENCE_AWARE:
            if self.gamma is None:
                raise PolicyConfigError("confidence_aware policy requires gamma")
            if not 0.0 <= self.gamma <= 1.0:
                raise PolicyConfigError(f"gamma must be in [0, 1], got {self.gamma}")
        elif self.gamma is not None:
            raise PolicyConfigError(f"{self.kind.value} policy does not take gamma")
        if self.kind is PolicyKind.CONSENSUS:
            if self.alpha is None:
                raise PolicyConfigError("consensus policy requires alpha")
            if self.alpha < 0:
                raise PolicyConfigError(f"alpha must be >= 0, got {self.alpha}")
        elif self.alpha is not None:
            raise PolicyConfigError(f"{self.kind.value} policy does not take alpha")

    def label(self) -> str:
        """Human-readable label used in report rows."""
        if self.kind is PolicyKind.GREEDY:
            return "Greedy"
        if self.kind is PolicyKind.OFFLINE:
            return "Offline"
        if self.kind is PolicyKind.CONFIDENCE_AWARE:
            return f"CAP (gamma={self.gamma:g})"
        return f"CP (alpha={self.alpha:g})"

    def slug(self) -> str:
        """Filesystem-safe identifier used in trace/runlog file names."""
        if self.kind is PolicyKind.CONFIDENCE_AWARE:
            return f"cap{self.gamma:g}"
        if self.kind is PolicyKind.CONSENSUS:
            return f"cp{self.alpha:g}"
        return self.kind.value


@dataclass(frozen=True)
class PolicyInput:
    """What a policy sees for one query.

    ``previous`` is the hypothesis from the immediately preceding query and
    resets to None after every commit (and at stream start).
    """

    current: Hypothesis
    previous: Hypothesis | None
    buffer_duration: float
    end_of_stream: bool


@dataclass(frozen=True)
class PolicyDecision:
    action: Action
    reason: str

    @property
    def speak(self) -> bool:
        return self.action is Action.SPEAK


def decide(config: PolicyConfig, input: PolicyInput) -> PolicyDecision:
    """Apply the configured policy to one hypothesis."""
    text = normalize_whitespace(input.current.text)
    if not text:
        return PolicyDecision(Action.WAIT, "empty hypothesis")
    if input.end_of_stream:
        return PolicyDecision(Action.SPEAK, "end-of-stream flush")

    kind = config.kind
    if kind is PolicyKind.GREEDY:
        return PolicyDecision(Action.SPEAK, "greedy")
    if kind is PolicyKind.OFFLINE:
        return PolicyDecision(Action.WAIT, "offline")
    if kind is PolicyKind.CONFIDENCE_AWARE:
        confidence = 1.0 - input.current.no_speech_prob
        if confidence >= config.gamma:
            return PolicyDecision(
                Action.SPEAK, f"confidence {confidence:.3f} >= {config.gamma:g}"
            )
        return PolicyDecision(
            Action.WAIT, f"confidence {confidence:.3f} < {config.gamma:g}"
        )
    # consensus
    if input.previous is None:
        return PolicyDecision(Action.WAIT, "no previous hypothesis")
    distance = normalized_edit_distance(
        normalize_whitespace(input.previous.text), text
    )
    if distance <= config.alpha:
        return PolicyDecision(
            Action.SPEAK, f"edit distance {distance:.3f} <= {config.alpha:g}"
        )
    return PolicyDecision(Action.WAIT, f"edit distance {distance:.3f} > {config.alpha:g}")


def parse_policy(spec: str, gamma: float | None = None, alpha: float | None = None) -> PolicyConfig:
    """Parse a policy spec string like ``greedy``, ``cap:0.9`` or ``cp:0.5``.

    Explicit ``gamma``/``alpha`` arguments override values embedded in the
    spec; they exist so CLI flags can be passed through directly.
    """
    name, _, param = spec.strip().lower().partition(":")
    if param:
        try:
            value = float(param)
        except ValueError:
            raise PolicyConfigError(f"bad policy parameter in {spec!r}") from None
        if name == "cap":
            gamma = value if gamma is None else gamma
        elif name == "cp":
            alpha = value if alpha is None else alpha
        else:
            raise PolicyConfigError(f"{name!r} policy does not take a parameter")
    if name == "greedy":
        return PolicyConfig(PolicyKind.GREEDY)
    if name == "offline":
        return PolicyConfig(PolicyKind.OFFLINE)
    if name == "cap":
        return PolicyConfig(PolicyKind.CONFIDENCE_AWARE, gamma=gamma)
    if name == "cp":
        return PolicyConfig(PolicyKind.CONSENSUS, alpha=alpha)
    raise PolicyConfigError(f"unknown policy {spec!r}")
