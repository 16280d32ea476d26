"""
Latency metrics: average lagging by hand and from a run log
===========================================================

Average lagging compares when each output token was committed against
an ideal translator that paces its output evenly across the source.
The computation-aware variant charges model compute and synthesis time
too, so a slow backend shows up in the number even when its decisions
are identical.
"""

from simulstream import (
    DelaySequence,
    MockTTS,
    PipelineConfig,
    average_lagging,
    delays_from_log,
    parse_policy,
    run,
)
from simulstream.synthetic import SyntheticSTBackend, make_utterance, synth_wave

# --- by hand -----------------------------------------------------------------
# four output tokens over 4 s of source, each committed one second after
# the ideal translator would have produced it: the lagging is that second
d = DelaySequence(delays=(1.0, 2.0, 3.0, 4.0), source_duration=4.0,
                  reference_token_count=4)
print(f"evenly late by 1s     -> AL = {average_lagging(d):.3f}s")

# a single token held to the very end of a 5 s stream: maximal lagging
d = DelaySequence(delays=(5.0,), source_duration=5.0, reference_token_count=1)
print(f"one token at the end  -> AL = {average_lagging(d):.3f}s")

# once a delay reaches the full source duration, later tokens stop
# counting: the translator is just flushing after the source finished
d = DelaySequence(delays=(4.0, 4.0), source_duration=4.0, reference_token_count=2)
print(f"flush after the end   -> AL = {average_lagging(d):.3f}s")

# --- from a run log ------------------------------------------------------------
utterance = make_utterance(6)
stream = synth_wave(utterance)
reference = " ".join(utterance.target_words)

config = PipelineConfig(window_seconds=1.0, policy=parse_policy("cap:0.8"))
transcript, log = run(stream, config, SyntheticSTBackend(utterance), MockTTS())

# "source" timestamps each token by audio consumed when it was spoken;
# "computation_aware" timestamps it by the wall clock of the run
al = average_lagging(delays_from_log(log, "source", reference))
al_ca = average_lagging(delays_from_log(log, "computation_aware", reference))

print(f"\n{utterance.id}: {stream.duration:.2f}s source, "
      f"{len(transcript)} segments committed")
print(f"AL    = {al:.3f}s   (decision lag only)")
print(f"AL_CA = {al_ca:.3f}s   (decision lag + compute + synthesis)")
print("AL_CA >= AL always; the gap is what the cascade itself costs.")
