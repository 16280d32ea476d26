"""
Streaming basics: windows, the frame buffer, and one greedy run
===============================================================

Audio reaches the translator in fixed-size windows. Each window is
appended to a frame buffer, the whole buffer is re-translated with the
already-committed text as context, and a policy decides whether to
commit (speak) the new hypothesis or wait for more audio. Speaking
clears the buffer, so the next query starts fresh.
"""

from simulstream import MockTTS, PipelineConfig, parse_policy, run, slice_stream
from simulstream.synthetic import SyntheticSTBackend, make_utterance, synth_wave

# a deterministic pretend recording, ~6-12 s of Spanish-labelled audio
utterance = make_utterance(3)
stream = synth_wave(utterance)
print(f"utterance {utterance.id}: {stream.duration:.2f}s, "
      f"reference: {' '.join(utterance.target_words)!r}")

# cutting the stream into 2 s windows; the tail window may be shorter
chunks = slice_stream(stream, window_seconds=2.0)
print(f"\n{len(chunks)} windows of audio:")
for chunk in chunks:
    print(f"  [{chunk.start_offset:5.2f}s .. {chunk.end_offset:5.2f}s]")

# run the full loop: greedy speaks every non-empty hypothesis
config = PipelineConfig(window_seconds=2.0, policy=parse_policy("greedy"))
transcript, log = run(stream, config, SyntheticSTBackend(utterance), MockTTS())

print("\nevent timeline:")
for event in log.events:
    print(f"  {event.at:7.3f}s  {type(event).__name__}")

print("\ncommitted transcript, one line per spoken segment:")
for segment in transcript:
    print(f"  @{segment.emitted_at:6.3f}s  {segment.text!r}")

print(f"\nfull text: {transcript.full_text()!r}")
