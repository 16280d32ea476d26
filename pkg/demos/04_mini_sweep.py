"""
Mini sweep: a quality/latency grid plus record-and-replay
=========================================================

A sweep runs every utterance of a dataset through each (policy, window)
cell and pools BLEU and average lagging per cell. Backends are usually
expensive, so the harness can record every model answer to a trace file
the first time and replay the sweep later without the model.
"""

import tempfile
from pathlib import Path

from simulstream import (
    MockTTS,
    SweepSpec,
    emit_report,
    load_manifest,
    parse_policy,
    record_traces,
    run_sweep,
    trace_st_factory,
)
from simulstream.synthetic import SyntheticSTBackend, make_corpus, write_dataset

workdir = Path(tempfile.mkdtemp(prefix="simulstream_demo_"))

# build a small dataset on disk: wav files plus a tab-separated manifest
corpus = make_corpus(4)
manifest_path = write_dataset(workdir / "dataset", corpus)
entries = load_manifest(manifest_path)
print(f"dataset: {len(entries)} utterances under {workdir / 'dataset'}")

# the backend factory gets (entry, window, policy); the synthetic model
# only needs to know which utterance it is pretending to transcribe
by_id = {u.id: u for u in corpus}


def synthetic_factory(entry, window, policy):
    return SyntheticSTBackend(by_id[entry.id])


spec = SweepSpec(
    windows=(1.0, 2.0),
    policies=tuple(parse_policy(s) for s in ("greedy", "offline", "cap:0.9")),
    min_duration=6.0,
    limit=4,
)

# live sweep straight against the backend
rows = run_sweep(entries, spec, synthetic_factory, MockTTS)
print("\n" + emit_report(rows, "markdown"))

# record one trace file per (utterance, window, policy) ...
trace_dir = workdir / "traces"
written = record_traces(entries, spec.windows, spec.policies, synthetic_factory,
                        MockTTS, trace_dir)
print(f"recorded {len(written)} trace files to {trace_dir}")

# ... and replay the sweep from them: same report, no model in the loop
replayed = run_sweep(entries, spec, trace_st_factory(trace_dir), MockTTS)
assert emit_report(replayed, "csv") == emit_report(rows, "csv")
print("replayed sweep from traces: report is identical")
