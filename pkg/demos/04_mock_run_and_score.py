#!/usr/bin/env python3
"""
A full experiment run against a mock model
==========================================

The runner takes a validated config, renders one prompt per instance,
queries the model (here the built-in keyword mock, which answers from
the text itself), aggregates per-emotion answers back into label
vectors, and scores them against gold. Everything lands in an output
directory with a manifest of sha256 hashes, so reruns are comparable
byte for byte.
"""

import json
import tempfile
from pathlib import Path

from emoharness import run, validate_config

DATA = Path(__file__).parent / "data"
workdir = Path(tempfile.mkdtemp(prefix="emoharness_demo_"))

config = validate_config({
    "track": "A",
    "language": "eng",
    "strategy": "zero_shot",
    "seed": 42,
    "output_dir": str(workdir / "run"),
    "dataset": {"test": str(DATA / "eng_test.csv")},
    "mock": "keyword",
})

manifest = run(config)
print("output directory:", config.output_dir)
print("counts:", manifest.counts)

print("\nartifacts:")
for name, digest in sorted(manifest.artifacts.items()):
    print(f"  {name}: sha256 {digest[:16]}...")

print("\n" + (config.output_dir / "report.txt").read_text(encoding="utf-8"))

# The report is plain JSON, easy to post-process.
report = json.loads((config.output_dir / "report.json").read_text(encoding="utf-8"))
weakest = min(report["per_emotion"], key=report["per_emotion"].get)
print(f"weakest emotion: {weakest} ({report['per_emotion'][weakest]:.3f})")
