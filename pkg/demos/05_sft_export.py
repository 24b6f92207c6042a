#!/usr/bin/env python3
"""
Exporting fine-tuning data
==========================

Fine-tuning happens outside this package, on GPU infrastructure, so the
harness only emits the data: one JSONL line per instance with the full
rendered instruction and the gold answer as a string, plus a metadata
sidecar freezing the training hyperparameters. The two-stage variant
writes an English dataset first and a target-language dataset second,
with a plan file tying them together.
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
    "strategy": "export_sft",
    "seed": 42,
    "output_dir": str(workdir / "sft"),
    "dataset": {"train": str(DATA / "eng_train.csv")},
})
run(config)

lines = (config.output_dir / "sft.jsonl").read_text(encoding="utf-8").splitlines()
meta = json.loads((config.output_dir / "sft.meta.json").read_text(encoding="utf-8"))
print(f"wrote {len(lines)} instruction/output pairs")
first = json.loads(lines[0])
print("first instruction:", first["instruction"][:80] + "...")
print("first output:", first["output"])
print("hyperparameters:", meta["hyperparameters"])

# Two-stage export: train on English first, then continue on the target
# language. Stage one uses the English emotion set, stage two the target's.
config = validate_config({
    "track": "A",
    "language": "deu",
    "strategy": "export_ebridge",
    "seed": 42,
    "output_dir": str(workdir / "bridge"),
    "dataset": {
        "train": str(DATA / "deu_train.csv"),
        "english_train": str(DATA / "eng_train.csv"),
    },
    "oversample": False,
})
run(config)

plan = json.loads((config.output_dir / "plan.json").read_text(encoding="utf-8"))
print("\ntwo-stage plan:")
for stage in plan["stages"]:
    print(f"  stage {stage['stage']}: {stage['language']} x {stage['instances']} instances "
          f"-> {stage['dataset']}")
