"""Instruction-dataset export and staged fine-tuning plans.

Fine-tuning itself runs in external trainers; this module only writes the
JSONL datasets those trainers consume, plus sidecar metadata carrying the
training hyperparameters verbatim.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .corpus import TRACK_A, TRACK_B, TaskInstance, display_name
from .errors import ConfigError, ValidationError
from .prompting import render_zero_shot

#: Emitted into export metadata as-is; never interpreted by this package.
HYPERPARAMETERS = {
    "lora_rank": 32,
    "lora_alpha": 64,
    "dropout": 0.05,
    "max_len": 512,
    "epochs": 10,
    "batch_size": 2,
    "quantisation": "4-bit",
}

LEARNING_RATES = {"track_a": 2e-5, "track_b": 5e-5}

_TEMPLATE_TRACKS = {"track_a": TRACK_A, "track_b": TRACK_B}


@dataclass(frozen=True)
class SftExportConfig:
    """Template choice plus the hyperparameter block for the sidecar file."""

    template_id: str
    hyperparameters: dict

    def __post_init__(self):
        if self.template_id not in _TEMPLATE_TRACKS:
            raise ConfigError(f"unknown template id {self.template_id!r}")

    @classmethod
    def for_track(cls, track: str) -> "SftExportConfig":
        template_id = "track_a" if track == TRACK_A else "track_b"
        block = dict(HYPERPARAMETERS, learning_rate=LEARNING_RATES[template_id])
        return cls(template_id=template_id, hyperparameters=block)


@dataclass
class ExportSummary:
    dataset_path: Path
    metadata_path: Path
    instance_count: int


@dataclass
class EbridgePlan:
    """Two-stage fine-tuning plan: English first, then the target language."""

    stage1: ExportSummary
    stage2: ExportSummary
    plan_path: Path


def _write_json(path: Path, payload: dict) -> None:
    with path.open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def export_sft_dataset(
    instances: list[TaskInstance],
    config: SftExportConfig,
    out: str | Path,
    language_names: dict[str, str] | None = None,
) -> ExportSummary:
    """Write instances as instruction-tuning JSONL plus a metadata sidecar.

    Each line is ``{"instruction": <rendered prompt>, "output": <gold>}``
    with the gold label as a decimal string. The sidecar (same stem,
    ``.meta.json``) records the hyperparameter block and instance counts.
    """
    track = _TEMPLATE_TRACKS[config.template_id]
    mismatched = [i for i in instances if i.track != track]
    if mismatched:
        raise ConfigError(
            f"template {config.template_id!r} expects track {track} instances; "
            f"got track {mismatched[0].track} (snippet {mismatched[0].snippet_id!r})"
        )
    names = language_names or {}
    out = Path(out)
    per_emotion: dict[str, int] = {}
    with out.open("w", encoding="utf-8") as fh:
        for inst in instances:
            language = names.get(inst.language, display_name(inst.language))
            instruction = render_zero_shot(config.template_id, inst.text, language, inst.emotion)
            fh.write(json.dumps({"instruction": instruction, "output": str(inst.gold)}, ensure_ascii=False))
            fh.write("\n")
            per_emotion[inst.emotion] = per_emotion.get(inst.emotion, 0) + 1

    metadata_path = out.with_suffix(".meta.json")
    _write_json(
        metadata_path,
        {
            "template_id": config.template_id,
            "hyperparameters": config.hyperparameters,
            "instances": len(instances),
            "per_emotion": per_emotion,
            "languages": sorted({i.language for i in instances}),
        },
    )
    return ExportSummary(out, metadata_path, len(instances))


def export_ebridge_plan(
    english_instances: list[TaskInstance],
    target_instances: list[TaskInstance],
    config: SftExportConfig,
    out_dir: str | Path,
    language_names: dict[str, str] | None = None,
) -> EbridgePlan:
    """Write the two-stage (English, then target language) SFT datasets.

    Stage 1 must be entirely English; stage 2 must be a single non-English
    language. A ``plan.json`` manifest records the stage order.
    """
    eng_langs = {i.language for i in english_instances}
    if eng_langs != {"eng"}:
        raise ValidationError(f"stage 1 must be English only; got languages {sorted(eng_langs)}")
    target_langs = {i.language for i in target_instances}
    if len(target_langs) != 1:
        raise ValidationError(f"stage 2 mixes languages {sorted(target_langs)}")
    target_language = target_langs.pop()
    if target_language == "eng":
        raise ValidationError("stage 2 language must differ from English")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stage1 = export_sft_dataset(english_instances, config, out_dir / "stage1_eng.jsonl", language_names)
    stage2 = export_sft_dataset(
        target_instances, config, out_dir / f"stage2_{target_language}.jsonl", language_names
    )

    plan_path = out_dir / "plan.json"
    _write_json(
        plan_path,
        {
            "kind": "staged_sft",
            "template_id": config.template_id,
            "stages": [
                {
                    "stage": 1,
                    "language": "eng",
                    "dataset": stage1.dataset_path.name,
                    "metadata": stage1.metadata_path.name,
                    "instances": stage1.instance_count,
                },
                {
                    "stage": 2,
                    "language": target_language,
                    "dataset": stage2.dataset_path.name,
                    "metadata": stage2.metadata_path.name,
                    "instances": stage2.instance_count,
                },
            ],
        },
    )
    return EbridgePlan(stage1, stage2, plan_path)
