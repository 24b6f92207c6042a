"""Dataset ingestion and per-emotion instance construction.

A multi-label dataset arrives as one CSV per language with one column per
emotion. Every row becomes a :class:`Snippet`; :func:`explode` turns each
snippet into one classification instance per emotion so a model can answer
the emotions independently.
"""

from __future__ import annotations

import csv
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SchemaError, ValidationError

log = logging.getLogger(__name__)

#: Canonical emotion order; every EmotionSet is an ordered subset of this.
EMOTIONS = ("anger", "disgust", "fear", "joy", "sadness", "surprise")

TRACK_A = "A"  # presence labels in {0, 1}
TRACK_B = "B"  # intensity labels in {0, 1, 2, 3}
TRACKS = (TRACK_A, TRACK_B)

LABEL_RANGES = {TRACK_A: (0, 1), TRACK_B: (0, 3)}

#: Languages whose annotation scheme drops one of the six emotions.
EMOTION_SET_OVERRIDES = {
    "eng": ("anger", "fear", "joy", "sadness", "surprise"),
    "afr": ("anger", "disgust", "fear", "joy", "sadness"),
}

#: Default English display names used when rendering prompts; a config can
#: override the name for any language.
LANGUAGE_NAMES = {
    "afr": "Afrikaans",
    "amh": "Amharic",
    "arq": "Algerian Arabic",
    "ary": "Moroccan Arabic",
    "chn": "Chinese",
    "deu": "German",
    "eng": "English",
    "esp": "Spanish",
    "hau": "Hausa",
    "hin": "Hindi",
    "ibo": "Igbo",
    "ind": "Indonesian",
    "jav": "Javanese",
    "kin": "Kinyarwanda",
    "mar": "Marathi",
    "orm": "Oromo",
    "pcm": "Nigerian Pidgin",
    "ptbr": "Brazilian Portuguese",
    "ptmz": "Mozambican Portuguese",
    "ron": "Romanian",
    "rus": "Russian",
    "som": "Somali",
    "sun": "Sundanese",
    "swa": "Swahili",
    "swe": "Swedish",
    "tat": "Tatar",
    "tir": "Tigrinya",
    "ukr": "Ukrainian",
    "vmw": "Emakhuwa",
    "xho": "isiXhosa",
    "yor": "Yoruba",
    "zul": "isiZulu",
}


def display_name(language_code: str) -> str:
    """English display name for a language code; falls back to the code."""
    return LANGUAGE_NAMES.get(language_code, language_code)


@dataclass(frozen=True)
class EmotionSet:
    """Ordered set of emotions annotated for one language."""

    language_code: str
    emotions: tuple[str, ...] = EMOTIONS

    def __post_init__(self):
        if not self.emotions:
            raise ValidationError("emotion set must not be empty")
        if len(set(self.emotions)) != len(self.emotions):
            raise ValidationError(f"duplicate emotions in {self.emotions!r}")
        unknown = [e for e in self.emotions if e not in EMOTIONS]
        if unknown:
            raise ValidationError(f"unknown emotion(s): {', '.join(unknown)}")

    @classmethod
    def for_language(cls, language_code: str) -> "EmotionSet":
        """The default set for a language, honouring per-language exceptions."""
        return cls(language_code, EMOTION_SET_OVERRIDES.get(language_code, EMOTIONS))

    def __iter__(self):
        return iter(self.emotions)

    def __len__(self):
        return len(self.emotions)

    def __contains__(self, emotion):
        return emotion in self.emotions


@dataclass
class Snippet:
    """One annotated text with a label per emotion."""

    id: str
    text: str
    language: str
    labels: dict[str, int]


@dataclass
class TaskInstance:
    """One (text, emotion) classification instance with its gold target."""

    snippet_id: str
    text: str
    language: str
    emotion: str
    gold: int
    track: str


@dataclass(frozen=True)
class ColumnSchema:
    """Maps the harness' logical columns onto a CSV's actual header names.

    Emotion columns default to the emotion names themselves; ``emotions``
    overrides individual ones.
    """

    id: str = "id"
    text: str = "text"
    emotions: dict[str, str] = field(default_factory=dict)

    def column_for(self, emotion: str) -> str:
        return self.emotions.get(emotion, emotion)


def _parse_label_cell(value: str | None, track: str, row_id: str, column: str) -> int:
    raw = (value or "").strip()
    try:
        label = int(raw)
    except ValueError:
        raise ValidationError(
            f"row {row_id!r}: column {column!r} has non-integer label {raw!r}"
        ) from None
    lo, hi = LABEL_RANGES[track]
    if not lo <= label <= hi:
        raise ValidationError(
            f"row {row_id!r}: column {column!r} label {label} outside "
            f"track {track} range [{lo}, {hi}]"
        )
    return label


def load_dataset(
    path: str | Path,
    schema: ColumnSchema,
    emotion_set: EmotionSet,
    track: str,
) -> list[Snippet]:
    """Read an annotated CSV (UTF-8, header row) into validated snippets.

    Row order is preserved. Raises :class:`SchemaError` when a mapped column
    is absent and :class:`ValidationError` for bad labels, empty texts or
    duplicate ids.
    """
    if track not in TRACKS:
        raise ValueError(f"unknown track {track!r}")
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        required = [schema.id, schema.text] + [schema.column_for(e) for e in emotion_set]
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s): {', '.join(missing)}")
        snippets: list[Snippet] = []
        seen: set[str] = set()
        for row in reader:
            row_id = (row[schema.id] or "").strip()
            if not row_id:
                raise ValidationError(f"{path}: line {reader.line_num}: empty id")
            if row_id in seen:
                raise ValidationError(f"{path}: duplicate id {row_id!r}")
            seen.add(row_id)
            text = row[schema.text] or ""
            if not text.strip():
                raise ValidationError(f"row {row_id!r}: empty text")
            labels = {
                emotion: _parse_label_cell(row[schema.column_for(emotion)], track, row_id, schema.column_for(emotion))
                for emotion in emotion_set
            }
            snippets.append(Snippet(row_id, text, emotion_set.language_code, labels))
    return snippets


def validate_snippets(snippets: list[Snippet], emotion_set: EmotionSet, track: str) -> None:
    """Check label key sets and ranges; raises :class:`ValidationError`."""
    expected = set(emotion_set)
    lo, hi = LABEL_RANGES[track]
    for snippet in snippets:
        if set(snippet.labels) != expected:
            raise ValidationError(
                f"snippet {snippet.id!r}: label keys {sorted(snippet.labels)} "
                f"do not match emotion set {list(emotion_set)}"
            )
        for emotion, label in snippet.labels.items():
            if not lo <= label <= hi:
                raise ValidationError(
                    f"snippet {snippet.id!r}: {emotion} label {label} outside "
                    f"track {track} range [{lo}, {hi}]"
                )


def explode(snippets: list[Snippet], emotion_set: EmotionSet, track: str) -> list[TaskInstance]:
    """Turn every snippet into one instance per emotion.

    Output order is snippet order crossed with emotion-set order, so
    ``len(result) == len(snippets) * len(emotion_set)``.
    """
    validate_snippets(snippets, emotion_set, track)
    return [
        TaskInstance(s.id, s.text, s.language, emotion, s.labels[emotion], track)
        for s in snippets
        for emotion in emotion_set
    ]


def oversample(instances: list[TaskInstance], seed: int) -> list[TaskInstance]:
    """Balance positive/negative counts within each emotion group.

    Minority-class instances are duplicated by seeded sampling with
    replacement until the counts match. All originals are kept; duplicates
    are appended after their group. A group with a single class present is
    left unchanged with a warning, since duplication cannot balance it.
    """
    if any(inst.track != TRACK_A for inst in instances):
        raise ValueError("oversampling applies to track A instances only")
    rng = random.Random(seed)
    groups: dict[str, list[TaskInstance]] = {}
    for inst in instances:
        groups.setdefault(inst.emotion, []).append(inst)

    balanced: list[TaskInstance] = []
    for emotion, group in groups.items():
        positives = [i for i in group if i.gold == 1]
        negatives = [i for i in group if i.gold == 0]
        if not positives or not negatives:
            log.warning(
                "oversample: emotion %r has a single class (%d instances); left unchanged",
                emotion,
                len(group),
            )
            balanced.extend(group)
            continue
        minority = positives if len(positives) < len(negatives) else negatives
        shortfall = abs(len(positives) - len(negatives))
        balanced.extend(group)
        balanced.extend(rng.choice(minority) for _ in range(shortfall))
    return balanced
