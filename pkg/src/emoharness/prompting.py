"""Prompt rendering for presence queries, intensity queries, and few-shot blocks."""

from __future__ import annotations

import re

from .corpus import EMOTIONS, EmotionSet
from .errors import ValidationError

TRACK_A_TEMPLATE = (
    "You are detecting emotions on a statement written in {language}. "
    "Statement: {text}. Does this statement express {emotion}? "
    "Answer 1 for yes and 0 for no."
)

TRACK_B_TEMPLATE = (
    "Task: Categorize the tweet into an intensity level of the specified "
    "emotion E, representing the mental state of the tweeter. "
    "0: no E can be inferred. 1: low amount of E can be inferred. "
    "2: moderate amount of E can be inferred. 3: high amount of E can be "
    "inferred. Tweet: {text} Emotion {emotion} Intensity class:"
)

TEMPLATES = {"track_a": TRACK_A_TEMPLATE, "track_b": TRACK_B_TEMPLATE}

_PLACEHOLDER = re.compile(r"\{(language|text|emotion)\}")


def render_zero_shot(
    template_id: str,
    text: str,
    language: str,
    emotion: str,
    emotion_set: EmotionSet | None = None,
) -> str:
    """Substitute the template placeholders and nothing else.

    The statement text is inserted raw: no escaping, trimming or reflowing,
    and braces inside it are never re-expanded. ``emotion`` is checked
    against ``emotion_set`` when given, else against the six known emotions.
    """
    template = TEMPLATES.get(template_id)
    if template is None:
        raise ValueError(f"unknown template id {template_id!r}")
    allowed = emotion_set.emotions if emotion_set is not None else EMOTIONS
    if emotion not in allowed:
        raise ValidationError(f"emotion {emotion!r} not in active set {list(allowed)}")
    values = {"language": language, "text": text, "emotion": emotion}
    return _PLACEHOLDER.sub(lambda m: values[m.group(1)], template)


def render_few_shot(
    examples: list[tuple[str, str, int]],
    query_text: str,
    language: str,
    emotion: str,
    k: int,
    emotion_set: EmotionSet | None = None,
) -> str:
    """Assemble a k-shot presence prompt from retrieved labelled examples.

    Each example ``(text, emotion, gold)`` becomes the zero-shot presence
    prompt followed by an ``Answer: {gold}`` line; blocks are separated by
    blank lines and the query's zero-shot prompt comes last. ``k = 0``
    degenerates to plain zero-shot rendering.
    """
    if len(examples) != k:
        raise ValueError(f"expected {k} examples, got {len(examples)}")
    blocks = []
    for example_text, example_emotion, gold in examples:
        if example_emotion != emotion:
            raise ValidationError(
                f"example is labelled for {example_emotion!r}, not the queried {emotion!r}"
            )
        if gold not in (0, 1):
            raise ValidationError(f"example gold {gold!r} is not a presence label")
        rendered = render_zero_shot("track_a", example_text, language, example_emotion, emotion_set)
        blocks.append(f"{rendered}\nAnswer: {gold}")
    blocks.append(render_zero_shot("track_a", query_text, language, emotion, emotion_set))
    return "\n\n".join(blocks)
