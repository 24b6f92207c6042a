"""Deterministic stand-in models for offline end-to-end runs.

Mocks receive the fully rendered prompt string, exactly like the HTTP
endpoint would. The ones that need the query text or emotion recover
them by matching the known template shapes; statement text that itself
embeds a full template block would confuse that recovery, which is an
accepted limit for test doubles.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .corpus import LABEL_RANGES, TRACK_A, TRACK_B, TaskInstance
from .errors import ConfigError

_ASCII_DIGITS = "0123456789"

_A_BLOCK = re.compile(
    r"You are detecting emotions on a statement written in (?P<language>.*?)\. "
    r"Statement: (?P<text>.*?)\. Does this statement express (?P<emotion>\w+)\? "
    r"Answer 1 for yes and 0 for no\.",
    re.DOTALL,
)
_B_BLOCK = re.compile(
    r"Tweet: (?P<text>.*?) Emotion (?P<emotion>\w+) Intensity class:$",
    re.DOTALL,
)


def extract_query(prompt: str) -> tuple[str, str, str]:
    """Recover (text, emotion, track) from a rendered prompt.

    Few-shot prompts contain several presence blocks; the query is always
    the final one.
    """
    match = _B_BLOCK.search(prompt)
    if match and prompt.startswith("Task: Categorize the tweet"):
        return match.group("text"), match.group("emotion"), TRACK_B
    matches = list(_A_BLOCK.finditer(prompt))
    if matches:
        last = matches[-1]
        return last.group("text"), last.group("emotion"), TRACK_A
    raise ValueError(f"prompt does not match a known template: {prompt[:120]!r}")


class EchoFirstDigitMock:
    """Replies with the first ASCII digit in the prompt, or "0"."""

    def respond(self, prompt: str) -> str:
        for ch in prompt:
            if ch in _ASCII_DIGITS:
                return ch
        return "0"


class AlwaysZeroMock:
    def respond(self, prompt: str) -> str:
        return "0"


class KeywordMock:
    """Scores by how often the queried emotion word appears in the text.

    Presence prompts get 1 when the word occurs at all; intensity prompts
    get the occurrence count capped at 3.
    """

    def respond(self, prompt: str) -> str:
        text, emotion, track = extract_query(prompt)
        count = text.lower().count(emotion.lower())
        if track == TRACK_A:
            return "1" if count else "0"
        _, hi = LABEL_RANGES[TRACK_B]
        return str(min(hi, count))


@dataclass
class GoldLookupMock:
    """Answers with the gold label for the queried (text, emotion) pair.

    A perfect model over a known dataset; used to check pipeline identities
    such as intensity-to-presence consistency.
    """

    labels: dict[tuple[str, str], int]

    @classmethod
    def from_instances(cls, instances: list[TaskInstance]) -> "GoldLookupMock":
        return cls({(i.text, i.emotion): i.gold for i in instances})

    def respond(self, prompt: str) -> str:
        text, emotion, _ = extract_query(prompt)
        return str(self.labels[(text, emotion)])


BUILTIN_MOCKS = {
    "echo-first-digit": EchoFirstDigitMock,
    "always-0": AlwaysZeroMock,
    "keyword": KeywordMock,
}


def build_mock(mock_id: str):
    if mock_id not in BUILTIN_MOCKS:
        known = ", ".join(sorted(BUILTIN_MOCKS))
        raise ConfigError(f"unknown mock {mock_id!r}; built-in mocks: {known}")
    return BUILTIN_MOCKS[mock_id]()
