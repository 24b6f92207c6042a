#!/usr/bin/env python3
"""
From a labelled CSV to per-emotion classification instances
============================================================

A dataset row carries one text and a 0/1 column per emotion. The model,
however, answers one question per (text, emotion) pair, so every snippet
is exploded into one instance per emotion in the language's emotion set.
Training splits can then be oversampled so each emotion sees as many
positive as negative instances.
"""

from collections import Counter
from pathlib import Path

from emoharness import ColumnSchema, EmotionSet, explode, load_dataset, oversample

DATA = Path(__file__).parent / "data"

emotion_set = EmotionSet.for_language("eng")
print("language:", emotion_set.language_code)
print("emotions:", ", ".join(emotion_set.emotions))

snippets = load_dataset(DATA / "eng_train.csv", ColumnSchema(), emotion_set, track="A")
print(f"\nloaded {len(snippets)} snippets")
for snippet in snippets[:3]:
    positives = [e for e, v in snippet.labels.items() if v]
    print(f"  {snippet.id}: {snippet.text!r} -> {positives or 'none'}")

instances = explode(snippets, emotion_set, track="A")
print(f"\nexploded into {len(instances)} instances "
      f"({len(snippets)} snippets x {len(emotion_set.emotions)} emotions)")

before = Counter((x.emotion, x.gold) for x in instances)
balanced = oversample(instances, seed=7)
after = Counter((x.emotion, x.gold) for x in balanced)

print(f"\noversampled {len(instances)} -> {len(balanced)} instances")
print(f"{'emotion':<10} {'pos/neg before':>15} {'pos/neg after':>15}")
for emotion in emotion_set.emotions:
    print(f"{emotion:<10} {before[(emotion, 1)]:>7}/{before[(emotion, 0)]:<7} "
          f"{after[(emotion, 1)]:>7}/{after[(emotion, 0)]:<7}")
