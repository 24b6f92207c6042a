"""Dataset loading, instance explosion, and oversampling."""

import logging
import random
from collections import Counter

import pytest

from emoharness import (
    EMOTIONS,
    ColumnSchema,
    EmotionSet,
    SchemaError,
    Snippet,
    TaskInstance,
    ValidationError,
    display_name,
    explode,
    load_dataset,
    oversample,
)
from datagen import make_snippets, write_csv


def write_rows(path, header, rows):
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(c) for c in row) + "\n")
    return path


class TestEmotionSet:
    def test_default_is_all_six_in_fixed_order(self):
        assert EmotionSet.for_language("deu").emotions == EMOTIONS
        assert EMOTIONS == ("anger", "disgust", "fear", "joy", "sadness", "surprise")

    def test_english_excludes_disgust(self):
        assert EmotionSet.for_language("eng").emotions == (
            "anger", "fear", "joy", "sadness", "surprise",
        )

    def test_afrikaans_excludes_surprise(self):
        assert EmotionSet.for_language("afr").emotions == (
            "anger", "disgust", "fear", "joy", "sadness",
        )

    def test_unlisted_language_gets_default_set(self):
        assert EmotionSet.for_language("xyz").emotions == EMOTIONS

    def test_rejects_empty_duplicate_and_unknown(self):
        with pytest.raises(ValidationError):
            EmotionSet("eng", ())
        with pytest.raises(ValidationError):
            EmotionSet("eng", ("joy", "joy"))
        with pytest.raises(ValidationError):
            EmotionSet("eng", ("joy", "boredom"))

    def test_container_protocol(self):
        es = EmotionSet.for_language("eng")
        assert len(es) == 5
        assert "joy" in es and "disgust" not in es
        assert list(es) == list(es.emotions)

    def test_display_names(self):
        assert display_name("eng") == "English"
        assert display_name("deu") == "German"
        assert display_name("chn") == "Chinese"
        assert display_name("zzz") == "zzz"


class TestLoadDataset:
    def test_maps_row_fields_onto_snippet(self, tmp_path):
        es = EmotionSet.for_language("eng")
        path = write_rows(
            tmp_path / "d.csv",
            ["id", "text", "anger", "fear", "joy", "sadness", "surprise"],
            [["eng_01", "What a day!", 0, 0, 1, 0, 0]],
        )
        (snippet,) = load_dataset(path, ColumnSchema(), es, "A")
        assert snippet.id == "eng_01"
        assert snippet.text == "What a day!"
        assert snippet.language == "eng"
        assert snippet.labels == {"anger": 0, "fear": 0, "joy": 1, "sadness": 0, "surprise": 0}

    def test_three_rows_six_emotions(self, tmp_path):
        es = EmotionSet.for_language("deu")
        rng = random.Random(1)
        snippets = make_snippets(rng, 3, es, "A")
        path = write_csv(tmp_path / "d.csv", snippets, es)
        loaded = load_dataset(path, ColumnSchema(), es, "A")
        assert len(loaded) == 3
        assert all(len(s.labels) == 6 for s in loaded)
        assert [s.id for s in loaded] == [s.id for s in snippets]  # row order kept
        assert loaded == snippets

    def test_quoted_text_with_commas_survives(self, tmp_path):
        es = EmotionSet.for_language("eng")
        path = tmp_path / "d.csv"
        path.write_text(
            'id,text,anger,fear,joy,sadness,surprise\n'
            'r1,"Hello, world, again",0,0,0,0,0\n',
            encoding="utf-8",
        )
        (snippet,) = load_dataset(path, ColumnSchema(), es, "A")
        assert snippet.text == "Hello, world, again"

    def test_missing_column_names_it(self, tmp_path):
        es = EmotionSet.for_language("eng")
        path = write_rows(
            tmp_path / "d.csv",
            ["id", "text", "anger", "fear", "joy", "sadness"],
            [["r1", "hi", 0, 0, 0, 0]],
        )
        with pytest.raises(SchemaError, match="surprise"):
            load_dataset(path, ColumnSchema(), es, "A")

    def test_out_of_range_label_cites_row_id(self, tmp_path):
        es = EmotionSet.for_language("deu")
        path = write_rows(
            tmp_path / "d.csv",
            ["id", "text", "anger", "disgust", "fear", "joy", "sadness", "surprise"],
            [["r7", "hi", 0, 0, 4, 0, 0, 0]],
        )
        with pytest.raises(ValidationError, match="r7"):
            load_dataset(path, ColumnSchema(), es, "B")

    def test_track_a_rejects_intensity_two(self, tmp_path):
        es = EmotionSet.for_language("eng")
        path = write_rows(
            tmp_path / "d.csv",
            ["id", "text", "anger", "fear", "joy", "sadness", "surprise"],
            [["r1", "hi", 0, 0, 2, 0, 0]],
        )
        with pytest.raises(ValidationError, match="joy"):
            load_dataset(path, ColumnSchema(), es, "A")

    def test_non_integer_label_rejected(self, tmp_path):
        es = EmotionSet.for_language("eng")
        path = write_rows(
            tmp_path / "d.csv",
            ["id", "text", "anger", "fear", "joy", "sadness", "surprise"],
            [["r1", "hi", 0, 0, "yes", 0, 0]],
        )
        with pytest.raises(ValidationError, match="yes"):
            load_dataset(path, ColumnSchema(), es, "A")

    def test_duplicate_id_rejected(self, tmp_path):
        es = EmotionSet.for_language("eng")
        path = write_rows(
            tmp_path / "d.csv",
            ["id", "text", "anger", "fear", "joy", "sadness", "surprise"],
            [["r1", "hi", 0, 0, 0, 0, 0], ["r1", "again", 0, 0, 0, 0, 0]],
        )
        with pytest.raises(ValidationError, match="r1"):
            load_dataset(path, ColumnSchema(), es, "A")

    def test_empty_text_rejected(self, tmp_path):
        es = EmotionSet.for_language("eng")
        path = write_rows(
            tmp_path / "d.csv",
            ["id", "text", "anger", "fear", "joy", "sadness", "surprise"],
            [["r1", "  ", 0, 0, 0, 0, 0]],
        )
        with pytest.raises(ValidationError, match="empty text"):
            load_dataset(path, ColumnSchema(), es, "A")

    def test_column_remapping(self, tmp_path):
        es = EmotionSet.for_language("eng")
        path = write_rows(
            tmp_path / "d.csv",
            ["key", "sentence", "anger", "fear", "Joy", "sadness", "surprise"],
            [["r1", "fine", 0, 0, 1, 0, 0]],
        )
        schema = ColumnSchema(id="key", text="sentence", emotions={"joy": "Joy"})
        (snippet,) = load_dataset(path, schema, es, "A")
        assert snippet.labels["joy"] == 1


class TestExplode:
    def test_one_snippet_six_instances(self):
        es = EmotionSet.for_language("deu")
        s = Snippet("x", "hallo", "deu", {e: 0 for e in es})
        instances = explode([s], es, "A")
        assert len(instances) == 6
        assert [i.emotion for i in instances] == list(es.emotions)

    def test_empty_input(self):
        assert explode([], EmotionSet.for_language("deu"), "A") == []

    def test_ten_english_snippets_fifty_instances(self):
        es = EmotionSet.for_language("eng")
        rng = random.Random(3)
        instances = explode(make_snippets(rng, 10, es, "B"), es, "B")
        assert len(instances) == 50

    def test_order_is_snippet_cross_emotion(self):
        es = EmotionSet.for_language("eng")
        rng = random.Random(4)
        snippets = make_snippets(rng, 3, es, "A")
        instances = explode(snippets, es, "A")
        expected = [(s.id, e) for s in snippets for e in es]
        assert [(i.snippet_id, i.emotion) for i in instances] == expected

    def test_gold_copied_from_labels(self):
        es = EmotionSet.for_language("eng")
        s = Snippet("x", "yay", "eng", {"anger": 0, "fear": 0, "joy": 1, "sadness": 0, "surprise": 1})
        by_emotion = {i.emotion: i for i in explode([s], es, "A")}
        assert by_emotion["joy"].gold == 1
        assert by_emotion["anger"].gold == 0
        assert all(i.text == "yay" and i.track == "A" for i in by_emotion.values())

    def test_mismatched_labels_rejected(self):
        es = EmotionSet.for_language("eng")
        s = Snippet("x", "hi", "eng", {"joy": 1})
        with pytest.raises(ValidationError):
            explode([s], es, "A")


def _class_counts(instances):
    counts = {}
    for inst in instances:
        pos, neg = counts.get(inst.emotion, (0, 0))
        counts[inst.emotion] = (pos + 1, neg) if inst.gold == 1 else (pos, neg + 1)
    return counts


def _make_instance(snippet_id, emotion, gold):
    return TaskInstance(snippet_id, f"text {snippet_id}", "eng", emotion, gold, "A")


class TestOversample:
    def _instances(self, pos, neg, emotion="joy"):
        instances = [_make_instance(f"p{i}", emotion, 1) for i in range(pos)]
        instances += [_make_instance(f"n{i}", emotion, 0) for i in range(neg)]
        return instances

    def test_three_pos_seven_neg_becomes_seven_seven(self):
        instances = self._instances(3, 7)
        out = oversample(instances, seed=9)
        assert len(out) == 14
        assert _class_counts(out)["joy"] == (7, 7)

    def test_balanced_group_unchanged(self):
        instances = self._instances(5, 5)
        assert oversample(instances, seed=1) == instances

    def test_single_class_group_warns_and_stays(self, caplog):
        instances = self._instances(0, 4)
        with caplog.at_level(logging.WARNING):
            out = oversample(instances, seed=2)
        assert out == instances
        assert any("single class" in r.message for r in caplog.records)

    def test_seed_determinism(self):
        rng = random.Random(11)
        es = EmotionSet.for_language("eng")
        instances = explode(make_snippets(rng, 40, es, "A", positive_rate=0.2), es, "A")
        assert oversample(instances, seed=77) == oversample(instances, seed=77)

    def test_originals_are_sub_multiset(self):
        rng = random.Random(12)
        es = EmotionSet.for_language("deu")
        instances = explode(make_snippets(rng, 30, es, "A", positive_rate=0.25), es, "A")
        out = oversample(instances, seed=5)
        inputs = Counter((i.snippet_id, i.emotion, i.gold) for i in instances)
        outputs = Counter((i.snippet_id, i.emotion, i.gold) for i in out)
        assert all(outputs[key] >= n for key, n in inputs.items())

    def test_duplicates_copy_minority_instances(self):
        instances = self._instances(1, 3)
        out = oversample(instances, seed=0)
        assert _class_counts(out)["joy"] == (3, 3)
        extra = out[len(instances):]
        assert all(i.gold == 1 and i.snippet_id == "p0" for i in extra)

    def test_balances_each_emotion_group_separately(self):
        rng = random.Random(13)
        es = EmotionSet.for_language("eng")
        instances = explode(make_snippets(rng, 50, es, "A", positive_rate=0.3), es, "A")
        out = oversample(instances, seed=21)
        for emotion, (pos, neg) in _class_counts(out).items():
            original = _class_counts(instances)[emotion]
            if 0 in original:
                assert (pos, neg) == original
            else:
                assert pos == neg
