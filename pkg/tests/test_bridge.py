import pytest

from chatqe.bridge import (
    MetricRun,
    ScoreTable,
    batch_lines,
    export_batch,
    import_scores,
    native_score_batch,
    read_batch,
    read_scores,
    write_scores,
)
from chatqe.context import ContextSetting, TargetContextMode, contextify_corpus
from chatqe.errors import BatchError, ScoreImportError
from chatqe.lexical import sentence_bleu


@pytest.fixture(scope="module")
def pairs(chat_example):
    return contextify_corpus(
        chat_example, "sysA", 2, ContextSetting.ACROSS, TargetContextMode.REFERENCE
    )


def test_export_counts_and_header(pairs, tmp_path):
    path = tmp_path / "batch.jsonl"
    export_batch(pairs, "b1", path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == len(pairs) + 1
    assert '"schema": "chatqe.batch.v1"' in lines[0]


def test_export_deterministic(pairs):
    assert batch_lines(pairs, "b1") == batch_lines(pairs, "b1")


def test_export_duplicate_key_rejected(pairs):
    with pytest.raises(BatchError, match="duplicate segment_key"):
        batch_lines([pairs[0], pairs[0]], "b1")


def test_batch_roundtrip(pairs, tmp_path):
    path = tmp_path / "batch.jsonl"
    exported = export_batch(pairs, "b1", path)
    loaded = read_batch(path)
    assert loaded.batch_id == "b1"
    assert loaded.keys() == exported.keys()
    for a, b in zip(loaded.pairs, exported.pairs):
        assert a.src_augmented == b.src_augmented
        assert a.tgt_ref_augmented == b.tgt_ref_augmented
        assert a.src_current_offset == b.src_current_offset


def test_missing_reference_serialized_as_null(pairs, tmp_path):
    from dataclasses import replace

    no_ref = [replace(p, tgt_ref_augmented=None) for p in pairs]
    path = tmp_path / "batch.jsonl"
    export_batch(no_ref, "b1", path)
    assert '"tgt_ref_augmented": null' in path.read_text(encoding="utf-8")


def test_score_file_roundtrip(pairs, tmp_path):
    batch = export_batch(pairs, "b1", tmp_path / "batch.jsonl")
    table, warnings = native_score_batch(batch, "bleu")
    assert not warnings
    path = tmp_path / "scores.tsv"
    write_scores(table, path)
    reread = import_scores(path, batch)
    assert reread.metric_name == "bleu"
    assert reread.scores == table.scores


def test_import_missing_keys_listed(pairs, tmp_path):
    batch = export_batch(pairs, "b1", tmp_path / "batch.jsonl")
    table, _ = native_score_batch(batch, "chrf")
    dropped = list(table.scores)[:2]
    for key in dropped:
        del table.scores[key]
    path = tmp_path / "scores.tsv"
    write_scores(table, path)
    with pytest.raises(ScoreImportError, match="missing scores") as exc:
        import_scores(path, batch)
    for key in dropped:
        assert str(key) in str(exc.value)


def test_import_unknown_key_rejected(pairs, tmp_path):
    batch = export_batch(pairs, "b1", tmp_path / "batch.jsonl")
    table, _ = native_score_batch(batch, "bleu")
    table.scores[("ghost", 0, "sysA")] = 1.0
    path = tmp_path / "scores.tsv"
    write_scores(table, path)
    with pytest.raises(ScoreImportError, match="unknown keys"):
        import_scores(path, batch)


def test_import_non_finite_rejected(pairs, tmp_path):
    batch = export_batch(pairs, "b1", tmp_path / "batch.jsonl")
    table, _ = native_score_batch(batch, "bleu")
    table.scores[list(table.scores)[0]] = float("nan")
    path = tmp_path / "scores.tsv"
    write_scores(table, path)
    with pytest.raises(ScoreImportError, match="non-finite score"):
        import_scores(path, batch)


def test_native_scores_invariant_to_k(chat_example, tmp_path):
    k0 = contextify_corpus(chat_example, "sysA", 0, ContextSetting.ACROSS, TargetContextMode.REFERENCE)
    k2 = contextify_corpus(chat_example, "sysA", 2, ContextSetting.ACROSS, TargetContextMode.REFERENCE)
    b0 = export_batch(k0, "k0", tmp_path / "k0.jsonl")
    b2 = export_batch(k2, "k2", tmp_path / "k2.jsonl")
    for metric in ("bleu", "chrf"):
        t0, _ = native_score_batch(b0, metric)
        t2, _ = native_score_batch(b2, metric)
        assert t0.scores == t2.scores


def test_native_identity_segment_scores_100(pairs, tmp_path):
    batch = export_batch(pairs, "b1", tmp_path / "b.jsonl")
    table, _ = native_score_batch(batch, "chrf")
    # fixture hypotheses equal references
    assert all(score == pytest.approx(100.0) for score in table.scores.values())


def test_native_matches_direct_lexical_call(pairs, tmp_path):
    batch = export_batch(pairs, "b1", tmp_path / "b.jsonl")
    table, _ = native_score_batch(batch, "bleu")
    for pair in batch.pairs:
        expected = sentence_bleu(pair.current_hypothesis, pair.current_reference)
        assert table.scores[pair.key] == expected


def test_metric_run_id():
    run = MetricRun("bleu", k=2, setting="across", mode="hypothesis", noise="swap-s7")
    assert run.run_id == "bleu-k2-across-hypothesis-swap-s7"


def test_read_scores_parses_header(tmp_path):
    path = tmp_path / "s.tsv"
    path.write_text("# metric=bleu run=test-1\na\t0\tsysA\t42.5\n", encoding="utf-8")
    table = read_scores(path)
    assert table.metric_name == "bleu"
    assert table.run_id == "test-1"
    assert table.scores == {("a", 0, "sysA"): 42.5}
