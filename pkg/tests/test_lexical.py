import pytest

from chatqe.lexical import sentence_bleu, sentence_chrf, tokenize_13a


def test_tokenize_punctuation():
    assert tokenize_13a("Hello, world!") == ["Hello", ",", "world", "!"]


def test_tokenize_digit_adjacent_period_kept():
    assert tokenize_13a("3.5") == ["3.5"]


def test_tokenize_empty():
    assert tokenize_13a("") == []


def test_tokenize_entities_and_digit_dash():
    assert tokenize_13a("a &amp; b") == ["a", "&", "b"]
    assert tokenize_13a("2-3 items") == ["2", "-", "3", "items"]


def test_bleu_identity():
    assert sentence_bleu("the cat sat on the mat", "the cat sat on the mat") == pytest.approx(100.0)


def test_bleu_empty_hypothesis():
    assert sentence_bleu("", "a reference") == 0.0


def test_case_sensitive():
    ref = "the cat sat on the mat"
    assert sentence_bleu("The Cat sat on the mat", ref) < sentence_bleu(ref, ref)
    assert sentence_chrf("The Cat", "the cat") < sentence_chrf("the cat", "the cat")


def test_chrf_identity():
    assert sentence_chrf("abcdef ghi", "abcdef ghi") == pytest.approx(100.0)


def test_chrf_disjoint():
    assert sentence_chrf("xyz", "abc") == 0.0


def test_chrf_empty_hypothesis():
    assert sentence_chrf("", "reference") == 0.0


def test_scores_in_range(lexical_parity_records):
    for rec in lexical_parity_records:
        assert 0.0 <= sentence_bleu(rec["hyp"], rec["ref"]) <= 100.0
        assert 0.0 <= sentence_chrf(rec["hyp"], rec["ref"]) <= 100.0


def test_bleu_parity_with_canonical_scorer(lexical_parity_records):
    assert len(lexical_parity_records) >= 200
    for rec in lexical_parity_records:
        assert sentence_bleu(rec["hyp"], rec["ref"]) == pytest.approx(rec["bleu"], abs=1e-4)


def test_chrf_parity_with_canonical_scorer(lexical_parity_records):
    for rec in lexical_parity_records:
        assert sentence_chrf(rec["hyp"], rec["ref"]) == pytest.approx(rec["chrf"], abs=1e-4)


def test_short_hypothesis_matches_oracle(lexical_parity_records):
    # full 4-gram order with a sub-4-token hypothesis: the canonical scorer
    # yields 0 because the missing order contributes a log(0) term
    assert sentence_bleu("two tokens", "two tokens and more text") == pytest.approx(0.0, abs=1e-9)
    short = [r for r in lexical_parity_records if len(r["hyp"].split()) <= 3]
    assert short, "fixtures must include short hypotheses"
    for rec in short:
        assert sentence_bleu(rec["hyp"], rec["ref"]) == pytest.approx(rec["bleu"], abs=1e-4)
