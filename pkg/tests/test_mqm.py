from hypothesis import given
from hypothesis import strategies as st

from chatqe.corpus import MqmError, Severity
from chatqe.mqm import (
    CuaBucket,
    MqmScore,
    SeverityCounts,
    count_severities,
    cua_bucket,
    is_imperfect,
    mqm_score,
    score_errors,
)


def err(severity):
    return MqmError("accuracy/mistranslation", severity)


def test_count_empty():
    assert count_severities([]) == SeverityCounts(0, 0, 0)


def test_count_mixed():
    counts = count_severities([err(Severity.MINOR), err(Severity.MINOR), err(Severity.CRITICAL)])
    assert counts == SeverityCounts(2, 0, 1)


def test_neutral_ignored():
    assert count_severities([err(Severity.NEUTRAL), err(Severity.MAJOR)]) == SeverityCounts(0, 1, 0)


def test_score_weights():
    assert mqm_score(SeverityCounts(0, 0, 0)).raw == 0
    assert mqm_score(SeverityCounts(0, 0, 0)).scaled == 100
    assert mqm_score(SeverityCounts(2, 1, 0)).raw == -7
    assert mqm_score(SeverityCounts(2, 1, 0)).scaled == 93
    assert mqm_score(SeverityCounts(3, 0, 2)).raw == -23
    assert mqm_score(SeverityCounts(3, 0, 2)).scaled == 77


counts_st = st.builds(
    SeverityCounts,
    st.integers(0, 100),
    st.integers(0, 100),
    st.integers(0, 100),
)


@given(counts_st, counts_st)
def test_score_is_linear(a, b):
    assert mqm_score(a + b).raw == mqm_score(a).raw + mqm_score(b).raw


@given(counts_st)
def test_zero_score_iff_no_errors(counts):
    assert (mqm_score(counts).raw == 0) == (counts == SeverityCounts(0, 0, 0))


def test_cua_boundaries():
    expectations = {
        -15: CuaBucket.WEAK,
        0: CuaBucket.WEAK,
        39.999: CuaBucket.WEAK,
        40: CuaBucket.MODERATE,
        59.999: CuaBucket.MODERATE,
        60: CuaBucket.GOOD,
        79.999: CuaBucket.GOOD,
        80: CuaBucket.EXCELLENT,
        100: CuaBucket.EXCELLENT,
    }
    for scaled, bucket in expectations.items():
        assert cua_bucket(MqmScore(raw=scaled - 100)) is bucket, scaled


@given(st.floats(-200, 100), st.floats(-200, 100))
def test_cua_monotone(a, b):
    lo, hi = sorted((a, b))
    assert cua_bucket(MqmScore(lo - 100)) <= cua_bucket(MqmScore(hi - 100))


def test_is_imperfect():
    assert not is_imperfect(MqmScore(0))
    assert is_imperfect(MqmScore(-1))
    assert is_imperfect(MqmScore(-23))


severity_st = st.sampled_from(list(Severity))


@given(st.lists(severity_st, max_size=20))
def test_imperfect_iff_non_neutral_error(severities):
    errors = [err(s) for s in severities]
    has_real_error = any(s is not Severity.NEUTRAL for s in severities)
    assert is_imperfect(score_errors(errors)) == has_real_error
