import random

import numpy as np
import pytest
import scipy.stats
from hypothesis import given
from hypothesis import strategies as st

from chatqe.bridge import ScoreTable
from chatqe.errors import KeyAlignmentError
from chatqe.metaeval import (
    SubsetSpec,
    average_ranks,
    filter_subset,
    metaeval,
    segment_metadata,
    spearman,
)
from chatqe.mqm import score_errors


def brute_force_spearman(xs, ys):
    """Independent oracle: ranks by pairwise counting, then textbook Pearson."""

    def ranks(vals):
        out = []
        for v in vals:
            less = sum(1 for w in vals if w < v)
            equal = sum(1 for w in vals if w == v)
            out.append(less + (equal + 1) / 2.0)
        return out

    rx, ry = ranks(xs), ranks(ys)
    n = len(rx)
    mx, my = sum(rx) / n, sum(ry) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    vx = sum((a - mx) ** 2 for a in rx)
    vy = sum((b - my) ** 2 for b in ry)
    if vx == 0 or vy == 0:
        return None
    return cov / (vx * vy) ** 0.5


def test_average_ranks_basic():
    assert average_ranks([10, 30, 20]) == [1, 3, 2]


def test_average_ranks_ties():
    assert average_ranks([5, 5, 9]) == [1.5, 1.5, 3]


def test_average_ranks_full_tie():
    assert average_ranks([7, 7, 7]) == [2, 2, 2]


def test_average_ranks_empty_errors():
    with pytest.raises(ValueError):
        average_ranks([])


def test_spearman_monotone():
    assert spearman([1, 2, 3], [10, 20, 30]) == pytest.approx(1.0)


def test_spearman_reversed():
    assert spearman([1, 2, 3], [30, 20, 10]) == pytest.approx(-1.0)


def test_spearman_tie_case():
    assert spearman([1, 2, 2, 4], [1, 3, 2, 4]) == pytest.approx(0.9487, abs=1e-4)


def test_spearman_constant_undefined():
    assert spearman([5, 5, 5], [1, 2, 3]) is None


def test_spearman_against_oracles():
    rng = random.Random(99)
    for _ in range(300):
        n = rng.randint(2, 50)
        xs = [rng.randint(0, 10) for _ in range(n)]  # plenty of ties
        ys = [rng.randint(0, 10) for _ in range(n)]
        ours = spearman(xs, ys)
        brute = brute_force_spearman(xs, ys)
        if brute is None:
            assert ours is None
            continue
        assert ours == pytest.approx(brute, abs=1e-10)
        ref = scipy.stats.spearmanr(xs, ys).statistic
        assert ours == pytest.approx(ref, abs=1e-10)


@given(st.lists(st.integers(0, 100), min_size=3, max_size=30))
def test_spearman_rank_invariance(xs):
    ys = list(range(len(xs)))
    transformed = [2.5 * x**3 + 7 for x in xs]  # strictly increasing map
    assert spearman(xs, ys) == spearman(transformed, ys)


@given(
    st.lists(st.floats(-100, 100, allow_nan=False), min_size=2, max_size=30),
    st.randoms(),
)
def test_spearman_symmetric(xs, rnd):
    ys = [rnd.uniform(-100, 100) for _ in xs]
    assert spearman(xs, ys) == spearman(ys, xs)


def human_table(corpus):
    table = ScoreTable("human-mqm", "h")
    for conv, turn, out in corpus.segments():
        table.scores[(conv.conversation_id, turn.index, out.system_id)] = score_errors(out.errors).raw
    return table


def test_filter_all_is_everything(synthetic_corpus):
    human = human_table(synthetic_corpus)
    keys = filter_subset(synthetic_corpus, human, SubsetSpec(quality="all"))
    assert set(keys) == set(human.scores)


def test_filter_imperfect_exact(synthetic_corpus):
    human = human_table(synthetic_corpus)
    keys = filter_subset(synthetic_corpus, human, SubsetSpec(quality="imperfect"))
    assert set(keys) == {k for k, v in human.scores.items() if v < 0}
    assert keys  # planted errors guarantee a non-empty subset


def test_filter_length_bucket(synthetic_corpus):
    human = human_table(synthetic_corpus)
    keys = filter_subset(synthetic_corpus, human, SubsetSpec(length_bucket=(0, 20)))
    meta = segment_metadata(synthetic_corpus)
    assert keys
    assert all(meta[k].source_length <= 20 for k in keys)


def test_filters_compose(synthetic_corpus):
    human = human_table(synthetic_corpus)
    a = SubsetSpec(quality="imperfect")
    b = SubsetSpec(direction="agent")
    both = SubsetSpec(quality="imperfect", direction="agent")
    keys_a = set(filter_subset(synthetic_corpus, human, a))
    keys_b = set(filter_subset(synthetic_corpus, human, b))
    keys_both = set(filter_subset(synthetic_corpus, human, both))
    assert keys_both == keys_a & keys_b


def test_metaeval_self_correlation(synthetic_corpus):
    human = human_table(synthetic_corpus)
    metric = ScoreTable("mirror", "m", dict(human.scores))
    report = metaeval([metric], human, synthetic_corpus, [SubsetSpec()], grouping="overall")
    (result,) = report.results
    assert result.rho == pytest.approx(1.0)


def test_metaeval_anti_correlation(synthetic_corpus):
    human = human_table(synthetic_corpus)
    # add jitter so neither vector is constant within any subset
    rng = random.Random(0)
    jittered = {k: v + rng.random() * 0.01 for k, v in human.scores.items()}
    human = ScoreTable("human-mqm", "h", jittered)
    metric = ScoreTable("anti", "m", {k: -v for k, v in jittered.items()})
    report = metaeval([metric], human, synthetic_corpus, [SubsetSpec()], grouping="overall")
    assert report.results[0].rho == pytest.approx(-1.0)


def test_metaeval_per_group_matches_oracle(synthetic_corpus):
    human = human_table(synthetic_corpus)
    rng = random.Random(7)
    metric = ScoreTable("noisy", "m", {k: v + rng.uniform(-3, 3) for k, v in human.scores.items()})
    report = metaeval([metric], human, synthetic_corpus, [SubsetSpec()], grouping="language_pair")
    meta = segment_metadata(synthetic_corpus)
    assert report.results
    for result in report.results:
        keys = [k for k in human.scores if meta[k].language_pair == result.group]
        expected = brute_force_spearman([metric.scores[k] for k in keys], [human.scores[k] for k in keys])
        if expected is None:
            assert result.rho is None
        else:
            assert result.rho == pytest.approx(expected, abs=1e-10)


def test_metaeval_direction_averages_unweighted(synthetic_corpus):
    human = human_table(synthetic_corpus)
    rng = random.Random(8)
    metric = ScoreTable("noisy", "m", {k: v + rng.uniform(-3, 3) for k, v in human.scores.items()})
    report = metaeval([metric], human, synthetic_corpus, [SubsetSpec()], grouping="language_pair")
    meta = segment_metadata(synthetic_corpus)
    for avg in report.averages:
        direction = avg.group.removeprefix("average_")
        rhos = [
            r.rho
            for r in report.results
            if r.rho is not None and meta_direction(meta, r.group) == direction
        ]
        assert avg.rho == pytest.approx(np.mean(rhos))


def meta_direction(meta, language_pair):
    for m in meta.values():
        if m.language_pair == language_pair:
            return m.direction
    return None


def test_metaeval_category_below_threshold_flagged(synthetic_corpus):
    human = human_table(synthetic_corpus)
    metric = ScoreTable("mirror", "m", dict(human.scores))
    spec = SubsetSpec(error_category="accuracy/omission")
    report = metaeval([metric], human, synthetic_corpus, [spec], grouping="overall")
    (result,) = report.results
    if result.n < 20:
        assert "below-min-instances" in result.flags
    else:
        assert not result.flags


def test_metaeval_misaligned_keys_error(synthetic_corpus):
    human = human_table(synthetic_corpus)
    partial = ScoreTable("partial", "m", dict(list(human.scores.items())[:-3]))
    with pytest.raises(KeyAlignmentError):
        metaeval([partial], human, synthetic_corpus, [SubsetSpec()], grouping="overall")


def test_metaeval_comparisons(synthetic_corpus):
    human = human_table(synthetic_corpus)
    a = ScoreTable("a", "r", dict(human.scores))
    rng = random.Random(4)
    b = ScoreTable("b", "r", {k: v + rng.uniform(-5, 5) for k, v in human.scores.items()})
    report = metaeval(
        [a, b], human, synthetic_corpus, [SubsetSpec()], grouping="overall", comparisons=[("a", "b")]
    )
    (comparison,) = report.comparisons
    rho_a = next(r.rho for r in report.results if r.metric_name == "a")
    rho_b = next(r.rho for r in report.results if r.metric_name == "b")
    assert comparison["delta_rho"] == pytest.approx(rho_a - rho_b)
