"""Meta-evaluation: rank metrics by agreement with human judgments.

Scores a synthetic corpus with BLEU and chrF, treats the severity-weighted
annotation scores as the human gold standard, and reports segment-level
Spearman correlations — overall, on the harder "imperfect" subset
(segments whose human score is strictly negative), and per language pair.
"""

from chatqe.bridge import ScoreTable, SegmentBatch, native_score_batch
from chatqe.context import ContextSetting, TargetContextMode, contextify_corpus
from chatqe.metaeval import SubsetSpec, metaeval
from chatqe.mqm import score_errors
from chatqe.synthetic import make_corpus


def main():
    corpus = make_corpus(n_conversations=30, seed=23)
    pairs = contextify_corpus(
        corpus, "sysA", 0, ContextSetting.ACROSS, TargetContextMode.REFERENCE
    )
    batch = SegmentBatch("demo", pairs)

    human = ScoreTable("human-mqm", "gold")
    for conv, turn, out in corpus.segments():
        key = (conv.conversation_id, turn.index, out.system_id)
        human.scores[key] = score_errors(out.errors).raw

    tables = [native_score_batch(batch, metric)[0] for metric in ("bleu", "chrf")]
    specs = [SubsetSpec(quality="all"), SubsetSpec(quality="imperfect")]

    for grouping in ("overall", "language_pair"):
        report = metaeval(tables, human, corpus, specs, grouping=grouping)
        print(f"\n=== grouping: {grouping} ===")
        for r in report.results:
            rho = "   n/a" if r.rho is None else f"{r.rho:+.4f}"
            flags = f"  [{','.join(r.flags)}]" if r.flags else ""
            print(f"  {r.metric_name:<6} {r.subset:<20} {r.group:<14} n={r.n:<4} rho={rho}{flags}")
        for avg in report.averages:
            rho = "   n/a" if avg.rho is None else f"{avg.rho:+.4f}"
            print(f"  {avg.metric_name:<6} {avg.subset:<20} {avg.group:<14} rho={rho}")


if __name__ == "__main__":
    main()
