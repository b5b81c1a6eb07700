"""Walk through a bilingual chat corpus and its severity-weighted scores.

Generates a small synthetic customer-support corpus, prints the headline
statistics, and shows how raw MQM scores translate into the 0-100 scaled
range and the Weak/Moderate/Good/Excellent utility buckets.
"""

from collections import Counter

from chatqe.mqm import cua_bucket, score_errors
from chatqe.stats import corpus_stats
from chatqe.synthetic import make_corpus


def main():
    corpus = make_corpus(n_conversations=25, seed=7)
    n_turns = sum(len(c.turns) for c in corpus.conversations)
    print(f"synthetic corpus: {len(corpus.conversations)} conversations, {n_turns} turns")

    report = corpus_stats(corpus, grouping="by_direction")
    for name, group in sorted(report.groups.items()):
        print(f"\n[{name}]")
        print(f"  segments:        {group.n_segments}")
        print(f"  pct perfect:     {group.pct_perfect:.1f}%")
        print(f"  CUA buckets:     {dict(sorted(group.cua_counts.items()))}")
        top = sorted(group.error_category_hist.items(), key=lambda kv: -kv[1])[:3]
        for category, rate in top:
            print(f"  {category:<28} {rate:.3f} per segment")

    print("\nper-segment scores and utility buckets (first conversation):")
    conv = corpus.conversations[0]
    for turn in conv.turns:
        out = turn.output("sysA")
        score = score_errors(out.errors)
        print(
            f"  t={turn.index} {turn.speaker.value:<8} raw={score.raw:>6.1f} "
            f"scaled={score.scaled:>6.1f} bucket={cua_bucket(score)}"
        )

    buckets = Counter(
        str(cua_bucket(score_errors(out.errors))) for _, _, out in corpus.segments()
    )
    print("\nbucket distribution:", dict(buckets))


if __name__ == "__main__":
    main()
