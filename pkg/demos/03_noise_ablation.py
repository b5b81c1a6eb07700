"""Context-noise ablation: does a metric even look at the context?

Builds context-augmented segment pairs, then corrupts the context three ways
(swap in an unrelated block, drop aligned sentence pairs, drop sentences
independently per side) and re-scores with the lexical metrics. Because BLEU
and chrF pool only over the current instance, their scores are unchanged —
the baseline sanity check the noise machinery exists to provide.
"""

import numpy as np

from chatqe.bridge import SegmentBatch, native_score_batch
from chatqe.context import ContextSetting, TargetContextMode, contextify_corpus
from chatqe.perturb import NoiseKind, NoiseSpec, perturb_batch
from chatqe.synthetic import make_corpus


def main():
    corpus = make_corpus(n_conversations=15, seed=11)
    pairs = contextify_corpus(
        corpus, "sysA", 3, ContextSetting.ACROSS, TargetContextMode.REFERENCE
    )
    clean = SegmentBatch("clean", pairs)
    base, _ = native_score_batch(clean, "chrf")
    print(f"{len(pairs)} segments, clean mean chrF = {np.mean(list(base.scores.values())):.3f}")

    for kind in NoiseKind:
        spec = NoiseSpec(kind=kind, seed=42)
        noisy = perturb_batch(list(pairs), spec)
        batch = SegmentBatch(f"noisy-{kind.value}", noisy)
        table, _ = native_score_batch(batch, "chrf")
        deltas = [table.scores[k] - base.scores[k] for k in base.scores]
        n_ctx_changed = sum(
            1 for a, b in zip(pairs, noisy) if a.src_augmented != b.src_augmented
        )
        print(
            f"  {kind.value:<12} context changed on {n_ctx_changed:>3} segments, "
            f"max |score delta| = {max(abs(d) for d in deltas):.2e}"
        )

    print("\nrepeat with the same seed -> identical batches:", end=" ")
    again = perturb_batch(list(pairs), NoiseSpec(kind=NoiseKind.SWAP, seed=42))
    once = perturb_batch(list(pairs), NoiseSpec(kind=NoiseKind.SWAP, seed=42))
    print(once == again)


if __name__ == "__main__":
    main()
