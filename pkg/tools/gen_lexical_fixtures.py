"""Freeze BLEU/chrF oracle values into tests/fixtures/lexical_parity.json.

Runs the reference scorer implementation (a sacrebleu-style single-file
module, passed by path) over a randomized set of hypothesis/reference pairs
and records sentence BLEU (13a tokenizer, exp smoothing, full order) and
sentence chrF (order 6, beta 2, whitespace removed) on a 0-100 scale.

Usage: python3 tools/gen_lexical_fixtures.py --scorer /path/to/sacrebleu.py
"""

import argparse
import importlib.util
import json
import random
from pathlib import Path

WORDS = [
    "the", "cat", "sat", "on", "mat", "a", "dog", "ran", "fast", "slowly",
    "house", "green", "blue", "translation", "quality", "chat", "support",
    "cancel", "order", "link", "account", "hello", "thanks", "problem",
    "não", "obrigado", "ajuda", "conta", "danke", "bestellung", "café",
]
PUNCT = [",", ".", "!", "?", ";", ":", "-", '"', "(", ")", "3.5", "100", "2-3", "&amp;"]


def random_sentence(rng, min_len=1, max_len=18):
    n = rng.randint(min_len, max_len)
    tokens = []
    for _ in range(n):
        tokens.append(rng.choice(PUNCT) if rng.random() < 0.2 else rng.choice(WORDS))
    return " ".join(tokens)


def mutate(rng, sentence):
    tokens = sentence.split()
    out = []
    for tok in tokens:
        r = rng.random()
        if r < 0.15:
            continue  # drop
        if r < 0.3:
            out.append(rng.choice(WORDS))  # substitute
        else:
            out.append(tok)
        if rng.random() < 0.1:
            out.append(rng.choice(WORDS))  # insert
    return " ".join(out) if out else rng.choice(WORDS)


def build_pairs(seed=20240226, n=240):
    rng = random.Random(seed)
    pairs = []
    # edge cases first
    pairs.append(("the cat sat on the mat", "the cat sat on the mat"))
    pairs.append(("xyzzy plugh", "the cat sat on the mat"))
    pairs.append(("the cat sat", "the cat sat on the mat"))
    pairs.append(("abcd", "abce"))
    pairs.append(("Hello, world!", "Hello , world !"))
    pairs.append(("word", "a few reference words here"))
    pairs.append(("two tokens", "two tokens and more text"))
    pairs.append(("one two three", "one two three"))
    pairs.append(("3.5 degrees", "3.5 degrees outside"))
    while len(pairs) < n:
        ref = random_sentence(rng)
        hyp = mutate(rng, ref) if rng.random() < 0.7 else random_sentence(rng)
        pairs.append((hyp, ref))
    return pairs


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--scorer", required=True, help="path to the reference scorer module")
    parser.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "tests/fixtures/lexical_parity.json"))
    args = parser.parse_args()

    # the scorer module imports a file-locking helper only needed for dataset
    # downloads; stub it out so scoring works standalone
    import sys
    import types

    if "portalocker" not in sys.modules:
        stub = types.ModuleType("portalocker")
        stub.Lock = object
        sys.modules["portalocker"] = stub
    if "MeCab" not in sys.modules:
        # the Japanese tokenizer is constructed eagerly but never used here
        class _FakeDictInfo:
            size = 392126
            next = None

        class _FakeTagger:
            def __init__(self, *_args):
                pass

            def dictionary_info(self):
                return _FakeDictInfo()

        mecab_stub = types.ModuleType("MeCab")
        mecab_stub.Tagger = _FakeTagger
        sys.modules["MeCab"] = mecab_stub

    spec = importlib.util.spec_from_file_location("ref_scorer", args.scorer)
    ref_scorer = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(ref_scorer)

    records = []
    for hyp, ref in build_pairs():
        bleu = ref_scorer.corpus_bleu(
            [hyp], [[ref]], smooth_method="exp", use_effective_order=False, tokenize="13a", lowercase=False
        ).score
        chrf = ref_scorer.sentence_chrf(hyp, ref, order=6, beta=2, remove_whitespace=True).score * 100.0
        records.append({"hyp": hyp, "ref": ref, "bleu": bleu, "chrf": chrf})

    Path(args.out).write_text(json.dumps(records, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {args.out} ({len(records)} pairs)")


if __name__ == "__main__":
    main()
