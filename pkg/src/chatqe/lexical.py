"""Sentence-level BLEU and chrF with WMT-standard configuration.

BLEU uses the mteval-v13a tokenizer, exponential (NIST method 3) smoothing,
full 4-gram order (no effective-order shortening) and mixed case. chrF is the
pure character variant (order 6, beta 2, whitespace removed). Both return
scores on a 0-100 scale.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass

_LOG_ZERO = -9999999999.0  # stands in for log(0); forces a ~0 geometric mean

_PUNCT_RE = re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])")
_PERIOD_COMMA_BEFORE_RE = re.compile(r"([^0-9])([\.,])")
_PERIOD_COMMA_AFTER_RE = re.compile(r"([\.,])([^0-9])")
_DIGIT_DASH_RE = re.compile(r"([0-9])(-)")


@dataclass(frozen=True)
class BleuConfig:
    max_order: int = 4
    smoothing: str = "exp"
    tokenizer: str = "thirteen_a"
    case: str = "mixed"
    effective_order: bool = False


@dataclass(frozen=True)
class ChrfConfig:
    char_order: int = 6
    word_order: int = 0
    beta: float = 2.0
    remove_whitespace: bool = True


def tokenize_13a(text: str) -> list[str]:
    """mteval-v13a tokenization: unescape a few entities, pad punctuation with
    spaces (periods/commas only when not inside numbers), split on whitespace."""
    norm = text
    norm = norm.replace("<skipped>", "")
    norm = norm.replace("-\n", "")
    norm = norm.replace("\n", " ")
    if "&" in norm:
        norm = norm.replace("&quot;", '"')
        norm = norm.replace("&amp;", "&")
        norm = norm.replace("&lt;", "<")
        norm = norm.replace("&gt;", ">")
    norm = f" {norm} "
    norm = _PUNCT_RE.sub(r" \1 ", norm)
    norm = _PERIOD_COMMA_BEFORE_RE.sub(r"\1 \2 ", norm)
    norm = _PERIOD_COMMA_AFTER_RE.sub(r" \1 \2", norm)
    norm = _DIGIT_DASH_RE.sub(r"\1 \2 ", norm)
    return norm.split()


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def sentence_bleu(hypothesis: str, reference: str, config: BleuConfig = BleuConfig()) -> float:
    """Smoothed sentence BLEU in [0, 100]. An empty hypothesis scores 0."""
    hyp = tokenize_13a(hypothesis)
    ref = tokenize_13a(reference)
    if not hyp:
        return 0.0

    max_order = config.max_order
    precisions = [0.0] * max_order
    smooth = 1.0
    eff_order = max_order
    for n in range(1, max_order + 1):
        hyp_ngrams = _ngrams(hyp, n)
        total = sum(hyp_ngrams.values())
        if total == 0:
            break
        if config.effective_order:
            eff_order = n
        ref_ngrams = _ngrams(ref, n)
        correct = sum(min(cnt, ref_ngrams[gram]) for gram, cnt in hyp_ngrams.items())
        if correct == 0:
            if config.smoothing == "exp":
                smooth *= 2.0
                precisions[n - 1] = 100.0 / (smooth * total)
        else:
            precisions[n - 1] = 100.0 * correct / total

    brevity_penalty = 1.0
    if len(hyp) < len(ref):
        brevity_penalty = math.exp(1.0 - len(ref) / len(hyp))

    log_sum = sum(math.log(p) if p > 0.0 else _LOG_ZERO for p in precisions[:eff_order])
    score = brevity_penalty * math.exp(log_sum / eff_order)
    return min(100.0, max(0.0, score))


def _char_ngrams(text: str, n: int) -> Counter:
    return Counter(text[i : i + n] for i in range(len(text) - n + 1))


def sentence_chrf(hypothesis: str, reference: str, config: ChrfConfig = ChrfConfig()) -> float:
    """Character n-gram F-score in [0, 100].

    Precision and recall are macro-averaged over the n-gram orders for which
    both sides have at least one n-gram, then combined with F_beta.
    """
    hyp = re.sub(r"\s+", "", hypothesis) if config.remove_whitespace else hypothesis
    ref = re.sub(r"\s+", "", reference) if config.remove_whitespace else reference

    sum_prec = 0.0
    sum_rec = 0.0
    effective_orders = 0
    for n in range(1, config.char_order + 1):
        hyp_ngrams = _char_ngrams(hyp, n)
        ref_ngrams = _char_ngrams(ref, n)
        hyp_total = sum(hyp_ngrams.values())
        ref_total = sum(ref_ngrams.values())
        if hyp_total == 0 or ref_total == 0:
            continue
        common = sum((hyp_ngrams & ref_ngrams).values())
        sum_prec += common / hyp_total
        sum_rec += common / ref_total
        effective_orders += 1

    if effective_orders == 0:
        return 0.0
    avg_prec = sum_prec / effective_orders
    avg_rec = sum_rec / effective_orders
    if avg_prec + avg_rec == 0.0:
        return 0.0
    beta_sq = config.beta**2
    return 100.0 * (1 + beta_sq) * avg_prec * avg_rec / (beta_sq * avg_prec + avg_rec)
