"""Seeded synthetic chat corpora for tests, demos, and pipeline dry runs.

Sentences are built from small per-language word pools and every sentence
starts with a ``<lang>`` sentinel token, so language-side bookkeeping (which
side of a contextualized pair a sentence landed on) can be checked
structurally.
"""

from __future__ import annotations

import random

from .corpus import Conversation, Corpus, MqmError, Severity, Speaker, SystemOutput, Turn

_WORD_POOLS = {
    "en": ["please", "cancel", "order", "refund", "help", "link", "account", "thanks", "issue", "update"],
    "de": ["bitte", "stornieren", "bestellung", "erstattung", "hilfe", "konto", "danke", "problem", "link"],
    "fr": ["annuler", "commande", "remboursement", "aide", "compte", "merci", "souci", "lien", "mise"],
    "pt": ["cancelar", "pedido", "reembolso", "ajuda", "conta", "obrigado", "problema", "link", "fatura"],
}

_CATEGORIES = (
    "accuracy/mistranslation",
    "accuracy/omission",
    "fluency/spelling",
    "fluency/grammar",
    "fluency/register",
    "terminology/inconsistent",
)

_SEVERITIES = (Severity.MINOR, Severity.MINOR, Severity.MAJOR, Severity.CRITICAL)

_TAGS = ("formality", "pronouns", "verb_form", "lexical_consistency")


def _sentence(rng: random.Random, lang: str, n_words: int) -> str:
    pool = _WORD_POOLS[lang]
    return f"<{lang}> " + " ".join(rng.choice(pool) for _ in range(n_words))


def make_corpus(
    n_conversations: int = 10,
    seed: int = 0,
    systems: tuple[str, ...] = ("sysA",),
    min_turns: int = 4,
    max_turns: int = 8,
    error_rate: float = 0.4,
    with_references: bool = True,
) -> Corpus:
    """Deterministic corpus with planted errors at roughly ``error_rate`` of
    the outputs."""
    rng = random.Random(seed)
    lang_cycle = [("en", "de"), ("en", "fr"), ("en", "pt")]
    conversations = []
    for c in range(n_conversations):
        agent_lang, customer_lang = lang_cycle[c % len(lang_cycle)]
        turns = []
        for t in range(rng.randint(min_turns, max_turns)):
            speaker = Speaker.AGENT if rng.random() < 0.5 else Speaker.CUSTOMER
            src_lang = agent_lang if speaker is Speaker.AGENT else customer_lang
            tgt_lang = customer_lang if speaker is Speaker.AGENT else agent_lang
            source = _sentence(rng, src_lang, rng.randint(2, 12))
            reference = _sentence(rng, tgt_lang, rng.randint(2, 12)) if with_references else None
            outputs = []
            for sid in systems:
                hypothesis = _sentence(rng, tgt_lang, rng.randint(2, 12))
                errors = []
                if rng.random() < error_rate:
                    for _ in range(rng.randint(1, 3)):
                        span_start = rng.randrange(max(1, len(hypothesis) - 4))
                        errors.append(
                            MqmError(
                                category=rng.choice(_CATEGORIES),
                                severity=rng.choice(_SEVERITIES),
                                span_start=span_start,
                                span_end=min(len(hypothesis), span_start + rng.randint(1, 4)),
                            )
                        )
                tags = frozenset(tag for tag in _TAGS if rng.random() < 0.15)
                outputs.append(
                    SystemOutput(system_id=sid, hypothesis=hypothesis, errors=tuple(errors), external_tags=tags)
                )
            turns.append(Turn(index=t, speaker=speaker, source=source, reference=reference, outputs=tuple(outputs)))
        conversations.append(
            Conversation(
                conversation_id=f"conv-{c:03d}",
                agent_lang=agent_lang,
                customer_lang=customer_lang,
                turns=tuple(turns),
            )
        )
    return Corpus(conversations=tuple(conversations))
