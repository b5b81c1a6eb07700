"""Conversational context windows for sentence-level metric inputs.

For a turn under evaluation, up to k preceding turns are prepended to the
source and target sides, separated by a tag. Each side stays monolingual: a
context turn contributes its original text to the side in its own language and
its translation (reference or hypothesis) to the other side. Character offsets
of the current instance are recorded so downstream scorers can pool only the
segment under evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from .corpus import Conversation, Corpus, Speaker, Turn
from .errors import ContextError

DEFAULT_SEPARATOR = "<sep>"


class ContextSetting(Enum):
    WITHIN = "within"
    ACROSS = "across"


class TargetContextMode(Enum):
    REFERENCE = "reference"
    HYPOTHESIS = "hypothesis"


@dataclass(frozen=True)
class ContextualizedPair:
    conversation_id: str
    turn_index: int
    system_id: str
    src_augmented: str
    tgt_hyp_augmented: str
    tgt_ref_augmented: Optional[str]
    src_current_offset: int
    tgt_current_offset: int
    k_used: int
    language_pair: str
    direction: str
    warning: Optional[str] = None

    @property
    def key(self) -> tuple[str, int, str]:
        return (self.conversation_id, self.turn_index, self.system_id)

    @property
    def current_source(self) -> str:
        return self.src_augmented[self.src_current_offset :]

    @property
    def current_hypothesis(self) -> str:
        return self.tgt_hyp_augmented[self.tgt_current_offset :]

    @property
    def current_reference(self) -> Optional[str]:
        if self.tgt_ref_augmented is None:
            return None
        return self.tgt_ref_augmented[self.tgt_current_offset :]


def select_context_turns(conv: Conversation, t: int, k: int, setting: ContextSetting) -> list[int]:
    """Indices of the last min(k, available) turns preceding turn t; the
    within setting keeps only turns by the same speaker as turn t."""
    current = _turn_at(conv, t)
    preceding = [turn for turn in conv.turns if turn.index < t]
    if setting is ContextSetting.WITHIN:
        preceding = [turn for turn in preceding if turn.speaker is current.speaker]
    return [turn.index for turn in preceding[-k:]] if k > 0 else []


def _turn_at(conv: Conversation, t: int) -> Turn:
    for turn in conv.turns:
        if turn.index == t:
            return turn
    raise ContextError(f"conversation {conv.conversation_id!r} has no turn {t}")


def _translation_of(turn: Turn, system_id: str, mode: TargetContextMode, conv: Conversation) -> str:
    if mode is TargetContextMode.REFERENCE:
        if turn.reference is None:
            raise ContextError(
                f"conversation {conv.conversation_id!r} turn {turn.index}: reference required as context"
            )
        return turn.reference
    out = turn.output(system_id)
    if out is None:
        raise ContextError(
            f"conversation {conv.conversation_id!r} turn {turn.index}: no hypothesis for system {system_id!r}"
        )
    return out.hypothesis


def build_context(
    conv: Conversation,
    t: int,
    system_id: str,
    k: int,
    setting: ContextSetting,
    mode: TargetContextMode,
    separator: str = DEFAULT_SEPARATOR,
) -> ContextualizedPair:
    """Contextualize one segment.

    Source side of a context turn: its original text when the speaker matches
    the current turn, otherwise its translation. Target side: the mirror
    image. Sides are joined oldest-first with the separator tag, the current
    instance last.
    """
    turn = _turn_at(conv, t)
    out = turn.output(system_id)
    if out is None:
        raise ContextError(f"conversation {conv.conversation_id!r} turn {t}: no output for system {system_id!r}")

    sep = f" {separator} "
    selected = select_context_turns(conv, t, k, setting)
    src_parts = []
    tgt_parts = []
    for idx in selected:
        ctx = _turn_at(conv, idx)
        if ctx.speaker is turn.speaker:
            src_parts.append(ctx.source)
            tgt_parts.append(_translation_of(ctx, system_id, mode, conv))
        else:
            src_parts.append(_translation_of(ctx, system_id, mode, conv))
            tgt_parts.append(ctx.source)

    src_prefix = sep.join(src_parts) + sep if src_parts else ""
    tgt_prefix = sep.join(tgt_parts) + sep if tgt_parts else ""
    direction = conv.direction(turn)
    return ContextualizedPair(
        conversation_id=conv.conversation_id,
        turn_index=t,
        system_id=system_id,
        src_augmented=src_prefix + turn.source,
        tgt_hyp_augmented=tgt_prefix + out.hypothesis,
        tgt_ref_augmented=(tgt_prefix + turn.reference) if turn.reference is not None else None,
        src_current_offset=len(src_prefix),
        tgt_current_offset=len(tgt_prefix),
        k_used=len(selected),
        language_pair=str(direction),
        direction=turn.speaker.value,
    )


def contextify_corpus(
    corpus: Corpus,
    system_id: str,
    k: int,
    setting: ContextSetting,
    mode: TargetContextMode,
    separator: str = DEFAULT_SEPARATOR,
) -> list[ContextualizedPair]:
    """One pair per (conversation, turn, system) segment, in corpus order.

    Segments whose context cannot be built (missing reference or hypothesis on
    a context turn) fall back to k=0 and carry a warning instead of failing.
    """
    pairs = []
    for conv in corpus.conversations:
        for turn in conv.turns:
            if turn.output(system_id) is None:
                continue
            try:
                pair = build_context(conv, turn.index, system_id, k, setting, mode, separator)
            except ContextError as exc:
                pair = build_context(conv, turn.index, system_id, 0, setting, mode, separator)
                pair = replace(pair, warning=str(exc))
            pairs.append(pair)
    return pairs
