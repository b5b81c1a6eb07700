"""Controlled context-noise injection for ablation studies.

Swap replaces a side's context block with that of an unrelated donor segment;
Drop removes context sentences, either the same position on both sides
("pair") or independently per side ("random"). The current instance after the
recorded offsets is never touched.
"""

from __future__ import annotations

import random
import zlib
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from .context import DEFAULT_SEPARATOR, ContextualizedPair


class NoiseKind(Enum):
    SWAP = "swap"
    DROP_PAIR = "drop-pair"
    DROP_RANDOM = "drop-random"


class NoiseSide(Enum):
    SOURCE = "source"
    TRANSLATION = "translation"
    BOTH = "both"


@dataclass(frozen=True)
class NoiseSpec:
    kind: NoiseKind
    side: NoiseSide = NoiseSide.BOTH
    seed: int = 0
    repeats: int = 1  # sentences removed per Drop application


def split_context(augmented: str, offset: int, separator: str = DEFAULT_SEPARATOR) -> tuple[list[str], str]:
    """Decompose an augmented side into (context sentences, current text)."""
    sep = f" {separator} "
    if offset == 0:
        return [], augmented
    block = augmented[: offset - len(sep)]
    return block.split(sep), augmented[offset:]


def join_context(sentences: list[str], current: str, separator: str = DEFAULT_SEPARATOR) -> tuple[str, int]:
    """Inverse of split_context; returns (augmented text, current offset)."""
    sep = f" {separator} "
    if not sentences:
        return current, 0
    prefix = sep.join(sentences) + sep
    return prefix + current, len(prefix)


def segment_rng(spec: NoiseSpec, key: tuple[str, int, str]) -> random.Random:
    """Per-segment stream: run seed XOR a stable hash of the segment key."""
    digest = zlib.crc32(repr(key).encode("utf-8"))
    return random.Random(spec.seed ^ digest)


def _rebuild(pair: ContextualizedPair, src_ctx, tgt_ctx, separator) -> ContextualizedPair:
    src_aug, src_off = join_context(src_ctx, pair.current_source, separator)
    tgt_hyp_aug, tgt_off = join_context(tgt_ctx, pair.current_hypothesis, separator)
    tgt_ref_aug = None
    if pair.tgt_ref_augmented is not None:
        tgt_ref_aug, _ = join_context(tgt_ctx, pair.current_reference, separator)
    return replace(
        pair,
        src_augmented=src_aug,
        tgt_hyp_augmented=tgt_hyp_aug,
        tgt_ref_augmented=tgt_ref_aug,
        src_current_offset=src_off,
        tgt_current_offset=tgt_off,
        k_used=max(len(src_ctx), len(tgt_ctx)),
    )


def perturb(
    pair: ContextualizedPair,
    donors: list[ContextualizedPair],
    spec: NoiseSpec,
    separator: str = DEFAULT_SEPARATOR,
) -> ContextualizedPair:
    """Apply one noise spec to one contextualized pair, deterministically."""
    rng = segment_rng(spec, pair.key)
    src_ctx, _ = split_context(pair.src_augmented, pair.src_current_offset, separator)
    tgt_ctx, _ = split_context(pair.tgt_hyp_augmented, pair.tgt_current_offset, separator)

    if spec.kind is NoiseKind.SWAP:
        donor = _pick_donor(pair, donors, rng)
        if donor is None:
            return replace(pair, warning="swap: no donor available")
        donor_src, _ = split_context(donor.src_augmented, donor.src_current_offset, separator)
        donor_tgt, _ = split_context(donor.tgt_hyp_augmented, donor.tgt_current_offset, separator)
        if spec.side in (NoiseSide.SOURCE, NoiseSide.BOTH):
            src_ctx = donor_src
        if spec.side in (NoiseSide.TRANSLATION, NoiseSide.BOTH):
            tgt_ctx = donor_tgt
        return _rebuild(pair, src_ctx, tgt_ctx, separator)

    if pair.k_used == 0 or (not src_ctx and not tgt_ctx):
        return replace(pair, warning="drop: no context to remove")

    if spec.kind is NoiseKind.DROP_PAIR:
        for _ in range(min(spec.repeats, len(src_ctx))):
            pos = rng.randrange(len(src_ctx))
            del src_ctx[pos]
            if pos < len(tgt_ctx):
                del tgt_ctx[pos]
        return _rebuild(pair, src_ctx, tgt_ctx, separator)

    # DROP_RANDOM: positions drawn independently per designated side
    if spec.side in (NoiseSide.SOURCE, NoiseSide.BOTH):
        for _ in range(min(spec.repeats, len(src_ctx))):
            del src_ctx[rng.randrange(len(src_ctx))]
    if spec.side in (NoiseSide.TRANSLATION, NoiseSide.BOTH):
        for _ in range(min(spec.repeats, len(tgt_ctx))):
            del tgt_ctx[rng.randrange(len(tgt_ctx))]
    return _rebuild(pair, src_ctx, tgt_ctx, separator)


def _pick_donor(
    pair: ContextualizedPair, donors: list[ContextualizedPair], rng: random.Random
) -> Optional[ContextualizedPair]:
    # Prefer a donor from another conversation; unrelated context is the point.
    candidates = [d for d in donors if d.conversation_id != pair.conversation_id and d.k_used > 0]
    if not candidates:
        candidates = [d for d in donors if d.key != pair.key and d.k_used > 0]
    if not candidates:
        return None
    return candidates[rng.randrange(len(candidates))]


def perturb_batch(
    pairs: list[ContextualizedPair], spec: NoiseSpec, separator: str = DEFAULT_SEPARATOR
) -> list[ContextualizedPair]:
    return [perturb(pair, pairs, spec, separator) for pair in pairs]
