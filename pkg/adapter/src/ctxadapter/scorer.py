"""Context-aware scoring with current-instance pooling.

Each augmented side (context sentences, a separator tag, then the current
sentence) is encoded whole, but only the token representations whose
character spans overlap the current instance are mean-pooled before the
regression head. With k=0 there is no context, the pooling window covers
the full sequence, and the score equals the plain checkpoint score.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import torch
import yaml

from .batchio import Batch, ScoreTable
from .checkpoint import Checkpoint

DEFAULT_SEPARATOR = "<sep>"


@dataclass(frozen=True)
class AdapterConfig:
    batch_size: int = 16
    device: str = "cpu"
    max_length: Optional[int] = None  # None: the encoder's position limit
    separator: str = DEFAULT_SEPARATOR
    metric_name: str = "ctx-adapter"

    @classmethod
    def from_yaml(cls, path) -> "AdapterConfig":
        with open(path, encoding="utf-8") as fh:
            payload = yaml.safe_load(fh) or {}
        return cls(**payload)


@dataclass(frozen=True)
class PoolingWindow:
    """Token index range (inclusive start, exclusive end) covering the
    current instance within one encoded side."""

    start: int
    end: int

    def __post_init__(self):
        if self.end <= self.start:
            raise ValueError(f"empty pooling window [{self.start}, {self.end})")

    def indices(self) -> list[int]:
        return list(range(self.start, self.end))


def pooling_window(offsets, current_offset: int, text_length: int) -> PoolingWindow:
    """Derive the pooling window from a tokenizer offset mapping.

    Selects exactly the tokens whose character spans intersect
    [current_offset, text_length); special tokens carry the (0, 0) span and
    never match.
    """
    selected = [
        i
        for i, (start, end) in enumerate(offsets)
        if end > start and end > current_offset and start < text_length
    ]
    if not selected:
        raise ValueError(f"no tokens cover [{current_offset}, {text_length})")
    return PoolingWindow(start=selected[0], end=selected[-1] + 1)


def _drop_oldest_context(text: str, offset: int, separator: str) -> tuple[str, int]:
    sep = f" {separator} "
    context = text[: offset - len(sep)].split(sep)
    current = text[offset:]
    context = context[1:]
    if not context:
        return current, 0
    prefix = sep.join(context) + sep
    return prefix + current, len(prefix)


def _fit_to_length(checkpoint: Checkpoint, text: str, offset: int, max_length: int, separator: str):
    """Drop oldest context sentences until the encoding fits; the current
    instance itself is never truncated."""
    dropped = 0
    while offset > 0:
        n_tokens = len(checkpoint.tokenizer(text)["input_ids"])
        if n_tokens <= max_length:
            break
        text, offset = _drop_oldest_context(text, offset, separator)
        dropped += 1
    return text, offset, dropped


def encode_pooled(
    checkpoint: Checkpoint,
    sides: list[tuple[str, int]],
    config: AdapterConfig = AdapterConfig(),
) -> tuple[torch.Tensor, list[str]]:
    """Encode (text, current_offset) sides and mean-pool each current instance.

    Returns a (len(sides), hidden) tensor and a list of truncation warnings.
    """
    max_length = config.max_length or checkpoint.max_length
    warnings: list[str] = []
    fitted = []
    for i, (text, offset) in enumerate(sides):
        text, offset, dropped = _fit_to_length(checkpoint, text, offset, max_length, config.separator)
        if dropped:
            warnings.append(f"side {i}: dropped {dropped} context sentence(s) to fit {max_length} tokens")
        fitted.append((text, offset))

    pooled_rows = []
    with torch.no_grad():
        for lo in range(0, len(fitted), config.batch_size):
            chunk = fitted[lo : lo + config.batch_size]
            encoding = checkpoint.tokenizer(
                [text for text, _ in chunk],
                return_offsets_mapping=True,
                return_tensors="pt",
                padding=True,
                truncation=True,
                max_length=max_length,
            )
            offsets_map = encoding.pop("offset_mapping")
            encoding = {k: v.to(config.device) for k, v in encoding.items()}
            hidden = checkpoint.encoder(**encoding).last_hidden_state
            for row, (text, offset) in enumerate(chunk):
                window = pooling_window(offsets_map[row].tolist(), offset, len(text))
                pooled_rows.append(hidden[row, window.start : window.end].mean(dim=0))
    return torch.stack(pooled_rows), warnings


def _regress(checkpoint: Checkpoint, src, hyp, ref=None) -> torch.Tensor:
    if ref is None:
        features = torch.cat([hyp, src, hyp * src, (hyp - src).abs()], dim=-1)
        return checkpoint.head_qe(features).squeeze(-1)
    features = torch.cat(
        [hyp, src, ref, hyp * src, hyp * ref, (hyp - src).abs(), (hyp - ref).abs()], dim=-1
    )
    return checkpoint.head_ref(features).squeeze(-1)


def score_pair(
    checkpoint: Checkpoint,
    source: str,
    hypothesis: str,
    reference: Optional[str] = None,
    config: AdapterConfig = AdapterConfig(),
) -> float:
    """Plain (context-free) checkpoint score for one raw segment."""
    sides = [(source, 0), (hypothesis, 0)]
    if reference is not None:
        sides.append((reference, 0))
    pooled, _ = encode_pooled(checkpoint, sides, config)
    ref_vec = pooled[2:3] if reference is not None else None
    with torch.no_grad():
        return float(_regress(checkpoint, pooled[0:1], pooled[1:2], ref_vec)[0])


def adapt_score_batch(
    batch: Batch,
    checkpoint: Checkpoint,
    reference_free: bool = False,
    config: AdapterConfig = AdapterConfig(),
    run_id: Optional[str] = None,
) -> tuple[ScoreTable, list[str]]:
    """Score every segment of a batch; returns (score table, warnings)."""
    checkpoint.to(config.device)
    table = ScoreTable(
        metric_name=config.metric_name,
        run_id=run_id or f"{config.metric_name}-{batch.batch_id}",
    )
    warnings: list[str] = []
    records = []
    for record in batch.records:
        if not reference_free and record.tgt_ref_augmented is None:
            warnings.append(f"{record.key}: no reference; segment skipped")
            continue
        records.append(record)
    if not records:
        return table, warnings

    src_pooled, w = encode_pooled(
        checkpoint, [(r.src_augmented, r.src_current_offset) for r in records], config
    )
    warnings += [f"src: {msg}" for msg in w]
    hyp_pooled, w = encode_pooled(
        checkpoint, [(r.tgt_hyp_augmented, r.tgt_current_offset) for r in records], config
    )
    warnings += [f"hyp: {msg}" for msg in w]
    ref_pooled = None
    if not reference_free:
        ref_pooled, w = encode_pooled(
            checkpoint, [(r.tgt_ref_augmented, r.tgt_current_offset) for r in records], config
        )
        warnings += [f"ref: {msg}" for msg in w]

    with torch.no_grad():
        scores = _regress(checkpoint, src_pooled, hyp_pooled, ref_pooled)
    for record, score in zip(records, scores.tolist()):
        table.scores[record.key] = float(score)
    return table, warnings
