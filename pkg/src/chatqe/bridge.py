"""File interfaces between the harness and (external) scorers.

Segment batches are JSON Lines with a header record; score files are TSV with
a comment header naming the metric and run. Both are UTF-8 with LF newlines
and deterministic byte-for-byte given the same inputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

from . import lexical
from .context import ContextualizedPair
from .errors import BatchError, ScoreImportError

BATCH_SCHEMA = "chatqe.batch.v1"

SegmentKey = tuple[str, int, str]

_RECORD_FIELDS = (
    "conversation_id",
    "turn_index",
    "system_id",
    "src_augmented",
    "tgt_hyp_augmented",
    "tgt_ref_augmented",
    "src_current_offset",
    "tgt_current_offset",
    "k_used",
    "language_pair",
    "direction",
)


@dataclass(frozen=True)
class SegmentBatch:
    batch_id: str
    pairs: tuple[ContextualizedPair, ...]

    def keys(self) -> list[SegmentKey]:
        return [p.key for p in self.pairs]


@dataclass
class ScoreTable:
    metric_name: str
    run_id: str
    scores: dict[SegmentKey, float] = field(default_factory=dict)


@dataclass(frozen=True)
class MetricRun:
    metric_name: str
    k: int = 0
    setting: str = "across"
    mode: str = "reference"
    noise: Optional[str] = None
    note: str = ""

    @property
    def run_id(self) -> str:
        parts = [self.metric_name, f"k{self.k}", self.setting, self.mode]
        if self.noise:
            parts.append(self.noise)
        return "-".join(parts)


def batch_lines(pairs: list[ContextualizedPair], batch_id: str) -> list[str]:
    """Serialized batch as a list of JSON lines (header first)."""
    seen = set()
    for pair in pairs:
        if pair.key in seen:
            raise BatchError(f"duplicate segment_key {pair.key}")
        seen.add(pair.key)
    lines = [json.dumps({"batch_id": batch_id, "schema": BATCH_SCHEMA, "count": len(pairs)}, ensure_ascii=False)]
    for pair in pairs:
        record = {name: getattr(pair, name) for name in _RECORD_FIELDS}
        lines.append(json.dumps(record, ensure_ascii=False))
    return lines


def export_batch(pairs: list[ContextualizedPair], batch_id: str, path) -> SegmentBatch:
    if not pairs:
        raise BatchError("cannot export an empty batch")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(batch_lines(pairs, batch_id)) + "\n")
    return SegmentBatch(batch_id=batch_id, pairs=tuple(pairs))


def read_batch(path) -> SegmentBatch:
    with open(path, encoding="utf-8") as fh:
        lines = [line for line in fh.read().splitlines() if line.strip()]
    if not lines:
        raise BatchError(f"{path}: empty batch file")
    header = json.loads(lines[0])
    if header.get("schema") != BATCH_SCHEMA:
        raise BatchError(f"{path}: unknown schema {header.get('schema')!r}")
    pairs = []
    for line in lines[1:]:
        obj = json.loads(line)
        pairs.append(ContextualizedPair(**{name: obj[name] for name in _RECORD_FIELDS}))
    if header.get("count") != len(pairs):
        raise BatchError(f"{path}: header count {header.get('count')} != {len(pairs)} records")
    return SegmentBatch(batch_id=header["batch_id"], pairs=tuple(pairs))


def write_scores(table: ScoreTable, path) -> None:
    """Score TSV: one `conversation_id  turn_index  system_id  score` row per
    segment under a `# metric=... run=...` header."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# metric={table.metric_name} run={table.run_id}\n")
        for (cid, tidx, sid), score in table.scores.items():
            fh.write(f"{cid}\t{tidx}\t{sid}\t{score!r}\n")


def read_scores(path) -> ScoreTable:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    metric_name, run_id = "unknown", "unknown"
    scores: dict[SegmentKey, float] = {}
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            for token in line.lstrip("# ").split():
                if token.startswith("metric="):
                    metric_name = token.split("=", 1)[1]
                elif token.startswith("run="):
                    run_id = token.split("=", 1)[1]
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise ScoreImportError(f"{path}:{line_no}: expected 4 tab-separated fields, got {len(fields)}")
        key = (fields[0], int(fields[1]), fields[2])
        if key in scores:
            raise ScoreImportError(f"{path}:{line_no}: duplicate key {key}")
        scores[key] = float(fields[3])
    return ScoreTable(metric_name=metric_name, run_id=run_id, scores=scores)


def import_scores(path, expected_batch: SegmentBatch) -> ScoreTable:
    """Read a score file and check it covers the batch exactly once."""
    table = read_scores(path)
    expected = set(expected_batch.keys())
    got = set(table.scores)
    missing = expected - got
    if missing:
        raise ScoreImportError(f"missing scores for keys: {sorted(missing)}")
    extra = got - expected
    if extra:
        raise ScoreImportError(f"unknown keys not in batch: {sorted(extra)}")
    for key, value in table.scores.items():
        if not math.isfinite(value):
            raise ScoreImportError(f"non-finite score for {key}: {value!r}")
    return table


def native_score_batch(
    batch: SegmentBatch, metric: str, run_id: Optional[str] = None
) -> tuple[ScoreTable, list[str]]:
    """Score the current instance of each segment with a lexical metric.

    Context is stripped via the recorded offsets, so scores are invariant to
    k. Segments without a reference are skipped with a warning.
    """
    if metric == "bleu":
        score_fn = lexical.sentence_bleu
    elif metric == "chrf":
        score_fn = lexical.sentence_chrf
    else:
        raise BatchError(f"unknown native metric {metric!r}")

    table = ScoreTable(metric_name=metric, run_id=run_id or f"{metric}-{batch.batch_id}")
    warnings = []
    for pair in batch.pairs:
        reference = pair.current_reference
        if reference is None:
            warnings.append(f"{pair.key}: no reference; segment skipped")
            continue
        table.scores[pair.key] = score_fn(pair.current_hypothesis, reference)
    return table, warnings
