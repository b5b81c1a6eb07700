"""Read/write the harness interchange formats.

The adapter talks to the evaluation harness exclusively through files:
segment batches come in as JSON Lines under the ``chatqe.batch.v1`` schema
(one header record, then one record per segment), and scores go out as TSV
rows ``conversation_id<TAB>turn_index<TAB>system_id<TAB>score`` under a
``# metric=... run=...`` comment header.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

BATCH_SCHEMA = "chatqe.batch.v1"

SegmentKey = tuple[str, int, str]


class BatchFormatError(ValueError):
    pass


@dataclass(frozen=True)
class BatchRecord:
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

    @property
    def key(self) -> SegmentKey:
        return (self.conversation_id, self.turn_index, self.system_id)


@dataclass(frozen=True)
class Batch:
    batch_id: str
    records: tuple[BatchRecord, ...]

    def keys(self) -> list[SegmentKey]:
        return [r.key for r in self.records]


@dataclass
class ScoreTable:
    metric_name: str
    run_id: str
    scores: dict = field(default_factory=dict)


_FIELDS = (
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


def read_batch(path) -> Batch:
    with open(path, encoding="utf-8") as fh:
        lines = [line for line in fh.read().splitlines() if line.strip()]
    if not lines:
        raise BatchFormatError(f"{path}: empty batch file")
    header = json.loads(lines[0])
    if header.get("schema") != BATCH_SCHEMA:
        raise BatchFormatError(f"{path}: unsupported schema {header.get('schema')!r}")
    records = []
    for line_no, line in enumerate(lines[1:], start=2):
        obj = json.loads(line)
        try:
            records.append(BatchRecord(**{name: obj[name] for name in _FIELDS}))
        except KeyError as exc:
            raise BatchFormatError(f"{path}:{line_no}: missing field {exc}") from exc
    if header.get("count") != len(records):
        raise BatchFormatError(
            f"{path}: header count {header.get('count')} != {len(records)} records"
        )
    return Batch(batch_id=header["batch_id"], records=tuple(records))


def write_scores(table: ScoreTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# metric={table.metric_name} run={table.run_id}\n")
        for (cid, tidx, sid), score in table.scores.items():
            fh.write(f"{cid}\t{tidx}\t{sid}\t{score!r}\n")


def read_scores(path) -> ScoreTable:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    metric_name, run_id = "unknown", "unknown"
    scores = {}
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
            raise BatchFormatError(f"{path}:{line_no}: expected 4 fields, got {len(fields)}")
        scores[(fields[0], int(fields[1]), fields[2])] = float(fields[3])
    return ScoreTable(metric_name=metric_name, run_id=run_id, scores=scores)
