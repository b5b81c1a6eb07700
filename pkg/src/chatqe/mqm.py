"""Severity-weighted sentence scores from MQM error annotations.

The raw score is ``-(minor + 5*major + 10*critical)``; neutral annotations
carry weight zero. The scaled score shifts the raw score by +100 so that the
customer-utility (CUA) buckets, which are defined on a 0-100 range, apply.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable

from .corpus import Corpus, MqmError, Severity

MINOR_WEIGHT = 1
MAJOR_WEIGHT = 5
CRITICAL_WEIGHT = 10
SCALE_SHIFT = 100


@dataclass(frozen=True)
class SeverityCounts:
    minor: int = 0
    major: int = 0
    critical: int = 0

    def __add__(self, other: "SeverityCounts") -> "SeverityCounts":
        return SeverityCounts(
            self.minor + other.minor,
            self.major + other.major,
            self.critical + other.critical,
        )


@dataclass(frozen=True)
class MqmScore:
    raw: float

    @property
    def scaled(self) -> float:
        return self.raw + SCALE_SHIFT


class CuaBucket(IntEnum):
    WEAK = 0
    MODERATE = 1
    GOOD = 2
    EXCELLENT = 3

    def __str__(self):
        return self.name.lower()


def count_severities(errors: Iterable[MqmError]) -> SeverityCounts:
    """Tally minor/major/critical annotations; neutral ones are ignored."""
    minor = major = critical = 0
    for err in errors:
        if err.severity is Severity.MINOR:
            minor += 1
        elif err.severity is Severity.MAJOR:
            major += 1
        elif err.severity is Severity.CRITICAL:
            critical += 1
    return SeverityCounts(minor, major, critical)


def mqm_score(counts: SeverityCounts) -> MqmScore:
    raw = -(counts.minor * MINOR_WEIGHT + counts.major * MAJOR_WEIGHT + counts.critical * CRITICAL_WEIGHT)
    return MqmScore(raw=float(raw))


def cua_bucket(score: MqmScore) -> CuaBucket:
    """Bucket a scaled score; boundaries 40/60/80 belong to the upper bucket."""
    s = score.scaled
    if s < 40:
        return CuaBucket.WEAK
    if s < 60:
        return CuaBucket.MODERATE
    if s < 80:
        return CuaBucket.GOOD
    return CuaBucket.EXCELLENT


def is_imperfect(score: MqmScore) -> bool:
    return score.raw < 0


def score_errors(errors: Iterable[MqmError]) -> MqmScore:
    return mqm_score(count_severities(errors))


def segment_score_rows(corpus: Corpus) -> list[tuple]:
    """Per-segment score rows: (conversation_id, turn_index, system_id, raw,
    scaled, bucket, imperfect)."""
    rows = []
    for conv, turn, out in corpus.segments():
        score = score_errors(out.errors)
        rows.append(
            (
                conv.conversation_id,
                turn.index,
                out.system_id,
                score.raw,
                score.scaled,
                str(cua_bucket(score)),
                int(is_imperfect(score)),
            )
        )
    return rows


def write_segment_scores(corpus: Corpus, path) -> None:
    """Segment-score TSV: conversation_id, turn_index, system_id, raw_mqm,
    scaled_mqm, cua_bucket, imperfect."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("conversation_id\tturn_index\tsystem_id\traw_mqm\tscaled_mqm\tcua_bucket\timperfect\n")
        for row in segment_score_rows(corpus):
            fh.write("\t".join(str(v) for v in row) + "\n")
