"""Corpus-level quality statistics: % perfect segments, CUA bucket counts,
normalized error-category histograms, and source-length distributions."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .corpus import Corpus, Severity
from .mqm import cua_bucket, score_errors

# Half-open char-length buckets (lo, hi]; only the first is grounded in
# observed short-segment behavior, the rest are configurable defaults.
DEFAULT_LENGTH_BUCKETS = ((0, 20), (20, 50), (50, 100), (100, None))

GROUPINGS = ("overall", "by_direction", "by_language_pair")


def bucket_label(bucket: tuple) -> str:
    lo, hi = bucket
    if hi is None:
        return f">{lo}"
    if lo == 0:
        return f"<={hi}"
    return f"{lo + 1}-{hi}"


def length_bucket_label(length: int, buckets=DEFAULT_LENGTH_BUCKETS) -> str:
    for lo, hi in buckets:
        if length > lo and (hi is None or length <= hi):
            return bucket_label((lo, hi))
    return bucket_label(buckets[0])


@dataclass
class GroupStats:
    n_segments: int = 0
    n_perfect: int = 0
    cua_counts: dict = field(default_factory=dict)
    error_category_counts: dict = field(default_factory=dict)
    source_length_counts: dict = field(default_factory=dict)

    @property
    def pct_perfect(self) -> float:
        return 100.0 * self.n_perfect / self.n_segments if self.n_segments else 0.0

    @property
    def error_category_hist(self) -> dict:
        # counts normalized by the number of annotated instances in the group
        if not self.n_segments:
            return {}
        return {cat: cnt / self.n_segments for cat, cnt in sorted(self.error_category_counts.items())}


@dataclass
class StatsReport:
    grouping: str
    groups: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)


def corpus_stats(corpus: Corpus, grouping: str = "overall", length_buckets=DEFAULT_LENGTH_BUCKETS) -> StatsReport:
    if grouping not in GROUPINGS:
        raise ValueError(f"unknown grouping {grouping!r}; expected one of {GROUPINGS}")
    report = StatsReport(grouping=grouping)
    for conv, turn, out in corpus.segments():
        if grouping == "overall":
            key = "overall"
        elif grouping == "by_direction":
            key = turn.speaker.value
        else:
            key = str(conv.direction(turn))
        group = report.groups.setdefault(key, GroupStats())
        group.n_segments += 1
        score = score_errors(out.errors)
        if score.raw == 0:
            group.n_perfect += 1
        bucket = str(cua_bucket(score))
        group.cua_counts[bucket] = group.cua_counts.get(bucket, 0) + 1
        for err in out.errors:
            if err.severity is Severity.NEUTRAL:
                continue
            group.error_category_counts[err.category] = group.error_category_counts.get(err.category, 0) + 1
        label = length_bucket_label(len(turn.source), length_buckets)
        group.source_length_counts[label] = group.source_length_counts.get(label, 0) + 1
    if not report.groups:
        report.warnings.append("no scored segments in corpus")
    return report


def stats_rows(report: StatsReport) -> list[tuple[str, str, str, str]]:
    """Flat (group, statistic, key, value) rows for TSV output."""
    rows = []
    for group_name in sorted(report.groups):
        group = report.groups[group_name]
        rows.append((group_name, "n_segments", "", str(group.n_segments)))
        rows.append((group_name, "pct_perfect", "", f"{group.pct_perfect:.4f}"))
        for bucket in ("weak", "moderate", "good", "excellent"):
            rows.append((group_name, "cua", bucket, str(group.cua_counts.get(bucket, 0))))
        for cat, value in group.error_category_hist.items():
            rows.append((group_name, "error_category_hist", cat, f"{value:.6f}"))
        for label in sorted(group.source_length_counts):
            rows.append((group_name, "source_length", label, str(group.source_length_counts[label])))
    return rows


def write_stats_tsv(report: StatsReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("group\tstatistic\tkey\tvalue\n")
        for row in stats_rows(report):
            fh.write("\t".join(row) + "\n")


def stats_to_json(report: StatsReport) -> str:
    payload = {
        "grouping": report.grouping,
        "warnings": report.warnings,
        "groups": {
            name: {
                "n_segments": g.n_segments,
                "pct_perfect": g.pct_perfect,
                "cua_counts": dict(sorted(g.cua_counts.items())),
                "error_category_hist": g.error_category_hist,
                "source_length_counts": dict(sorted(g.source_length_counts.items())),
            }
            for name, g in sorted(report.groups.items())
        },
    }
    return json.dumps(payload, ensure_ascii=False, indent=2)


def write_stats_json(report: StatsReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(stats_to_json(report) + "\n")
