"""Rank-correlation meta-evaluation of metric scores against human judgments.

Spearman's rho is the Pearson correlation of average ranks. Correlations are
computed per subset (all vs. imperfect segments, plus optional filters on
direction, language pair, source length, error category, severity, external
tags) and per group, with unweighted per-direction averages across language
pairs. Undefined correlations (constant input, n < 2) are reported as such,
never coerced to zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bridge import ScoreTable, SegmentKey
from .corpus import Corpus, Severity
from .errors import KeyAlignmentError

MIN_CATEGORY_INSTANCES = 20  # error-type groups below this are flagged

GROUPINGS = ("overall", "direction", "language_pair")


def average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks; ties receive the mean of the ranks they span."""
    if len(values) == 0:
        raise ValueError("cannot rank an empty list")
    arr = np.asarray(values, dtype=float)
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(len(arr), dtype=float)
    i = 0
    while i < len(arr):
        j = i
        while j + 1 < len(arr) and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks.tolist()


def spearman(xs: Sequence[float], ys: Sequence[float]) -> Optional[float]:
    """Pearson correlation of average ranks; None when undefined."""
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 2:
        return None
    rx = np.asarray(average_ranks(xs))
    ry = np.asarray(average_ranks(ys))
    sx = rx - rx.mean()
    sy = ry - ry.mean()
    denom = np.sqrt((sx * sx).sum() * (sy * sy).sum())
    if denom == 0.0:
        return None
    return float((sx * sy).sum() / denom)


@dataclass(frozen=True)
class SubsetSpec:
    quality: str = "all"  # "all" | "imperfect"
    direction: Optional[str] = None
    language_pair: Optional[str] = None
    length_bucket: Optional[tuple] = None  # (lo, hi]; hi=None means unbounded
    error_category: Optional[str] = None
    severity: Optional[str] = None
    required_external_tag: Optional[str] = None

    def describe(self) -> str:
        parts = [self.quality]
        if self.direction:
            parts.append(f"dir={self.direction}")
        if self.language_pair:
            parts.append(f"lp={self.language_pair}")
        if self.length_bucket:
            lo, hi = self.length_bucket
            parts.append(f"len=({lo},{'inf' if hi is None else hi}]")
        if self.error_category:
            parts.append(f"cat={self.error_category}")
        if self.severity:
            parts.append(f"sev={self.severity}")
        if self.required_external_tag:
            parts.append(f"tag={self.required_external_tag}")
        return ",".join(parts)


@dataclass(frozen=True)
class SegmentMeta:
    direction: str
    language_pair: str
    source_length: int
    categories: frozenset
    severities: frozenset
    tags: frozenset


def segment_metadata(corpus: Corpus) -> dict[SegmentKey, SegmentMeta]:
    meta = {}
    for conv, turn, out in corpus.segments():
        key = (conv.conversation_id, turn.index, out.system_id)
        meta[key] = SegmentMeta(
            direction=turn.speaker.value,
            language_pair=str(conv.direction(turn)),
            source_length=len(turn.source),
            categories=frozenset(e.category for e in out.errors if e.severity is not Severity.NEUTRAL),
            severities=frozenset(e.severity.value for e in out.errors),
            tags=out.external_tags,
        )
    return meta


def filter_subset(corpus: Corpus, human: ScoreTable, spec: SubsetSpec) -> list[SegmentKey]:
    """Segment keys matching every filter of the spec, in corpus order."""
    meta = segment_metadata(corpus)
    keys = []
    for key, m in meta.items():
        if key not in human.scores:
            continue
        if spec.quality == "imperfect" and not human.scores[key] < 0:
            continue
        if spec.direction and m.direction != spec.direction:
            continue
        if spec.language_pair and m.language_pair != spec.language_pair:
            continue
        if spec.length_bucket:
            lo, hi = spec.length_bucket
            if not (m.source_length > lo and (hi is None or m.source_length <= hi)):
                continue
        if spec.error_category and spec.error_category not in m.categories:
            continue
        if spec.severity and spec.severity not in m.severities:
            continue
        if spec.required_external_tag and spec.required_external_tag not in m.tags:
            continue
        keys.append(key)
    return keys


@dataclass(frozen=True)
class CorrelationResult:
    metric_name: str
    subset: str
    group: str
    rho: Optional[float]
    n: int
    reason: Optional[str] = None
    flags: tuple = ()


@dataclass
class MetaEvalReport:
    results: list[CorrelationResult] = field(default_factory=list)
    averages: list[CorrelationResult] = field(default_factory=list)
    comparisons: list[dict] = field(default_factory=list)


def _correlate(metric: ScoreTable, human: ScoreTable, keys, subset_desc, group, flags=()) -> CorrelationResult:
    missing = [k for k in keys if k not in metric.scores]
    if missing:
        raise KeyAlignmentError(missing)
    xs = [metric.scores[k] for k in keys]
    ys = [human.scores[k] for k in keys]
    if len(keys) < 2:
        return CorrelationResult(metric.metric_name, subset_desc, group, None, len(keys), "n < 2", flags)
    rho = spearman(xs, ys)
    reason = None if rho is not None else "constant scores; rank correlation undefined"
    return CorrelationResult(metric.metric_name, subset_desc, group, rho, len(keys), reason, flags)


def metaeval(
    score_tables: list[ScoreTable],
    human: ScoreTable,
    corpus: Corpus,
    specs: list[SubsetSpec],
    grouping: str = "overall",
    comparisons: Optional[list[tuple[str, str]]] = None,
) -> MetaEvalReport:
    """One correlation per (metric, subset, group); per-direction unweighted
    means across language pairs when grouping by language pair."""
    if grouping not in GROUPINGS:
        raise ValueError(f"unknown grouping {grouping!r}; expected one of {GROUPINGS}")
    meta = segment_metadata(corpus)
    report = MetaEvalReport()
    for spec in specs:
        keys = filter_subset(corpus, human, spec)
        if grouping == "overall":
            groups = {"overall": keys}
        elif grouping == "direction":
            groups = {}
            for key in keys:
                groups.setdefault(meta[key].direction, []).append(key)
        else:
            groups = {}
            for key in keys:
                groups.setdefault(meta[key].language_pair, []).append(key)

        for table in score_tables:
            per_direction: dict[str, list[float]] = {}
            for group_name in sorted(groups):
                group_keys = groups[group_name]
                flags = ()
                if spec.error_category and len(group_keys) < MIN_CATEGORY_INSTANCES:
                    flags = ("below-min-instances",)
                result = _correlate(table, human, group_keys, spec.describe(), group_name, flags)
                report.results.append(result)
                if grouping == "language_pair" and result.rho is not None:
                    direction = meta[group_keys[0]].direction
                    per_direction.setdefault(direction, []).append(result.rho)
            for direction in sorted(per_direction):
                rhos = per_direction[direction]
                report.averages.append(
                    CorrelationResult(
                        table.metric_name,
                        spec.describe(),
                        f"average_{direction}",
                        float(np.mean(rhos)),
                        len(rhos),
                    )
                )

    if comparisons:
        by_metric = {t.metric_name: t for t in score_tables}
        for name_a, name_b in comparisons:
            rows_a = {(r.subset, r.group): r for r in report.results if r.metric_name == name_a}
            rows_b = {(r.subset, r.group): r for r in report.results if r.metric_name == name_b}
            for cell in sorted(rows_a.keys() & rows_b.keys()):
                a, b = rows_a[cell], rows_b[cell]
                delta = None if a.rho is None or b.rho is None else a.rho - b.rho
                report.comparisons.append(
                    {"metrics": [name_a, name_b], "subset": cell[0], "group": cell[1], "delta_rho": delta}
                )
        del by_metric
    return report


def _result_row(r: CorrelationResult) -> tuple:
    rho = "" if r.rho is None else f"{r.rho:.6f}"
    return (r.metric_name, r.subset, r.group, rho, str(r.n), r.reason or "", ";".join(r.flags))


def write_report_tsv(report: MetaEvalReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("metric\tsubset\tgroup\tspearman_rho\tn\treason\tflags\n")
        for r in report.results + report.averages:
            fh.write("\t".join(_result_row(r)) + "\n")


def report_to_json(report: MetaEvalReport) -> str:
    def as_obj(r: CorrelationResult) -> dict:
        return {
            "metric": r.metric_name,
            "subset": r.subset,
            "group": r.group,
            "spearman_rho": r.rho,
            "n": r.n,
            "reason": r.reason,
            "flags": list(r.flags),
        }

    payload = {
        "results": [as_obj(r) for r in report.results],
        "averages": [as_obj(r) for r in report.averages],
        "comparisons": report.comparisons,
    }
    return json.dumps(payload, ensure_ascii=False, indent=2)


def write_report_json(report: MetaEvalReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report_to_json(report) + "\n")


def write_plot_data_csv(entries: list[dict], path) -> None:
    """Context-sweep plot data: one (metric, subset, group, k, rho) row each."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("metric,subset,group,k,spearman_rho\n")
        for e in entries:
            rho = "" if e.get("spearman_rho") is None else f"{e['spearman_rho']:.6f}"
            fh.write(f"{e['metric']},{e['subset']},{e['group']},{e['k']},{rho}\n")
