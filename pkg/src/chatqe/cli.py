"""Command-line surface tying the pipeline together.

Exit codes: 0 success, 1 data error, 2 usage error. Every mutating command
writes a ``<output>.manifest.json`` capturing the command, configuration,
input hashes, and seed, so a run can be reproduced.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, bridge, llm, mqm, stats
from .metaeval import metaeval as run_metaeval
from .metaeval import (
    GROUPINGS as METAEVAL_GROUPINGS,
    SubsetSpec,
    write_plot_data_csv,
    write_report_json,
    write_report_tsv,
)
from .context import ContextSetting, TargetContextMode, contextify_corpus
from .corpus import parse_corpus, validate
from .errors import ChatQeError
from .perturb import NoiseKind, NoiseSide, NoiseSpec, perturb_batch


def _hash_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_path, command: str, config: dict, inputs: list, seed=None) -> None:
    manifest = {
        "command": command,
        "config": config,
        "inputs": {str(p): _hash_file(p) for p in inputs if p and Path(p).exists()},
        "seed": seed,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    path = Path(str(out_path) + ".manifest.json")
    path.write_text(json.dumps(manifest, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


def cmd_validate(args) -> int:
    corpus = parse_corpus(args.corpus, strict=False)
    violations = validate(corpus)
    for v in violations:
        print(v, file=sys.stderr)
    print(f"{len(violations)} violations")
    return 0 if not violations else 1


def cmd_stats(args) -> int:
    corpus = parse_corpus(args.corpus)
    report = stats.corpus_stats(corpus, grouping=args.group_by)
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    stats.write_stats_tsv(report, args.out + ".tsv")
    stats.write_stats_json(report, args.out + ".json")
    write_manifest(args.out, "stats", {"group_by": args.group_by}, [args.corpus])
    print(f"wrote {args.out}.tsv and {args.out}.json")
    return 0


def cmd_mqm_score(args) -> int:
    corpus = parse_corpus(args.corpus)
    mqm.write_segment_scores(corpus, args.out)
    if args.score_file:
        table = bridge.ScoreTable(metric_name="human-mqm", run_id="mqm-raw")
        for cid, tidx, sid, raw, _, _, _ in mqm.segment_score_rows(corpus):
            table.scores[(cid, tidx, sid)] = raw
        bridge.write_scores(table, args.score_file)
    write_manifest(args.out, "mqm-score", {"score_file": args.score_file}, [args.corpus])
    print(f"wrote {args.out}")
    return 0


def cmd_contextify(args) -> int:
    corpus = parse_corpus(args.corpus)
    pairs = contextify_corpus(
        corpus,
        system_id=args.system,
        k=args.k,
        setting=ContextSetting(args.setting),
        mode=TargetContextMode(args.target_context),
        separator=args.separator,
    )
    for pair in pairs:
        if pair.warning:
            print(f"warning: {pair.key}: {pair.warning}", file=sys.stderr)
    batch_id = args.batch_id or f"{Path(args.corpus).stem}-{args.system}-k{args.k}-{args.setting}"
    bridge.export_batch(pairs, batch_id, args.out)
    write_manifest(
        args.out,
        "contextify",
        {
            "system": args.system,
            "k": args.k,
            "setting": args.setting,
            "target_context": args.target_context,
            "separator": args.separator,
        },
        [args.corpus],
    )
    print(f"wrote {args.out} ({len(pairs)} segments)")
    return 0


def cmd_perturb(args) -> int:
    batch = bridge.read_batch(args.batch)
    spec = NoiseSpec(
        kind=NoiseKind(args.kind), side=NoiseSide(args.side), seed=args.seed, repeats=args.repeats
    )
    perturbed = perturb_batch(list(batch.pairs), spec, separator=args.separator)
    for pair in perturbed:
        if pair.warning:
            print(f"warning: {pair.key}: {pair.warning}", file=sys.stderr)
    bridge.export_batch(perturbed, f"{batch.batch_id}-{args.kind}", args.out)
    write_manifest(
        args.out,
        "perturb",
        {"kind": args.kind, "side": args.side, "repeats": args.repeats, "separator": args.separator},
        [args.batch],
        seed=args.seed,
    )
    print(f"wrote {args.out} ({len(perturbed)} segments)")
    return 0


def cmd_score(args) -> int:
    batch = bridge.read_batch(args.batch)
    table, warnings = bridge.native_score_batch(batch, args.metric, run_id=args.run_id)
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    bridge.write_scores(table, args.out)
    write_manifest(args.out, "score", {"metric": args.metric}, [args.batch])
    print(f"wrote {args.out} ({len(table.scores)} scores)")
    return 0


def cmd_import_scores(args) -> int:
    batch = bridge.read_batch(args.batch)
    table = bridge.import_scores(args.scores, batch)
    print(f"ok: {len(table.scores)} scores aligned with batch {batch.batch_id}")
    return 0


def cmd_llm_eval(args) -> int:
    corpus = parse_corpus(args.corpus)
    config = llm.LlmEndpointConfig(
        base_url=args.endpoint_url,
        model=args.model,
        temperature=args.temperature,
        max_tokens=args.max_tokens,
        timeout=args.timeout,
        max_parallel=args.max_parallel,
        retries=args.retries,
    )
    cache_dir = args.cache_dir or os.environ.get("CHATQE_CACHE_DIR", ".chatqe-cache")
    prompted = llm.build_prompts(corpus, system_id=args.system, k=args.k)
    outcome = llm.evaluate_batch(
        prompted, config, cache_dir, archive_path=args.archive, cap=args.severity_cap
    )
    for key, message in outcome.failures:
        print(f"failed: {key}: {message}", file=sys.stderr)
    for key, message in outcome.warnings:
        print(f"warning: {key}: {message}", file=sys.stderr)
    bridge.write_scores(outcome.scores, args.out)
    write_manifest(
        args.out,
        "llm-eval",
        {"system": args.system, "k": args.k, "model": args.model, "endpoint": args.endpoint_url},
        [args.corpus],
    )
    print(f"wrote {args.out} ({len(outcome.scores.scores)} scores, {len(outcome.failures)} failures)")
    return 0 if not outcome.failures else 1


def cmd_metaeval(args) -> int:
    corpus = parse_corpus(args.corpus)
    human = bridge.read_scores(args.human)
    tables = [bridge.read_scores(p) for p in args.scores]
    spec_kwargs = {"quality": args.subset}
    if args.direction:
        spec_kwargs["direction"] = args.direction
    if args.language_pair:
        spec_kwargs["language_pair"] = args.language_pair
    specs = [SubsetSpec(**spec_kwargs)]
    report = run_metaeval(tables, human, corpus, specs, grouping=args.group_by)
    write_report_tsv(report, args.out + ".tsv")
    write_report_json(report, args.out + ".json")
    write_manifest(
        args.out,
        "metaeval",
        {"subset": args.subset, "group_by": args.group_by},
        [args.corpus, args.human, *args.scores],
    )
    print(f"wrote {args.out}.tsv and {args.out}.json ({len(report.results)} cells)")
    return 0


def cmd_report(args) -> int:
    entries = []
    for path in args.reports:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        k = payload.get("k")
        if k is None:
            # fall back to the contextify config recorded in the manifest chain
            manifest = Path(str(path) + ".manifest.json")
            k = 0
            if manifest.exists():
                k = json.loads(manifest.read_text(encoding="utf-8")).get("config", {}).get("k", 0)
        for row in payload["results"] + payload.get("averages", []):
            entries.append(
                {
                    "metric": row["metric"],
                    "subset": row["subset"],
                    "group": row["group"],
                    "k": k,
                    "spearman_rho": row["spearman_rho"],
                }
            )
            rho = "n/a" if row["spearman_rho"] is None else f"{row['spearman_rho']:+.4f}"
            print(f"{row['metric']:<16} {row['subset']:<24} {row['group']:<18} n={row['n']:<6} rho={rho}")
    if args.plot_data:
        write_plot_data_csv(entries, args.plot_data)
        print(f"wrote {args.plot_data}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chatqe", description=__doc__)
    parser.add_argument("--version", action="version", version=f"chatqe {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check corpus invariants")
    p.add_argument("corpus")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", help="corpus quality statistics")
    p.add_argument("corpus")
    p.add_argument("--group-by", choices=stats.GROUPINGS, default="overall")
    p.add_argument("--out", required=True, help="output prefix (.tsv and .json are appended)")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("mqm-score", help="severity-weighted segment scores from annotations")
    p.add_argument("corpus")
    p.add_argument("--out", required=True, help="segment-score TSV")
    p.add_argument("--score-file", help="also write a metric-style score file of raw scores")
    p.set_defaults(func=cmd_mqm_score)

    p = sub.add_parser("contextify", help="build context-augmented segment batches")
    p.add_argument("corpus")
    p.add_argument("--system", required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--setting", choices=[s.value for s in ContextSetting], default="across")
    p.add_argument("--target-context", choices=[m.value for m in TargetContextMode], default="reference")
    p.add_argument("--separator", default="<sep>")
    p.add_argument("--batch-id")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_contextify)

    p = sub.add_parser("perturb", help="inject context noise into a batch")
    p.add_argument("batch")
    p.add_argument("--kind", choices=[k.value for k in NoiseKind], required=True)
    p.add_argument("--side", choices=[s.value for s in NoiseSide], default="both")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--separator", default="<sep>")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("score", help="score a batch with a native lexical metric")
    p.add_argument("batch")
    p.add_argument("--metric", choices=["bleu", "chrf"], required=True)
    p.add_argument("--run-id")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("import-scores", help="validate an external score file against a batch")
    p.add_argument("scores")
    p.add_argument("--batch", required=True)
    p.set_defaults(func=cmd_import_scores)

    p = sub.add_parser("llm-eval", help="MQM-style LLM evaluation with conversational context")
    p.add_argument("corpus")
    p.add_argument("--system", required=True)
    p.add_argument("--k", type=int, default=llm.DEFAULT_CONTEXT_K)
    p.add_argument("--endpoint-url", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--temperature", type=float, default=0.0)
    p.add_argument("--max-tokens", type=int, default=1024)
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("--max-parallel", type=int, default=4)
    p.add_argument("--retries", type=int, default=3)
    p.add_argument("--severity-cap", type=int)
    p.add_argument("--cache-dir", help="defaults to $CHATQE_CACHE_DIR or .chatqe-cache")
    p.add_argument("--archive", help="raw-response JSONL archive")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_llm_eval)

    p = sub.add_parser("metaeval", help="correlate metric scores with human judgments")
    p.add_argument("--scores", action="append", required=True)
    p.add_argument("--human", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--subset", choices=["all", "imperfect"], default="all")
    p.add_argument("--direction", choices=["agent", "customer"])
    p.add_argument("--language-pair")
    p.add_argument("--group-by", choices=METAEVAL_GROUPINGS, default="overall")
    p.add_argument("--out", required=True, help="output prefix (.tsv and .json are appended)")
    p.set_defaults(func=cmd_metaeval)

    p = sub.add_parser("report", help="render report JSONs and plot-data CSVs")
    p.add_argument("reports", nargs="+")
    p.add_argument("--plot-data", help="write (metric, subset, group, k, rho) CSV")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ChatQeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
