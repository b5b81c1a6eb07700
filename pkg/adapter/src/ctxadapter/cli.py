"""Command-line entry points for the adapter.

``score`` reads a segment batch and writes a score file; ``init-checkpoint``
creates the small randomly initialized reference checkpoint used for demos
and tests.
"""

from __future__ import annotations

import argparse
import sys

from .batchio import read_batch, write_scores
from .checkpoint import load_checkpoint, make_tiny_checkpoint
from .scorer import AdapterConfig, adapt_score_batch


def cmd_score(args) -> int:
    batch = read_batch(args.batch)
    checkpoint = load_checkpoint(args.checkpoint)
    if args.config:
        config = AdapterConfig.from_yaml(args.config)
    else:
        config = AdapterConfig(
            batch_size=args.batch_size,
            device=args.device,
            max_length=args.max_length,
            separator=args.separator,
        )
    table, warnings = adapt_score_batch(
        batch, checkpoint, reference_free=args.reference_free, config=config, run_id=args.run_id
    )
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    write_scores(table, args.out)
    print(f"wrote {args.out} ({len(table.scores)} scores)")
    return 0


def cmd_init_checkpoint(args) -> int:
    make_tiny_checkpoint(args.directory, seed=args.seed, hidden_size=args.hidden_size)
    print(f"wrote checkpoint to {args.directory}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ctxadapter", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score a segment batch with current-instance pooling")
    p.add_argument("batch")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--reference-free", action="store_true")
    p.add_argument("--config", help="YAML file with AdapterConfig fields")
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--device", default="cpu")
    p.add_argument("--max-length", type=int)
    p.add_argument("--separator", default="<sep>")
    p.add_argument("--run-id")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("init-checkpoint", help="create a tiny random-initialized checkpoint")
    p.add_argument("directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hidden-size", type=int, default=32)
    p.set_defaults(func=cmd_init_checkpoint)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
