"""Command-line front end: one subcommand per pipeline stage plus ``run`` and ``demo``.

Exit codes: 0 success, 1 config validation failure, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import validate_config
from .pipeline import OutputLock, Pipeline, PipelineError, STAGES

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="topicforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_stage(name: str, help_text: str):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, help="path to the INI run config")
        sp.add_argument("--ticker", help="override run.ticker")
        sp.add_argument("--seed", type=int, help="override topics.seed and use this single forecast seed")
        sp.add_argument(
            "--variant",
            choices=["baseline", "sentiment", "topic_sentiment"],
            help="restrict forecast variants to one variant",
        )
        return sp

    for stage in STAGES:
        add_stage(stage, f"run the {stage} stage")
    add_stage("run", "run every stage in order")

    demo = sub.add_parser("demo", help="generate the bundled synthetic corpus and a ready config")
    demo.add_argument("--out", required=True, help="directory for the corpus and config")
    demo.add_argument("--days", type=int, default=250)
    demo.add_argument("--seed", type=int, default=7)
    demo.add_argument("--epochs", type=int, default=200)
    demo.add_argument("--epochs-umap", type=int, default=200)
    demo.add_argument("--seeds", default="0,1,2,3,4,5,6,7,8,9")
    demo.add_argument("--models", default="lstm,cnn,cnn_lstm,gan")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "demo":
        from .demo import write_demo

        config_path = write_demo(
            args.out,
            seed=args.seed,
            n_days=args.days,
            epochs=args.epochs,
            epochs_umap=args.epochs_umap,
            seeds=args.seeds,
            models=args.models,
        )
        print(f"demo corpus ready; run: topicforge run --config {config_path}")
        return EXIT_OK

    cfg, errors, warnings = validate_config(args.config)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    if errors:
        for e in errors:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    if args.ticker:
        cfg.ticker = args.ticker
    if args.seed is not None:
        cfg.seed = args.seed
        cfg.seeds = (args.seed,)
    if args.variant:
        cfg.variants = (args.variant,)

    try:
        pipeline = Pipeline(cfg)
        with OutputLock(Path(cfg.output_dir)):
            if args.command == "run":
                statuses = pipeline.run_all()
            else:
                statuses = [pipeline.run_stage(args.command)]
        for status in statuses:
            print(status)
        return EXIT_OK
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
