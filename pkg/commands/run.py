import argparse
from pathlib import Path

from commands import CommandResult
from utils.pipeline import COMPARISON, load_config, run_pipeline


def register(subparsers):
    parser = subparsers.add_parser("run", help="Run the whole pipeline from a TOML experiment file")
    parser.add_argument("--config", required=True, help="Experiment TOML file")
    parser.add_argument("--out", help="Output directory (overrides [paths] out_dir)")
    parser.add_argument("--records", help="Call log (overrides [paths] records and skips synth)")
    parser.add_argument(
        "--resume",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="Skip stages whose inputs, parameters and outputs are unchanged (default: on)",
    )
    parser.set_defaults(handler=handle_run)


def handle_run(args):
    cfg = load_config(args.config).with_overrides(
        seed=args.seed,
        threads=args.threads,
        out_dir=args.out,
        records=args.records,
    )
    manifest = run_pipeline(cfg, resume=args.resume)
    lines = [f"{name:<10} {record['status']}" for name, record in manifest["stages"].items()]
    comparison = Path(cfg.out_dir) / COMPARISON
    if comparison.exists():
        lines += ["", comparison.read_text(encoding="utf-8").rstrip()]
    summary = {
        "out": str(cfg.out_dir),
        "seed": cfg.seed,
        "stages": {name: record["status"] for name, record in manifest["stages"].items()},
    }
    return CommandResult(summary, "\n".join(lines))
