try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import replace

from commands import CommandResult
from models.synth import PRESETS, SynthConfig, preset
from utils.errors import UsageError
from utils.synth import generate, write_corpus


def register(subparsers):
    parser = subparsers.add_parser("synth", help="Generate a synthetic call log with a planted decay rule")
    parser.add_argument("--preset", choices=sorted(PRESETS), default="paperlike")
    parser.add_argument("--config", help="TOML file with a [synth] table (custom rule and generator settings)")
    parser.add_argument("--n-vertices", type=int, help="Override the number of vertices")
    parser.add_argument("--out", required=True, help="Output directory")
    parser.set_defaults(handler=handle_synth)


def load_synth_config(args):
    if args.config:
        try:
            with open(args.config, "rb") as handle:
                data = tomllib.load(handle)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise UsageError(f"Cannot read synth config '{args.config}': {exc}")
        table = dict(data.get("synth", data))
        table.setdefault("preset", args.preset)
        cfg = SynthConfig.from_dict(table)
    else:
        cfg = preset(args.preset)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.n_vertices is not None:
        changes["n_vertices"] = args.n_vertices
    return replace(cfg, **changes) if changes else cfg


def handle_synth(args):
    """
    Write records.csv, truth.json and truth_edges.csv into the output directory
    """
    cfg = load_synth_config(args)
    corpus = generate(cfg)
    paths = write_corpus(corpus, args.out)
    summary = {
        "preset": cfg.preset,
        "seed": cfg.seed,
        "records": len(corpus.records),
        "edges": corpus.truth["n_edges"],
        "decay_share": corpus.truth["decay_share"],
        "bayes_rate": corpus.truth["bayes_rate"],
        "files": {name: str(path) for name, path in paths.items()},
    }
    return CommandResult(summary)
