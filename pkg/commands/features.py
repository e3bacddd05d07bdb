from pathlib import Path

import pandas as pd

from commands import CommandResult, threads
from models.edge import INJN_MODES, PERSIST_MODES
from models.evaluation import SplitConfig
from utils.edge_features import label_edges, read_features, write_features
from utils.evaluation import split
from utils.feature_stats import correlation_pairs, spearman_matrix, summarize, write_cdf_points
from utils.files import write_json
from utils.infogain import GAIN_MODES, STRATEGIES, rank_features
from utils.temporal_graph import read_window_graph


def register(subparsers):
    parser = subparsers.add_parser("features", help="Compute edge features on tau1 and label them from tau2")
    parser.add_argument("--tau1", required=True, help="tau1 arc-list CSV written by build")
    parser.add_argument("--tau2", required=True, help="tau2 arc-list CSV written by build")
    parser.add_argument("--persist-mode", choices=PERSIST_MODES, default="directed")
    parser.add_argument("--injn-mode", choices=INJN_MODES, default="arcs")
    parser.add_argument("--out", required=True, help="Feature CSV")
    parser.set_defaults(handler=handle_features)

    parser = subparsers.add_parser("split", help="Randomly split a feature file into train and test sets")
    parser.add_argument("--features", required=True)
    parser.add_argument("--train-out", required=True)
    parser.add_argument("--test-out", required=True)
    parser.add_argument("--fraction", type=float, default=2 / 3, help="Training share (default: 2/3)")
    parser.add_argument("--stratify", action="store_true", help="Keep the class balance in both sets")
    parser.set_defaults(handler=handle_split)

    parser = subparsers.add_parser("summarize", help="Per-feature range, median and mean")
    parser.add_argument("--features", required=True)
    parser.add_argument("--out", required=True, help="Summary JSON")
    parser.add_argument("--cdf-out", help="Directory for per-feature CDF point files")
    parser.set_defaults(handler=handle_summarize)

    parser = subparsers.add_parser("correlate", help="Spearman correlation matrix of the features")
    parser.add_argument("--features", required=True)
    parser.add_argument("--out", required=True, help="Correlation matrix CSV")
    parser.add_argument("--pairs-out", help="CSV of strongly correlated pairs")
    parser.add_argument("--threshold", type=float, default=0.5, help="|rho| reported as strong (default: 0.5)")
    parser.set_defaults(handler=handle_correlate)

    parser = subparsers.add_parser("rank", help="Rank features by information gain about the class")
    parser.add_argument("--features", required=True)
    parser.add_argument("--mode", choices=GAIN_MODES, default="weighted")
    parser.add_argument("--strategy", choices=STRATEGIES, default="best-binary-split")
    parser.add_argument("--bins", type=int, default=4, help="Bins for equal-frequency (default: 4)")
    parser.add_argument(
        "--min-bucket", type=int, default=1,
        help="Fewest edges on either side of a binary cut; match the tree's --min-leaf (default: 1)",
    )
    parser.add_argument("--out", required=True, help="Ranking JSON")
    parser.set_defaults(handler=handle_rank)


def handle_features(args):
    edges = label_edges(
        read_window_graph(args.tau1),
        read_window_graph(args.tau2),
        persist_mode=args.persist_mode,
        injn_mode=args.injn_mode,
        threads=threads(args),
    )
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_features(edges, args.out)
    persisting = sum(edge.label for edge in edges)
    return CommandResult(
        {"out": args.out, "edges": len(edges), "persist": persisting, "decay": len(edges) - persisting}
    )


def handle_split(args):
    cfg = SplitConfig(train_fraction=args.fraction, seed=args.seed or 0, stratify=args.stratify)
    train, test = split(read_features(args.features), cfg)
    write_features(train, args.train_out)
    write_features(test, args.test_out)
    return CommandResult({"train": len(train), "test": len(test), "seed": cfg.seed})


def handle_summarize(args):
    summary = summarize(read_features(args.features))
    write_json(summary.to_dict(), args.out)
    if args.cdf_out:
        write_cdf_points(summary, args.cdf_out)
    table = pd.DataFrame({name: stat.to_dict() for name, stat in summary.stats.items()}).T
    return CommandResult(summary.to_dict(), table.to_string(float_format=lambda v: f"{v:.4g}"))


def handle_correlate(args):
    matrix = spearman_matrix(read_features(args.features))
    matrix.to_csv(args.out, index_label="feature")
    pairs = correlation_pairs(matrix, args.threshold)
    if args.pairs_out:
        pairs.to_csv(args.pairs_out, index=False)
    summary = {
        "out": args.out,
        "strong_pairs": [
            {"a": a, "b": b, "rho": float(rho), "same_group": bool(same)}
            for a, b, rho, same in pairs.itertuples(index=False)
        ],
    }
    return CommandResult(summary, matrix.to_string(float_format=lambda v: f"{v:.2f}"))


def handle_rank(args):
    ranking = rank_features(
        read_features(args.features), mode=args.mode, strategy=args.strategy, bins=args.bins,
        min_bucket=args.min_bucket,
    )
    write_json(ranking.to_dict(), args.out)
    table = pd.DataFrame(
        [(entry["feature"], entry["group"], entry["gain"]) for entry in ranking.to_dict()["ranking"]],
        columns=["feature", "group", "gain"],
    )
    return CommandResult(ranking.to_dict(), table.to_string(index=False, float_format=lambda v: f"{v:.5f}"))
