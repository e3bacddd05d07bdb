from pathlib import Path

from commands import CommandResult
from models.decision_tree import DecisionTree, TreeConfig
from models.evaluation import EvalReport
from models.logit import LogitConfig, LogitModel
from utils.edge_features import read_features
from utils.errors import UsageError
from utils.evaluation import compare, evaluate, render_comparison
from utils.files import read_json, write_json
from utils.logit_classifier import report_odds, train_logit
from utils.pipeline import load_model
from utils.synth import describe_truth
from utils.tree_classifier import describe_tree, train_tree


def register(subparsers):
    parser = subparsers.add_parser("train", help="Train a decision tree or a logistic regression")
    parser.add_argument("--model", choices=("tree", "logit"), required=True)
    parser.add_argument("--features", required=True, help="Training feature CSV")
    parser.add_argument("--out", required=True, help="Model JSON")
    tree = parser.add_argument_group("tree")
    tree.add_argument("--min-leaf", type=int, default=2, help="Minimum instances per leaf (default: 2)")
    tree.add_argument("--max-depth", type=int, help="Maximum depth (default: unlimited)")
    tree.add_argument("--min-gain", type=float, default=0.001, help="Minimum split gain in bits")
    logit = parser.add_argument_group("logit")
    logit.add_argument("--max-iter", type=int, default=100)
    logit.add_argument("--tolerance", type=float, default=1e-8, help="Gradient-norm stopping tolerance")
    logit.add_argument("--ridge", type=float, default=1e-8, help="L2 penalty on coefficients (0 disables)")
    logit.add_argument("--standardize", action="store_true", help="Fit on standardized features")
    logit.add_argument("--threshold", type=float, default=0.5, help="Decision threshold")
    parser.set_defaults(handler=handle_train)

    parser = subparsers.add_parser("describe", help="Print a model's rules or a synthetic corpus's planted rule")
    target = parser.add_mutually_exclusive_group(required=True)
    target.add_argument("--model", help="Model JSON")
    target.add_argument("--corpus", help="Synthetic corpus directory or its truth.json")
    parser.add_argument("--max-rules", type=int, help="Print at most this many tree rules")
    parser.set_defaults(handler=handle_describe)

    parser = subparsers.add_parser("odds", help="Coefficients and odds ratios of a logit model")
    parser.add_argument("--model", required=True)
    parser.set_defaults(handler=handle_odds)

    parser = subparsers.add_parser("evaluate", help="Score a model on a labeled feature file")
    parser.add_argument("--model", required=True)
    parser.add_argument("--features", required=True, help="Test feature CSV")
    parser.add_argument("--out", required=True, help="Report JSON")
    parser.add_argument("--name", help="Model name in the report (default: the model type)")
    parser.set_defaults(handler=handle_evaluate)

    parser = subparsers.add_parser("compare", help="Side-by-side table of evaluation reports")
    parser.add_argument("reports", nargs="+", help="Report JSON files")
    parser.add_argument("--out", help="Also write the table as CSV")
    parser.set_defaults(handler=handle_compare)


def handle_train(args):
    frame = read_features(args.features)
    if args.model == "tree":
        cfg = TreeConfig(min_leaf_size=args.min_leaf, max_depth=args.max_depth, min_gain=args.min_gain)
        model = train_tree(frame, cfg)
        summary = {"model_type": "tree", "leaves": model.n_leaves(), "depth": model.depth()}
    else:
        cfg = LogitConfig(
            max_iter=args.max_iter,
            tolerance=args.tolerance,
            ridge=args.ridge,
            standardize=args.standardize,
            threshold=args.threshold,
        )
        model = train_logit(frame, cfg)
        summary = {
            "model_type": "logit",
            "iterations": model.metadata["iterations"],
            "converged": model.metadata["converged"],
            "gradient_norm": model.metadata["gradient_norm"],
        }
    write_json(model.to_dict(), args.out)
    summary.update({"out": args.out, "n_train": len(frame)})
    return CommandResult(summary)


def _odds_text(model):
    return report_odds(model).to_string(index=False, float_format=lambda v: f"{v:.4f}")


def handle_describe(args):
    if args.corpus:
        truth = describe_truth(args.corpus)
        lines = [f"preset {truth['preset']} (seed {truth['seed']})", f"intercept {truth['intercept']:.4f}"]
        lines += [f"{name} {beta:+.4f}" for name, beta in truth["coefficients"].items()]
        lines.append(f"decay share {truth['decay_share']:.3f}, planted Bayes rate {truth['bayes_rate']:.3f}")
        return CommandResult(truth, "\n".join(lines))

    model = load_model(args.model)
    if isinstance(model, DecisionTree):
        rules = describe_tree(model, args.max_rules)
        summary = {"model_type": "tree", "leaves": model.n_leaves(), "depth": model.depth(), "rules": rules}
        return CommandResult(summary, "\n".join(rule["rule"] for rule in rules))
    summary = {"model_type": "logit", "intercept": model.intercept, "coefficients": model.coefficients}
    return CommandResult(summary, f"intercept {model.intercept:.4f}\n{_odds_text(model)}")


def handle_odds(args):
    model = load_model(args.model)
    if not isinstance(model, LogitModel):
        raise UsageError(f"'{args.model}' is not a logit model; odds ratios need one")
    table = report_odds(model)
    summary = {
        "intercept": model.intercept,
        "odds": [
            {"feature": feature, "beta": float(beta), "odds": float(odds)}
            for feature, beta, odds in table.itertuples(index=False)
        ],
    }
    return CommandResult(summary, _odds_text(model))


def handle_evaluate(args):
    model = load_model(args.model)
    frame = read_features(args.features)
    name = args.name or ("tree" if isinstance(model, DecisionTree) else "logit")
    report = evaluate(model.predict(frame), frame["class"].to_numpy(), name)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_json(report.to_dict(), args.out)
    return CommandResult(report.to_dict(), render_comparison(compare([report])))


def handle_compare(args):
    reports = [EvalReport.from_dict(read_json(path, "report")) for path in args.reports]
    table = compare(reports)
    if args.out:
        table.to_csv(args.out)
    summary = {"reports": [report.to_dict() for report in reports]}
    return CommandResult(summary, render_comparison(table))
