from pathlib import Path

import pandas as pd

from commands import CommandResult, threads
from models.window_graph import NEIGHBOR_MODES, WindowConfig
from utils.cdr_ingest import load_records
from utils.files import write_json
from utils.temporal_graph import DEFAULT_MAX_NEIGHBORS, graph_statistics, split_windows, write_window_graph


def register(subparsers):
    parser = subparsers.add_parser("build", help="Build the filtered tau1 and tau2 window graphs")
    parser.add_argument("--records", required=True, help="Validated record CSV (output of ingest)")
    parser.add_argument("--t0", type=int, required=True, help="Start of tau1, epoch seconds")
    parser.add_argument("--delta1", type=int, required=True, help="Length of tau1 in seconds")
    parser.add_argument("--delta2", type=int, required=True, help="Length of tau2 in seconds")
    parser.add_argument(
        "--max-neighbors",
        type=int,
        default=DEFAULT_MAX_NEIGHBORS,
        help="Vertices with at least this many neighbors in tau1 are removed (default: 50)",
    )
    parser.add_argument("--neighbor-mode", choices=NEIGHBOR_MODES, default="out")
    parser.add_argument("--out", required=True, help="Output directory")
    parser.set_defaults(handler=handle_build)


def handle_build(args):
    """
    Write tau1.csv, tau2.csv (with window sidecars), graph_stats.json and robot_filter.json
    """
    cfg = WindowConfig(t0=args.t0, delta1=args.delta1, delta2=args.delta2)
    windows = split_windows(
        load_records(args.records),
        cfg,
        max_neighbors=args.max_neighbors,
        neighbor_mode=args.neighbor_mode,
        threads=threads(args),
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_window_graph(windows.tau1, out / "tau1.csv")
    write_window_graph(windows.tau2, out / "tau2.csv")
    stats = {
        "tau1": graph_statistics(windows.tau1).to_dict(),
        "tau2": graph_statistics(windows.tau2).to_dict(),
    }
    write_json(stats, out / "graph_stats.json")
    write_json(windows.robot_filter.to_dict(), out / "robot_filter.json")
    summary = {
        "out": str(out),
        "graph_stats": stats,
        "robots_removed": len(windows.robot_filter.removed),
    }
    return CommandResult(summary, pd.DataFrame(stats).to_string(float_format=lambda v: f"{v:.3f}"))
