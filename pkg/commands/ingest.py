from pathlib import Path

from commands import CommandResult
from models.call_record import IngestConfig
from utils.cdr_ingest import load_id_whitelist, parse_records, write_records
from utils.files import write_json


def register(subparsers):
    parser = subparsers.add_parser("ingest", help="Validate and filter a raw call log")
    parser.add_argument("--input", required=True, help="Raw CSV call log")
    parser.add_argument("--start", type=int, required=True, help="Horizon start, epoch seconds (inclusive)")
    parser.add_argument("--end", type=int, required=True, help="Horizon end, epoch seconds (exclusive)")
    parser.add_argument("--types", default="voice", help="Comma-separated call types to keep (default: voice)")
    parser.add_argument("--strict", action="store_true", help="Abort on the first malformed row")
    parser.add_argument("--has-header", action="store_true", help="The first line is a header")
    parser.add_argument("--min-duration", type=int, default=0, help="Drop calls shorter than this many seconds")
    parser.add_argument("--in-network-ids", help="File of in-network vertex ids, one per line")
    parser.add_argument("--out", required=True, help="Validated record CSV")
    parser.add_argument("--report", help="IngestReport JSON (default: <out>.report.json)")
    parser.set_defaults(handler=handle_ingest)


def handle_ingest(args):
    """
    Parse a call log and write the accepted records plus the row accounting
    """
    cfg = IngestConfig(
        horizon_start=args.start,
        horizon_end=args.end,
        keep_call_types=frozenset(t for t in args.types.split(",") if t.strip()),
        strict=args.strict,
        has_header=args.has_header,
        min_duration=args.min_duration,
        in_network_ids=load_id_whitelist(args.in_network_ids) if args.in_network_ids else None,
    )
    records, report = parse_records(args.input, cfg)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_records(records, out)
    report_path = Path(args.report) if args.report else out.with_name(f"{out.stem}.report.json")
    write_json(report.to_dict(), report_path)
    summary = dict(report.to_dict(), out=str(out), report=str(report_path))
    return CommandResult(summary)
