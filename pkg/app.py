import argparse
import json
import logging
import sys

import commands.classify as classify
import commands.features as features
import commands.graph as graph
import commands.ingest as ingest
import commands.run as run
import commands.synth as synth
from utils import __version__
from utils.errors import EXIT_INTERNAL, EXIT_OK, DecayGraphError, UsageError
from utils.log import configure_logging

logger = logging.getLogger("decaygraph")


class ArgumentParser(argparse.ArgumentParser):
    """Parser whose usage errors raise UsageError instead of exiting with status 2"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}", hint=f"Run '{self.prog} --help' for usage.")


# Define the command families
def get_commands():
    return {
        "Ingest": ingest,
        "Graphs": graph,
        "Features": features,
        "Classifiers": classify,
        "Synthetic data": synth,
        "Pipeline": run,
    }


def build_parser():
    parser = ArgumentParser(
        prog="decaygraph",
        description="Predict persistence and decay of call-graph edges from two adjacent time windows.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, help="Seed for every random choice (split, synth, run)")
    parser.add_argument("--threads", type=int, help="Upper bound on worker threads")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logs")
    parser.add_argument("--log-json", action="store_true", help="Structured JSON log lines on stderr")
    parser.add_argument("--json", action="store_true", help="Print the JSON summary instead of tables")

    subparsers = parser.add_subparsers(dest="command", metavar="command", required=True)
    for module in get_commands().values():
        module.register(subparsers)
    return parser


def _report_error(exc):
    print(f"error: {exc.message}", file=sys.stderr)
    if exc.hint:
        print(f"hint: {exc.hint}", file=sys.stderr)


# Main function
def main(argv=None):
    """
    Run one decaygraph command

    Args:
        argv: argument list, ``sys.argv[1:]`` if None

    Returns:
        int: 0 success, 1 usage error, 2 data error, 3 internal error
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code or EXIT_OK
    except UsageError as exc:
        _report_error(exc)
        return exc.exit_code

    configure_logging(args.verbose, args.log_json)
    if args.threads is not None and args.threads < 1:
        _report_error(UsageError(f"--threads must be positive, got {args.threads}"))
        return UsageError.exit_code

    try:
        result = args.handler(args)
    except DecayGraphError as exc:
        logger.debug("Command %s failed", args.command, exc_info=True)
        _report_error(exc)
        return exc.exit_code
    except Exception:
        logger.exception("Internal error in command %s", args.command)
        return EXIT_INTERNAL

    if args.json or result.text is None:
        print(json.dumps(result.summary, indent=2, sort_keys=True, default=str))
    else:
        print(result.text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
