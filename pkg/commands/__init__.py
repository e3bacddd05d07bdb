"""
Command handlers of the decaygraph CLI, one module per command family.

Each module exposes ``register(subparsers)``; handlers take the parsed
arguments and return a CommandResult.
"""

from typing import NamedTuple


class CommandResult(NamedTuple):
    summary: dict
    text: str = None  # human-readable rendering; the JSON summary is printed when absent


def threads(args):
    return getattr(args, "threads", None) or 1
