from dataclasses import dataclass, field
from enum import Enum

from utils.errors import UsageError


class CallType(str, Enum):
    """Kinds of communication event found in operator call logs"""

    VOICE = "voice"
    TEXT = "text"
    VOICEMAIL = "voicemail"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            allowed = ", ".join(member.value for member in cls)
            raise ValueError(f"Unknown call type '{value}' (expected one of: {allowed})")


RECORD_COLUMNS = ("caller", "callee", "timestamp", "duration", "call_type")


@dataclass(frozen=True, slots=True)
class CallRecord:
    """
    One directed call event from ``caller`` to ``callee``
    """

    caller: str
    callee: str
    timestamp: int  # seconds since epoch
    duration: int  # seconds
    call_type: CallType = CallType.VOICE

    def __post_init__(self):
        if self.caller == self.callee:
            raise ValueError(f"Self-call from '{self.caller}' is not a dyadic event")
        if self.duration < 0:
            raise ValueError(f"Negative duration {self.duration}")

    def to_row(self):
        """
        Convert the record to a CSV row in the external column order

        Returns:
            list: caller, callee, timestamp, duration, call_type
        """
        return [self.caller, self.callee, self.timestamp, self.duration, self.call_type.value]

    def to_dict(self):
        return dict(zip(RECORD_COLUMNS, self.to_row()))


@dataclass(frozen=True)
class IngestConfig:
    """
    Filtering rules applied while parsing a call log

    Only calls whose type is in ``keep_call_types`` and whose timestamp lies in
    the half-open horizon [horizon_start, horizon_end) are accepted.
    """

    horizon_start: int
    horizon_end: int
    keep_call_types: frozenset = field(default_factory=lambda: frozenset({CallType.VOICE}))
    strict: bool = False
    has_header: bool = False
    min_duration: int = 0
    in_network_ids: frozenset = None

    def __post_init__(self):
        if self.horizon_start >= self.horizon_end:
            raise UsageError(
                f"Horizon start {self.horizon_start} must precede horizon end {self.horizon_end}"
            )
        if self.min_duration < 0:
            raise UsageError(f"min_duration must be non-negative, got {self.min_duration}")
        try:
            kept = frozenset(CallType.parse(t) for t in self.keep_call_types)
        except ValueError as exc:
            raise UsageError(str(exc))
        if not kept:
            raise UsageError("At least one call type must be kept")
        object.__setattr__(self, "keep_call_types", kept)
        if self.in_network_ids is not None:
            object.__setattr__(self, "in_network_ids", frozenset(self.in_network_ids))

    @classmethod
    def from_dict(cls, data):
        """
        Build a config from a mapping such as a TOML ``[ingest]`` table

        Args:
            data: Dictionary with ``start``/``end`` and optional filter keys

        Returns:
            IngestConfig
        """
        try:
            start = int(data["start"])
            end = int(data["end"])
        except KeyError as missing:
            raise UsageError(f"Ingest configuration needs {missing}")
        return cls(
            horizon_start=start,
            horizon_end=end,
            keep_call_types=frozenset(data.get("types", ["voice"])),
            strict=bool(data.get("strict", False)),
            has_header=bool(data.get("has_header", False)),
            min_duration=int(data.get("min_duration", 0)),
            in_network_ids=data.get("in_network_ids"),
        )

    def to_dict(self):
        return {
            "start": self.horizon_start,
            "end": self.horizon_end,
            "types": sorted(t.value for t in self.keep_call_types),
            "strict": self.strict,
            "has_header": self.has_header,
            "min_duration": self.min_duration,
            "in_network_ids": None if self.in_network_ids is None else len(self.in_network_ids),
        }
