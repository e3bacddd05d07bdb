"""
Parsing, validation and filtering of raw call-record logs.

The external format is UTF-8 CSV with the fixed column order
``caller,callee,timestamp,duration,call_type`` and an optional header line.
"""

import csv
import io
import logging
from dataclasses import asdict, dataclass
from pathlib import Path

from models.call_record import RECORD_COLUMNS, CallRecord, CallType, IngestConfig
from utils.errors import DataError, MalformedRowError

logger = logging.getLogger(__name__)


@dataclass
class IngestReport:
    """
    Row accounting for one parse: accepted + skipped + malformed == total_rows
    """

    total_rows: int = 0
    accepted: int = 0
    malformed: int = 0
    self_calls: int = 0
    filtered_type: int = 0
    out_of_horizon: int = 0
    below_min_duration: int = 0
    out_of_network: int = 0

    @property
    def skipped(self):
        return (
            self.self_calls
            + self.filtered_type
            + self.out_of_horizon
            + self.below_min_duration
            + self.out_of_network
        )

    def is_balanced(self):
        return self.accepted + self.skipped + self.malformed == self.total_rows

    def to_dict(self):
        data = asdict(self)
        data["skipped"] = self.skipped
        return data


def _text_lines(source):
    """Yield decoded text lines from a path, a binary stream, a text stream or an iterable."""
    if isinstance(source, (str, Path)):
        try:
            with open(source, "r", encoding="utf-8", newline="") as handle:
                yield from handle
        except OSError as exc:
            raise DataError(f"Cannot read call log '{source}': {exc}")
        return
    if isinstance(source, (io.RawIOBase, io.BufferedIOBase)) or hasattr(source, "readinto"):
        source = io.TextIOWrapper(source, encoding="utf-8", newline="")
    for line in source:
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        yield line


def parse_row(fields):
    """
    Parse one CSV row into a CallRecord

    Args:
        fields: list of column strings

    Returns:
        CallRecord

    Raises:
        ValueError: describing why the row is malformed or a self-call
    """
    if len(fields) != len(RECORD_COLUMNS):
        raise ValueError(f"expected {len(RECORD_COLUMNS)} columns, found {len(fields)}")
    caller, callee, timestamp, duration, call_type = (value.strip() for value in fields)
    if not caller or not callee:
        raise ValueError("empty caller or callee id")
    try:
        timestamp = int(timestamp)
        duration = int(duration)
    except ValueError:
        raise ValueError(f"non-integer timestamp or duration ({timestamp!r}, {duration!r})")
    if duration < 0:
        raise ValueError(f"negative duration {duration}")
    return CallRecord(caller, callee, timestamp, duration, CallType.parse(call_type))


def iter_records(source, cfg, report=None):
    """
    Stream validated CallRecords out of a call log

    Args:
        source: path, binary/text stream or iterable of lines
        cfg: IngestConfig with horizon and filters
        report: IngestReport updated in place (a new one is created if None)

    Yields:
        CallRecord: accepted records in input order
    """
    report = report if report is not None else IngestReport()
    lines = _text_lines(source)
    try:
        reader = csv.reader(lines)
        first = True
        for fields in reader:
            if first:
                first = False
                if cfg.has_header:
                    continue
            if not fields or (len(fields) == 1 and not fields[0].strip()):
                continue
            report.total_rows += 1
            row_number = report.total_rows

            if len(fields) == len(RECORD_COLUMNS) and fields[0].strip() == fields[1].strip() and fields[0].strip():
                report.self_calls += 1
                logger.debug("Row %d rejected: self-call by %s", row_number, fields[0].strip())
                continue
            try:
                record = parse_row(fields)
            except ValueError as exc:
                report.malformed += 1
                if cfg.strict:
                    raise MalformedRowError(row_number, str(exc), line=",".join(fields))
                logger.debug("Row %d skipped as malformed: %s", row_number, exc)
                continue

            if record.call_type not in cfg.keep_call_types:
                report.filtered_type += 1
            elif not cfg.horizon_start <= record.timestamp < cfg.horizon_end:
                report.out_of_horizon += 1
            elif record.duration < cfg.min_duration:
                report.below_min_duration += 1
            elif cfg.in_network_ids is not None and (
                record.caller not in cfg.in_network_ids or record.callee not in cfg.in_network_ids
            ):
                report.out_of_network += 1
            else:
                report.accepted += 1
                yield record
    except UnicodeDecodeError as exc:
        raise DataError(f"Call log is not valid UTF-8: {exc}")
    except csv.Error as exc:
        raise DataError(f"Call log is not readable CSV: {exc}")


def parse_records(source, cfg):
    """
    Parse a whole call log

    Args:
        source: path, binary/text stream or iterable of lines
        cfg: IngestConfig

    Returns:
        tuple: (list of CallRecord, IngestReport)
    """
    report = IngestReport()
    records = list(iter_records(source, cfg, report))
    logger.info(
        "Ingested %d of %d rows (%d skipped, %d malformed)",
        report.accepted,
        report.total_rows,
        report.skipped,
        report.malformed,
        extra={"ingest": report.to_dict()},
    )
    return records, report


def load_id_whitelist(path):
    """
    Read one vertex id per line

    Args:
        path: text file of in-network ids

    Returns:
        frozenset: the ids
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return frozenset(line.strip() for line in handle if line.strip())
    except OSError as exc:
        raise DataError(f"Cannot read id whitelist '{path}': {exc}")


def write_records(records, path, header=True):
    """
    Write records in the external CSV format

    Args:
        records: iterable of CallRecord
        path: output file
        header: whether to write the column header

    Returns:
        int: number of rows written
    """
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        if header:
            writer.writerow(RECORD_COLUMNS)
        for record in records:
            writer.writerow(record.to_row())
            count += 1
    return count


def load_records(path, types=None):
    """
    Read a validated record file (as written by ``write_records``) strictly

    Args:
        path: CSV file with header
        types: call types to keep, all types if None

    Returns:
        list of CallRecord
    """
    cfg = IngestConfig(
        horizon_start=-(2**63),
        horizon_end=2**63 - 1,
        keep_call_types=frozenset(types or list(CallType)),
        strict=True,
        has_header=_has_header(path),
    )
    records, _ = parse_records(path, cfg)
    return records


def _has_header(path):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            first = handle.readline()
    except OSError as exc:
        raise DataError(f"Cannot read record file '{path}': {exc}")
    return first.strip().lower().startswith("caller,")
