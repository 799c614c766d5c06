"""CSV / JSON persistence for sweep records.

Floats are written with 12 significant digits in both formats, so a value
read back from either file is the same double.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, fields
from pathlib import Path

from .errors import ConfigError
from .harness import RECORD_FIELDS, ResultRecord

SCHEMA_VERSION = 1
FLOAT_FORMAT = ".12g"

_FIELD_TYPES = {f.name: f.type for f in fields(ResultRecord)}


def format_float(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, FLOAT_FORMAT)
    return str(value)


def _json_value(value):
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(format(value, FLOAT_FORMAT))
    return value


def records_to_csv(records, columns=RECORD_FIELDS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        row = asdict(rec) if isinstance(rec, ResultRecord) else dict(rec)
        writer.writerow([format_float(row[c]) for c in columns])
    return buf.getvalue()


def records_to_json(records) -> str:
    rows = [{k: _json_value(v) for k, v in asdict(r).items()} for r in records]
    doc = {"schema_version": SCHEMA_VERSION, "fields": list(RECORD_FIELDS), "records": rows}
    return json.dumps(doc, indent=1) + "\n"


def _from_json(name: str, value):
    # non-finite floats are stored as null; optional fields keep None
    if value is None and _FIELD_TYPES[name] == "float":
        return math.nan
    return value


def _parse(name: str, text: str):
    kind = str(_FIELD_TYPES[name])
    if text == "":
        return None
    if "int" in kind:
        return int(text)
    if "float" in kind:
        return float(text)
    return text


def read_results(path) -> list[ResultRecord]:
    """Load records from a results.csv or results.json written by the sweep command."""
    path = Path(path)
    text = path.read_text()
    try:
        if path.suffix == ".json":
            doc = json.loads(text)
            rows = doc["records"]
            records = [ResultRecord(**{k: _from_json(k, v) for k, v in row.items()}) for row in rows]
        else:
            reader = csv.reader(io.StringIO(text))
            header = next(reader, None)
            if header is None or tuple(header) != RECORD_FIELDS:
                raise ConfigError(f"{path}: header does not match the result schema")
            records = [
                ResultRecord(**{name: _parse(name, cell) for name, cell in zip(header, row)})
                for row in reader
                if row
            ]
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed results file {path}: {exc}") from None
    if not records:
        raise ConfigError(f"{path} contains no result records")
    return records


def write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def dump_json(path, doc) -> Path:
    return write_text(path, json.dumps(doc, indent=1, sort_keys=False) + "\n")

