"""Reading and writing universe snapshot files.

Two on-disk layouts are supported:

* delimited table (CSV): header row required, columns
  ``ticker,region,mcap,adv,g,i`` in any order plus optional ``core`` and ``w``.
  A ``w`` column is ignored on input (weights are always recomputed). The file
  has no date, so ``as_of`` must be supplied by the caller.
* structured records (JSON): ``{"as_of": ..., "label": ..., "assets": [...]}``
  where each asset object carries the same six fields and optionally ``core``.

Numbers use a period as decimal separator; thousands separators are rejected.
Every problem in a file is reported in one :class:`ParseError` or
:class:`~gaer.universe.ValidationError`, never just the first.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import IO, Optional, Union

from .universe import (
    AssetRecord,
    DataError,
    UniverseSnapshot,
    ValidationError,
    Violation,
    validate_record,
)

DELIMITED = "delimited-table"
RECORDS = "structured-records"
FORMATS = (DELIMITED, RECORDS)

REQUIRED_COLUMNS = ("ticker", "region", "mcap", "adv", "g", "i")
OPTIONAL_COLUMNS = ("w", "core")

_NUMBER = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_TRUE = {"1", "true"}
_FALSE = {"0", "false", ""}

Source = Union[bytes, str, IO[bytes], IO[str]]


class ParseError(DataError):
    pass


@dataclass(frozen=True)
class SnapshotFileSpec:
    format: str = DELIMITED
    expects_core_column: bool = False

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ValueError(f"unsupported snapshot format {self.format!r}")


@dataclass(frozen=True)
class ParsedSnapshot:
    snapshot: UniverseSnapshot
    declared_core: Optional[tuple[str, ...]] = None


def _read_text(source: Source) -> str:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from None
    return source


def _number(text: str) -> float:
    text = text.strip()
    if not _NUMBER.fullmatch(text):
        raise ValueError(text)
    return float(text)


def _parse_date(text) -> date:
    try:
        return date.fromisoformat(str(text))
    except ValueError:
        raise ParseError(f"invalid ISO-8601 date {text!r}") from None


def parse_snapshot(
    source: Source,
    spec: SnapshotFileSpec = SnapshotFileSpec(),
    as_of: Optional[date] = None,
    label: Optional[str] = None,
) -> ParsedSnapshot:
    """Parse and validate one snapshot.

    For structured records, ``as_of`` and ``label`` only fill in values the
    file itself does not carry.
    """
    text = _read_text(source)
    if spec.format == DELIMITED:
        return _parse_delimited(text, spec, as_of, label)
    return _parse_records(text, spec, as_of, label)


def _finish(assets, problems, declared, as_of, label, malformed) -> ParsedSnapshot:
    seen = set()
    for rec, line in assets:
        for v in validate_record(rec):
            problems.append(Violation(v.ticker, v.field, v.reason, line=line, column=v.column))
        if rec.ticker in seen:
            problems.append(Violation(rec.ticker, "ticker", "duplicate ticker", line=line))
        seen.add(rec.ticker)
    if problems:
        problems.sort(key=lambda v: v.line or 0)
        cls = ParseError if malformed else ValidationError
        raise cls(f"{len(problems)} problem(s) in snapshot input", problems)
    snap = UniverseSnapshot(as_of=as_of, assets=tuple(r for r, _ in assets), label=label)
    return ParsedSnapshot(snap, declared)


def _parse_core_flag(text: str) -> bool:
    value = text.strip().lower()
    if value in _TRUE:
        return True
    if value in _FALSE:
        return False
    raise ValueError(text)


def _parse_delimited(text, spec, as_of, label) -> ParsedSnapshot:
    if as_of is None:
        raise ParseError("delimited snapshots carry no date; as_of is required")
    rows = list(csv.reader(io.StringIO(text, newline="")))
    header_idx = next((k for k, r in enumerate(rows) if any(c.strip() for c in r)), None)
    if header_idx is None:
        raise ParseError("no data rows")
    header = [c.strip().lower() for c in rows[header_idx]]
    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    unknown = [c for c in header if c not in REQUIRED_COLUMNS + OPTIONAL_COLUMNS]
    if spec.expects_core_column and "core" not in header:
        missing.append("core")
    if missing or unknown or len(set(header)) != len(header):
        parts = []
        if missing:
            parts.append("missing columns: " + ", ".join(missing))
        if unknown:
            parts.append("unknown columns: " + ", ".join(unknown))
        if len(set(header)) != len(header):
            parts.append("repeated column names")
        raise ParseError(f"line {header_idx + 1}: bad header ({'; '.join(parts)})")

    col = {name: k for k, name in enumerate(header)}
    has_core = "core" in col
    problems: list[Violation] = []
    assets = []
    declared = []
    malformed = False
    for lineno, row in enumerate(rows[header_idx + 1 :], start=header_idx + 2):
        if not any(c.strip() for c in row):
            continue
        if len(row) != len(header):
            malformed = True
            problems.append(
                Violation(row[0].strip() if row else "", "row",
                          f"expected {len(header)} fields, got {len(row)}", line=lineno)
            )
            continue
        cell = {name: row[k] for name, k in col.items()}
        ticker = cell["ticker"].strip()
        values = {}
        row_ok = True
        for name in ("mcap", "adv", "g", "i"):
            raw = cell[name].strip()
            if name == "adv" and raw == "":
                values[name] = None
                continue
            try:
                values[name] = _number(raw)
            except ValueError:
                malformed = True
                row_ok = False
                problems.append(
                    Violation(ticker, name, f"not a decimal number: {raw!r}", line=lineno, column=name)
                )
        is_core = False
        if has_core:
            try:
                is_core = _parse_core_flag(cell["core"])
            except ValueError:
                malformed = True
                row_ok = False
                problems.append(
                    Violation(ticker, "core", f"invalid core flag {cell['core']!r}", line=lineno, column="core")
                )
        if not row_ok:
            continue
        rec = AssetRecord(
            ticker=ticker,
            region=cell["region"].strip(),
            market_cap=values["mcap"],
            adv=values["adv"],
            g=values["g"],
            i=values["i"],
        )
        assets.append((rec, lineno))
        if is_core:
            declared.append(ticker)
    if not assets and not problems:
        raise ParseError("no data rows")
    return _finish(assets, problems, tuple(declared) if has_core else None, as_of, label, malformed)


def _parse_records(text, spec, as_of, label) -> ParsedSnapshot:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}: malformed JSON: {exc.msg}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("assets"), list):
        raise ParseError("structured snapshot must be an object with an 'assets' array")
    if doc.get("as_of") is not None:
        as_of = _parse_date(doc["as_of"])
    if as_of is None:
        raise ParseError("snapshot has no as_of date")
    label = doc.get("label", label)
    if not doc["assets"]:
        raise ParseError("no data rows")

    problems: list[Violation] = []
    assets = []
    declared = []
    has_core = False
    malformed = False
    for k, obj in enumerate(doc["assets"], start=1):
        if not isinstance(obj, dict):
            malformed = True
            problems.append(Violation("", "asset", f"assets[{k - 1}] is not an object", line=k))
            continue
        ticker = obj.get("ticker")
        tick = ticker if isinstance(ticker, str) else ""
        row_ok = True
        for name in REQUIRED_COLUMNS:
            if name not in obj:
                malformed, row_ok = True, False
                problems.append(Violation(tick, name, f"assets[{k - 1}] missing field", line=k, column=name))
        if not row_ok:
            continue
        if not isinstance(ticker, str) or not isinstance(obj["region"], str):
            malformed, row_ok = True, False
            problems.append(Violation(tick, "ticker", f"assets[{k - 1}] ticker/region must be strings", line=k))
        for name in ("mcap", "adv", "g", "i"):
            v = obj[name]
            if name == "adv" and v is None:
                continue
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                malformed, row_ok = True, False
                problems.append(Violation(tick, name, f"not a decimal number: {v!r}", line=k, column=name))
        core = obj.get("core")
        if "core" in obj:
            has_core = True
            if core is not None and not isinstance(core, bool):
                malformed, row_ok = True, False
                problems.append(Violation(tick, "core", f"invalid core flag {core!r}", line=k, column="core"))
        if not row_ok:
            continue
        rec = AssetRecord(
            ticker=ticker.strip(),
            region=obj["region"].strip(),
            market_cap=float(obj["mcap"]),
            adv=None if obj["adv"] is None else float(obj["adv"]),
            g=float(obj["g"]),
            i=float(obj["i"]),
        )
        assets.append((rec, k))
        if core:
            declared.append(rec.ticker)
    if spec.expects_core_column and not has_core:
        problems.append(Violation("", "core", "expected core flags but none present"))
        malformed = True
    return _finish(assets, problems, tuple(declared) if has_core else None, as_of, label, malformed)


def _fmt(x: Optional[float]) -> str:
    return "" if x is None else repr(float(x))


def write_snapshot(
    snapshot: UniverseSnapshot,
    result=None,
    spec: SnapshotFileSpec = SnapshotFileSpec(),
) -> bytes:
    """Serialize ``snapshot``; with a result, append display ``w`` and core flags.

    Stored numbers are written at full precision so that parsing the output
    reproduces the snapshot exactly.
    """
    per_asset = None
    if result is not None:
        per_asset = {a.ticker: a for a in result.per_asset}
        if set(per_asset) != set(snapshot.tickers):
            raise ValueError("result was not computed from this snapshot")

    if spec.format == DELIMITED:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = list(REQUIRED_COLUMNS)
        if per_asset is not None:
            header += ["w", "core"]
        writer.writerow(header)
        for a in snapshot.assets:
            row = [a.ticker, a.region, _fmt(a.market_cap), _fmt(a.adv), _fmt(a.g), _fmt(a.i)]
            if per_asset is not None:
                pa = per_asset[a.ticker]
                row += [f"{pa.weight:.1f}", "1" if pa.core else "0"]
            writer.writerow(row)
        return buf.getvalue().encode("utf-8")

    assets = []
    for a in snapshot.assets:
        obj = {"ticker": a.ticker, "region": a.region, "mcap": a.market_cap,
               "adv": a.adv, "g": a.g, "i": a.i}
        if per_asset is not None:
            pa = per_asset[a.ticker]
            obj["w"] = round(pa.weight, 1)
            obj["core"] = pa.core
        assets.append(obj)
    doc = {"as_of": snapshot.as_of.isoformat(), "label": snapshot.label, "assets": assets}
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def format_for_path(path: Union[str, Path]) -> str:
    return RECORDS if Path(path).suffix.lower() == ".json" else DELIMITED


_DATE_IN_NAME = re.compile(r"(\d{4}-\d{2}-\d{2})")


def load_snapshot(
    path: Union[str, Path],
    as_of: Optional[date] = None,
    expects_core_column: bool = False,
) -> ParsedSnapshot:
    """Read a snapshot file, picking the format from the extension.

    A delimited file without an explicit ``as_of`` takes its date from an
    ISO date embedded in the file name (``2024-06-30.csv``).
    """
    path = Path(path)
    spec = SnapshotFileSpec(format_for_path(path), expects_core_column)
    if as_of is None and spec.format == DELIMITED:
        m = _DATE_IN_NAME.search(path.stem)
        if m is None:
            raise ParseError(f"{path}: no as_of date given and none found in the file name")
        as_of = _parse_date(m.group(1))
    try:
        return parse_snapshot(path.read_bytes(), spec, as_of=as_of, label=None)
    except DataError as exc:
        raise type(exc)(f"{path}: {exc.args[0].splitlines()[0]}", exc.violations) from None
