"""Domain types for investable-universe snapshots.

All monetary amounts are USD billions. Records are plain frozen dataclasses;
they do not validate on construction so that :func:`validate_snapshot` can
report every problem in one pass. Computation entry points validate first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from datetime import date
from typing import Iterable, Optional


class GaerError(Exception):
    """Base class for all toolkit errors."""


@dataclass(frozen=True)
class Violation:
    """A single data problem found during parsing or validation."""

    ticker: str
    field: str
    reason: str
    line: Optional[int] = None
    column: Optional[str] = None

    def __str__(self) -> str:
        where = f"line {self.line}: " if self.line is not None else ""
        col = f" (column {self.column})" if self.column else ""
        tick = self.ticker or "<no ticker>"
        return f"{where}{tick}: {self.field}: {self.reason}{col}"


class DataError(GaerError):
    """Raised with the full list of problems found in some input."""

    def __init__(self, message: str, violations: Iterable[Violation] = ()):
        self.violations = list(violations)
        detail = "".join(f"\n  {v}" for v in self.violations)
        super().__init__(message + detail)


class ValidationError(DataError):
    pass


@dataclass(frozen=True)
class AssetRecord:
    ticker: str
    region: str
    market_cap: float
    g: float
    i: float
    adv: Optional[float] = None

    @property
    def weight(self) -> float:
        return asset_weight(self)


@dataclass(frozen=True)
class Weight:
    ticker: str
    value: float


@dataclass(frozen=True)
class UniverseSnapshot:
    as_of: date
    assets: tuple[AssetRecord, ...]
    label: Optional[str] = None

    def __post_init__(self):
        # accept any iterable but store immutably
        object.__setattr__(self, "assets", tuple(self.assets))

    def __len__(self) -> int:
        return len(self.assets)

    @property
    def tickers(self) -> list[str]:
        return [a.ticker for a in self.assets]

    def get(self, ticker: str) -> AssetRecord:
        for a in self.assets:
            if a.ticker == ticker:
                return a
        raise KeyError(ticker)

    def weights(self) -> list[Weight]:
        return [Weight(a.ticker, asset_weight(a)) for a in self.assets]

    def with_assets(self, assets: Iterable[AssetRecord]) -> "UniverseSnapshot":
        return replace(self, assets=tuple(assets))


def asset_weight(record: AssetRecord) -> float:
    """Adaptive-efficiency-supporting mass ``market_cap * g * i``."""
    return record.market_cap * record.g * record.i


def _bad_number(x) -> bool:
    return not isinstance(x, (int, float)) or isinstance(x, bool) or not math.isfinite(x)


def validate_record(record: AssetRecord) -> list[Violation]:
    out = []
    t = record.ticker
    if not isinstance(t, str) or not t.strip():
        out.append(Violation(t or "", "ticker", "empty ticker"))
    if _bad_number(record.market_cap):
        out.append(Violation(t, "market_cap", "market_cap not a finite number"))
    elif record.market_cap < 0:
        out.append(Violation(t, "market_cap", "market_cap negative"))
    if record.adv is not None:
        if _bad_number(record.adv):
            out.append(Violation(t, "adv", "adv not a finite number"))
        elif record.adv < 0:
            out.append(Violation(t, "adv", "adv negative"))
    for name in ("g", "i"):
        v = getattr(record, name)
        if _bad_number(v):
            out.append(Violation(t, name, f"{name} not a finite number"))
        elif not 0.0 <= v <= 1.0:
            out.append(Violation(t, name, f"{name} out of [0,1]"))
    return out


def validate_snapshot(snapshot: UniverseSnapshot) -> list[Violation]:
    """Return every invariant violation in ``snapshot``; empty iff valid."""
    violations = []
    seen = set()
    for rec in snapshot.assets:
        violations.extend(validate_record(rec))
        if rec.ticker in seen:
            violations.append(Violation(rec.ticker, "ticker", "duplicate ticker"))
        seen.add(rec.ticker)
    return violations


def ensure_valid(snapshot: UniverseSnapshot) -> None:
    violations = validate_snapshot(snapshot)
    if violations:
        raise ValidationError(
            f"invalid snapshot ({len(violations)} violation(s))", violations
        )


def filter_min_adv(snapshot: UniverseSnapshot, min_adv: float) -> UniverseSnapshot:
    """Liquidity screen: keep assets with ``adv >= min_adv``.

    Assets without an ADV value cannot demonstrate liquidity and are dropped.
    ADV never enters the weight itself.
    """
    kept = [a for a in snapshot.assets if a.adv is not None and a.adv >= min_adv]
    return snapshot.with_assets(kept)
