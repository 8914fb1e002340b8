"""Core-subset selection rules.

The cumulative rule walks assets in a fixed order (market cap descending,
then weight descending, then ticker ascending) and keeps adding while the
cumulative market-cap share stays at or below the threshold. It stops at the
first asset that would push the share over, so the core is always a prefix of
that order. This is the reading that reproduces the illustrative global
snapshot shipped in ``gaer.data`` (WMT in, ASML out at the 420bn tie).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .universe import GaerError, UniverseSnapshot, asset_weight

CUMULATIVE = "cumulative-cap-threshold"
EXPLICIT = "explicit-list"
PREDICATE = "predicate"
RULE_KINDS = (CUMULATIVE, EXPLICIT, PREDICATE)


class RuleError(GaerError):
    pass


@dataclass(frozen=True)
class PredicateSpec:
    """Declarative filter; every populated bound must hold (inclusive)."""

    min_g: Optional[float] = None
    min_i: Optional[float] = None
    min_market_cap: Optional[float] = None
    regions: Optional[frozenset[str]] = None

    def matches(self, record) -> bool:
        if self.min_g is not None and record.g < self.min_g:
            return False
        if self.min_i is not None and record.i < self.min_i:
            return False
        if self.min_market_cap is not None and record.market_cap < self.min_market_cap:
            return False
        if self.regions is not None and record.region not in self.regions:
            return False
        return True


@dataclass(frozen=True)
class CoreSelectionRule:
    kind: str
    threshold: Optional[float] = None
    tickers: Optional[frozenset[str]] = None
    predicate: Optional[PredicateSpec] = None

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise RuleError(f"unknown rule kind {self.kind!r}")
        populated = {
            CUMULATIVE: self.threshold is not None,
            EXPLICIT: self.tickers is not None,
            PREDICATE: self.predicate is not None,
        }
        for kind, present in populated.items():
            if present != (kind == self.kind):
                raise RuleError(f"rule {self.kind!r} must populate exactly its own fields")
        if self.kind == CUMULATIVE:
            t = self.threshold
            if isinstance(t, bool) or not math.isfinite(t) or not 0.0 < t <= 1.0:
                raise RuleError(f"threshold must lie in (0, 1], got {t!r}")
        if self.kind == EXPLICIT:
            object.__setattr__(self, "tickers", frozenset(self.tickers))

    @classmethod
    def cumulative(cls, threshold: float = 0.75) -> "CoreSelectionRule":
        return cls(CUMULATIVE, threshold=threshold)

    @classmethod
    def explicit(cls, tickers: Iterable[str]) -> "CoreSelectionRule":
        return cls(EXPLICIT, tickers=frozenset(tickers))

    @classmethod
    def where(cls, **bounds) -> "CoreSelectionRule":
        if bounds.get("regions") is not None:
            bounds["regions"] = frozenset(bounds["regions"])
        return cls(PREDICATE, predicate=PredicateSpec(**bounds))

    def to_dict(self) -> dict:
        if self.kind == CUMULATIVE:
            return {"kind": self.kind, "threshold": self.threshold}
        if self.kind == EXPLICIT:
            return {"kind": self.kind, "tickers": sorted(self.tickers)}
        p = self.predicate
        return {
            "kind": self.kind,
            "min_g": p.min_g,
            "min_i": p.min_i,
            "min_market_cap": p.min_market_cap,
            "regions": None if p.regions is None else sorted(p.regions),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CoreSelectionRule":
        kind = d.get("kind")
        if kind == CUMULATIVE:
            return cls.cumulative(d["threshold"])
        if kind == EXPLICIT:
            return cls.explicit(d["tickers"])
        if kind == PREDICATE:
            return cls.where(
                min_g=d.get("min_g"),
                min_i=d.get("min_i"),
                min_market_cap=d.get("min_market_cap"),
                regions=d.get("regions"),
            )
        raise RuleError(f"unknown rule kind {kind!r}")

    def without(self, ticker: str) -> "CoreSelectionRule":
        """The same rule for a universe that no longer contains ``ticker``."""
        if self.kind == EXPLICIT:
            return CoreSelectionRule.explicit(self.tickers - {ticker})
        return self


@dataclass(frozen=True)
class CoreSelection:
    tickers: tuple[str, ...]
    flags: dict[str, bool] = field(compare=False)

    def __contains__(self, ticker: str) -> bool:
        return self.flags.get(ticker, False)

    def __len__(self) -> int:
        return len(self.tickers)


def selection_order(snapshot: UniverseSnapshot) -> list:
    return sorted(
        snapshot.assets,
        key=lambda a: (-a.market_cap, -asset_weight(a), a.ticker),
    )


def select_core(snapshot: UniverseSnapshot, rule: CoreSelectionRule) -> CoreSelection:
    """Flag the core assets of ``snapshot`` under ``rule``.

    For the cumulative rule the returned tickers follow the selection order;
    for the other rules they follow input order.
    """
    if rule.kind == CUMULATIVE:
        total = math.fsum(a.market_cap for a in snapshot.assets)
        chosen = []
        running = []
        for rec in selection_order(snapshot):
            running.append(rec.market_cap)
            share = math.fsum(running) / total if total > 0 else 0.0
            if share > rule.threshold:
                break
            chosen.append(rec.ticker)
    elif rule.kind == EXPLICIT:
        present = set(snapshot.tickers)
        missing = sorted(rule.tickers - present)
        if missing:
            raise RuleError("explicit core tickers absent from snapshot: " + ", ".join(missing))
        chosen = [t for t in snapshot.tickers if t in rule.tickers]
    else:
        chosen = [a.ticker for a in snapshot.assets if rule.predicate.matches(a)]
    core = set(chosen)
    flags = {t: t in core for t in snapshot.tickers}
    return CoreSelection(tuple(chosen), flags)
