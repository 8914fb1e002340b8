from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date
from typing import Optional

from .core_selection import CoreSelectionRule, select_core
from .universe import GaerError, UniverseSnapshot, asset_weight, ensure_valid


class DegenerateUniverseError(GaerError):
    pass


@dataclass(frozen=True)
class AssetContribution:
    """Per-asset line of a result: inputs, weight, share of total mass, core flag."""

    ticker: str
    region: str
    market_cap: float
    adv: Optional[float]
    g: float
    i: float
    weight: float
    contribution: float
    core: bool


@dataclass(frozen=True)
class GaerResult:
    as_of: date
    gaer: float
    total_mass: float
    core_mass: float
    per_asset: tuple[AssetContribution, ...]
    rule: CoreSelectionRule
    label: Optional[str] = None

    @property
    def core_tickers(self) -> list[str]:
        return [a.ticker for a in self.per_asset if a.core]

    @property
    def core_size(self) -> int:
        return sum(1 for a in self.per_asset if a.core)


def compute_gaer(snapshot: UniverseSnapshot, rule: CoreSelectionRule) -> GaerResult:
    """Share of total ``MC * G * I`` mass held by the core subset.

    Masses are summed with :func:`math.fsum`, so the result does not depend on
    row order and the core mass can never exceed the total.

    Raises:
        DegenerateUniverseError: empty snapshot or zero total mass.
        ValidationError: snapshot breaks a record invariant.
    """
    if not snapshot.assets:
        raise DegenerateUniverseError("degenerate universe: empty snapshot")
    ensure_valid(snapshot)
    weights = [asset_weight(a) for a in snapshot.assets]
    total = math.fsum(weights)
    if not total > 0:
        raise DegenerateUniverseError(
            "degenerate universe: zero total adaptive-efficiency mass"
        )
    selection = select_core(snapshot, rule)
    core_mass = math.fsum(w for a, w in zip(snapshot.assets, weights) if a.ticker in selection)
    per_asset = tuple(
        AssetContribution(
            ticker=a.ticker,
            region=a.region,
            market_cap=a.market_cap,
            adv=a.adv,
            g=a.g,
            i=a.i,
            weight=w,
            contribution=w / total,
            core=a.ticker in selection,
        )
        for a, w in zip(snapshot.assets, weights)
    )
    return GaerResult(
        as_of=snapshot.as_of,
        gaer=core_mass / total,
        total_mass=total,
        core_mass=core_mass,
        per_asset=per_asset,
        rule=rule,
        label=snapshot.label,
    )


def contributions(result: GaerResult, top_n: int) -> list[tuple[str, float, bool]]:
    """Top ``top_n`` assets by contribution, descending; ties by ticker."""
    if top_n < 0:
        raise ValueError("top_n must be non-negative")
    ranked = sorted(result.per_asset, key=lambda a: (-a.contribution, a.ticker))
    return [(a.ticker, a.contribution, a.core) for a in ranked[:top_n]]
