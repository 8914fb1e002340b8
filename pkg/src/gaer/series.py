"""GAER through time: series building, change attribution, scenario shocks.

:func:`decompose_change` splits the period-over-period change into three
parts that add up exactly:

* composition: whatever the entry and exit of tickers explains, i.e. the
  total change minus the change measured on the tickers present at both dates;
* repricing (market cap) and embedding (G and I jointly): the change on the
  common tickers, split by averaging the two orders in which the factors can
  be switched from old to new values (a two-player Shapley split).

The composition channel is this toolkit's construction, not a standard one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import date
from typing import Mapping, Sequence

from .core_selection import CoreSelectionRule
from .engine import DegenerateUniverseError, compute_gaer
from .universe import GaerError, UniverseSnapshot


@dataclass(frozen=True)
class SeriesPoint:
    as_of: date
    gaer: float
    core_size: int


@dataclass(frozen=True)
class SeriesDecomposition:
    from_date: date
    to_date: date
    delta_total: float
    mc_channel: float
    embedding_channel: float
    composition_channel: float
    disjoint: bool = False

    @property
    def channel_sum(self) -> float:
        return self.mc_channel + self.embedding_channel + self.composition_channel


@dataclass(frozen=True)
class ScenarioShock:
    name: str
    mc_multipliers: Mapping[str, float] = field(default_factory=dict)
    g_offsets: Mapping[str, float] = field(default_factory=dict)
    i_offsets: Mapping[str, float] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioShock":
        if not isinstance(d, dict) or "name" not in d:
            raise GaerError("scenario shock must be an object with a 'name'")
        unknown = set(d) - {"name", "mc_multipliers", "g_offsets", "i_offsets"}
        if unknown:
            raise GaerError("unknown scenario fields: " + ", ".join(sorted(unknown)))
        maps = {}
        for key in ("mc_multipliers", "g_offsets", "i_offsets"):
            m = d.get(key) or {}
            if not isinstance(m, dict):
                raise GaerError(f"{key} must map tickers to numbers")
            for t, v in m.items():
                if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                    raise GaerError(f"{key}[{t}] is not a finite number")
            maps[key] = {t: float(v) for t, v in m.items()}
        return cls(name=str(d["name"]), **maps)


def _restricted_rule(rule: CoreSelectionRule, tickers: set[str]) -> CoreSelectionRule:
    # explicit lists may name tickers that entered or exited; ignore those here
    if rule.kind == "explicit-list":
        return CoreSelectionRule.explicit(rule.tickers & tickers)
    return rule


def build_series(snapshots: Sequence[UniverseSnapshot], rule: CoreSelectionRule) -> list[SeriesPoint]:
    if not snapshots:
        raise GaerError("series needs at least one snapshot")
    for prev, nxt in zip(snapshots, snapshots[1:]):
        if not nxt.as_of > prev.as_of:
            raise GaerError(
                f"snapshot dates must be strictly increasing ({prev.as_of} then {nxt.as_of})"
            )
    points = []
    for snap in snapshots:
        try:
            res = compute_gaer(snap, _restricted_rule(rule, set(snap.tickers)))
        except GaerError as exc:
            raise type(exc)(f"snapshot {snap.as_of}: {exc}") from None
        points.append(SeriesPoint(snap.as_of, res.gaer, res.core_size))
    return points


def _gaer(snapshot: UniverseSnapshot, rule: CoreSelectionRule, what: str) -> float:
    try:
        return compute_gaer(snapshot, _restricted_rule(rule, set(snapshot.tickers))).gaer
    except DegenerateUniverseError as exc:
        raise DegenerateUniverseError(f"{what}: {exc}") from None


def decompose_change(
    prev: UniverseSnapshot, next: UniverseSnapshot, rule: CoreSelectionRule
) -> SeriesDecomposition:
    """Attribute ``GAER(next) - GAER(prev)`` to repricing, embedding and composition.

    With no common tickers the whole change is composition and ``disjoint``
    is set.
    """
    if next.as_of < prev.as_of:
        raise GaerError(f"dates out of order: {prev.as_of} after {next.as_of}")
    g_prev = _gaer(prev, rule, f"snapshot {prev.as_of}")
    g_next = _gaer(next, rule, f"snapshot {next.as_of}")
    delta = g_next - g_prev

    common = set(prev.tickers) & set(next.tickers)
    if not common:
        return SeriesDecomposition(prev.as_of, next.as_of, delta, 0.0, 0.0, delta, disjoint=True)

    old = {a.ticker: a for a in prev.assets if a.ticker in common}
    new = {a.ticker: a for a in next.assets if a.ticker in common}
    order = [t for t in prev.tickers if t in common]

    def world(mc_src, gi_src, when):
        assets = [
            replace(gi_src[t], market_cap=mc_src[t].market_cap) for t in order
        ]
        return UniverseSnapshot(as_of=when, assets=tuple(assets), label=prev.label)

    r_prev = _gaer(world(old, old, prev.as_of), rule, "common tickers at start")
    r_next = _gaer(world(new, new, next.as_of), rule, "common tickers at end")
    mc_moved = _gaer(world(new, old, next.as_of), rule, "counterfactual (new caps, old embedding)")
    gi_moved = _gaer(world(old, new, next.as_of), rule, "counterfactual (old caps, new embedding)")

    mc_channel = 0.5 * ((mc_moved - r_prev) + (r_next - gi_moved))
    embedding_channel = 0.5 * ((gi_moved - r_prev) + (r_next - mc_moved))
    composition_channel = delta - (r_next - r_prev)
    return SeriesDecomposition(
        prev.as_of, next.as_of, delta, mc_channel, embedding_channel, composition_channel
    )


def decompose_series(
    snapshots: Sequence[UniverseSnapshot], rule: CoreSelectionRule
) -> list[SeriesDecomposition]:
    return [decompose_change(a, b, rule) for a, b in zip(snapshots, snapshots[1:])]


def apply_shock(snapshot: UniverseSnapshot, shock: ScenarioShock) -> UniverseSnapshot:
    """New snapshot with market caps scaled and G/I offset (clamped to [0, 1])."""
    present = set(snapshot.tickers)
    unknown = sorted(
        (set(shock.mc_multipliers) | set(shock.g_offsets) | set(shock.i_offsets)) - present
    )
    if unknown:
        raise GaerError(f"shock {shock.name!r} references unknown tickers: " + ", ".join(unknown))
    bad = sorted(t for t, m in shock.mc_multipliers.items() if not m > 0)
    if bad:
        raise GaerError(f"shock {shock.name!r} has non-positive multipliers for: " + ", ".join(bad))

    assets = []
    for a in snapshot.assets:
        mc = a.market_cap * shock.mc_multipliers[a.ticker] if a.ticker in shock.mc_multipliers else a.market_cap
        g = min(1.0, max(0.0, a.g + shock.g_offsets[a.ticker])) if a.ticker in shock.g_offsets else a.g
        i = min(1.0, max(0.0, a.i + shock.i_offsets[a.ticker])) if a.ticker in shock.i_offsets else a.i
        assets.append(replace(a, market_cap=mc, g=g, i=i))
    return snapshot.with_assets(assets)
