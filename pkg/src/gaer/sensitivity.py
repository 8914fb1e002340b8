"""Robustness diagnostics: threshold sweeps, single-asset removal, proxy shifts.

Core membership is re-derived in every counterfactual universe. Reports carry
a ``membership_changed`` flag so mass effects can be told apart from
reclassification effects.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence, Union

from .core_selection import CoreSelectionRule
from .engine import DegenerateUniverseError, compute_gaer
from .universe import GaerError, UniverseSnapshot

TARGETS = ("g", "i", "both")


@dataclass(frozen=True)
class SweepPoint:
    theta: float
    gaer: float
    core_size: int


@dataclass(frozen=True)
class ThresholdSweep:
    points: tuple[SweepPoint, ...]

    @property
    def thetas(self) -> list[float]:
        return [p.theta for p in self.points]

    @property
    def values(self) -> list[float]:
        return [p.gaer for p in self.points]


@dataclass(frozen=True)
class LeaveOneOut:
    ticker: str
    gaer_baseline: float
    gaer_without: float
    delta: float
    membership_changed: bool


@dataclass(frozen=True)
class PerturbationReport:
    delta: Union[float, Mapping[str, float]]
    target: str
    gaer_low: float
    baseline: float
    gaer_high: float
    membership_changed_low: bool
    membership_changed_high: bool


def threshold_sweep(snapshot: UniverseSnapshot, thetas: Sequence[float]) -> ThresholdSweep:
    if not thetas:
        raise GaerError("threshold sweep needs at least one theta")
    for a, b in zip(thetas, thetas[1:]):
        if not b > a:
            raise GaerError("thetas must be strictly increasing")
    points = []
    for theta in thetas:
        res = compute_gaer(snapshot, CoreSelectionRule.cumulative(theta))
        points.append(SweepPoint(theta, res.gaer, res.core_size))
    return ThresholdSweep(tuple(points))


def parse_theta_grid(text: str) -> list[float]:
    """``"0.5:0.95:0.05"`` (inclusive range) or ``"0.5,0.75,1"``."""
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        if step <= 0:
            raise ValueError("theta step must be positive")
        n = int(round((stop - start) / step))
        # snap to 12 decimals so 0.05-steps print as written
        grid = [round(start + k * step, 12) for k in range(n + 1)]
        return [t for t in grid if t <= stop + 1e-12]
    return [float(x) for x in text.split(",") if x.strip()]


def leave_one_out(
    snapshot: UniverseSnapshot, rule: CoreSelectionRule, ticker: str
) -> LeaveOneOut:
    """GAER with ``ticker`` removed; core membership is recomputed."""
    if ticker not in snapshot.tickers:
        raise GaerError(f"ticker {ticker!r} not in snapshot")
    base = compute_gaer(snapshot, rule)
    reduced = snapshot.with_assets(a for a in snapshot.assets if a.ticker != ticker)
    if not reduced.assets:
        raise DegenerateUniverseError(f"removing {ticker} leaves an empty universe")
    try:
        res = compute_gaer(reduced, rule.without(ticker))
    except DegenerateUniverseError as exc:
        raise DegenerateUniverseError(f"without {ticker}: {exc}") from None
    before = set(base.core_tickers) - {ticker}
    return LeaveOneOut(
        ticker=ticker,
        gaer_baseline=base.gaer,
        gaer_without=res.gaer,
        delta=res.gaer - base.gaer,
        membership_changed=set(res.core_tickers) != before,
    )


def _shift(snapshot: UniverseSnapshot, deltas: Mapping[str, float], target: str, sign: int):
    fields = ("g", "i") if target == "both" else (target,)
    assets = []
    for a in snapshot.assets:
        d = deltas.get(a.ticker, 0.0)
        changes = {f: min(1.0, max(0.0, getattr(a, f) + sign * d)) for f in fields}
        assets.append(replace(a, **changes))
    return snapshot.with_assets(assets)


def perturb_embedding(
    snapshot: UniverseSnapshot,
    rule: CoreSelectionRule,
    delta: Union[float, Mapping[str, float]],
    target: str,
) -> PerturbationReport:
    """Shift g, i or both by ``-delta`` and ``+delta`` (clamped to [0, 1]).

    ``delta`` is either one magnitude applied to every asset or a mapping of
    per-ticker magnitudes (unlisted tickers are left alone).
    """
    if target not in TARGETS:
        raise GaerError(f"target must be one of {TARGETS}, got {target!r}")
    if isinstance(delta, Mapping):
        unknown = sorted(set(delta) - set(snapshot.tickers))
        if unknown:
            raise GaerError("perturbation names unknown tickers: " + ", ".join(unknown))
        deltas = dict(delta)
    else:
        deltas = {t: delta for t in snapshot.tickers}
    for t, d in deltas.items():
        if not 0.0 <= d <= 1.0:
            raise GaerError(f"delta for {t} must lie in [0, 1], got {d}")

    base = compute_gaer(snapshot, rule)
    out = {}
    for name, sign in (("low", -1), ("high", +1)):
        world = _shift(snapshot, deltas, target, sign)
        try:
            out[name] = compute_gaer(world, rule)
        except DegenerateUniverseError as exc:
            direction = "-delta" if sign < 0 else "+delta"
            raise DegenerateUniverseError(f"{name} ({direction}) perturbation: {exc}") from None
    core = set(base.core_tickers)
    return PerturbationReport(
        delta=delta,
        target=target,
        gaer_low=out["low"].gaer,
        baseline=base.gaer,
        gaer_high=out["high"].gaer,
        membership_changed_low=set(out["low"].core_tickers) != core,
        membership_changed_high=set(out["high"].core_tickers) != core,
    )
