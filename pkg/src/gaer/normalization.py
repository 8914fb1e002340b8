"""Map raw proxy measurements onto [0, 1].

Each call normalizes one cross-section (one snapshot date). Pooling values
across dates would let later observations move earlier indicators, so it is
left to the caller to avoid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .universe import GaerError

MIN_MAX = "min-max"
RANK = "rank"
AFFINE_CLAMP = "affine-clamp"
SCHEMES = (MIN_MAX, RANK, AFFINE_CLAMP)


class NormalizationError(GaerError):
    pass


@dataclass(frozen=True)
class NormalizationScheme:
    kind: str
    slope: float = 1.0
    intercept: float = 0.0

    def __post_init__(self):
        if self.kind not in SCHEMES:
            raise NormalizationError(f"unknown normalization scheme {self.kind!r}")
        if not (math.isfinite(self.slope) and math.isfinite(self.intercept)):
            raise NormalizationError("affine-clamp parameters must be finite")


def _clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


def average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks; tied values share the mean of the positions they span."""
    order = sorted(range(len(values)), key=lambda k: values[k])
    ranks = [0.0] * len(values)
    start = 0
    while start < len(order):
        end = start
        while end + 1 < len(order) and values[order[end + 1]] == values[order[start]]:
            end += 1
        shared = (start + end) / 2 + 1
        for pos in range(start, end + 1):
            ranks[order[pos]] = shared
        start = end + 1
    return ranks


def normalize(
    raw_values: Sequence[tuple[str, float]], scheme: NormalizationScheme
) -> list[tuple[str, float]]:
    """Normalize ``(ticker, raw)`` pairs, preserving input order."""
    if not raw_values:
        raise NormalizationError("nothing to normalize")
    tickers = [t for t, _ in raw_values]
    raws = [float(x) for _, x in raw_values]
    bad = [t for t, x in zip(tickers, raws) if not math.isfinite(x)]
    if bad:
        raise NormalizationError("non-finite raw values for: " + ", ".join(bad))

    if scheme.kind == MIN_MAX:
        lo, hi = min(raws), max(raws)
        if lo == hi:
            raise NormalizationError("degenerate range: all raw values identical")
        out = [_clamp((x - lo) / (hi - lo)) for x in raws]
    elif scheme.kind == RANK:
        n = len(raws)
        if n == 1:
            raise NormalizationError("rank undefined for singleton")
        out = [(r - 1) / (n - 1) for r in average_ranks(raws)]
    else:
        out = [_clamp(scheme.slope * x + scheme.intercept) for x in raws]
    return list(zip(tickers, out))


def is_normalized(values: Sequence[float]) -> bool:
    return all(0.0 <= v <= 1.0 for v in values)
