"""Deliberately naive reference computations, independent of the package code.

Works on plain ``(ticker, mcap, g, i)`` tuples. Core selection uses exact
rational arithmetic and an exhaustive search over prefixes instead of an
early-stopping walk; GAER itself uses left-to-right float sums.
"""

from fractions import Fraction
from itertools import permutations


def rows_of(snapshot):
    return [(a.ticker, a.market_cap, a.g, a.i) for a in snapshot.assets]


def weight(row):
    _, mc, g, i = row
    return mc * g * i


def cumulative_core(rows, theta):
    ordered = sorted(rows, key=lambda r: (-r[1], -weight(r), r[0]))
    total = sum(Fraction(r[1]) for r in rows)
    best = 0
    for k in range(len(ordered) + 1):
        s = sum(Fraction(r[1]) for r in ordered[:k])
        share = s / total if total > 0 else 0
        # every shorter prefix has a smaller share, so the first failure ends it
        if share <= theta:
            best = k
        else:
            break
    return {r[0] for r in ordered[:best]}


def gaer(rows, core):
    num = 0.0
    den = 0.0
    for r in rows:
        w = weight(r)
        den += w
        if r[0] in core:
            num += w
    return num / den


def average_ranks_by_enumeration(values):
    """Mean rank of each item over every ordering consistent with the values."""
    n = len(values)
    totals = [0.0] * n
    count = 0
    for perm in permutations(range(n)):
        if all(values[perm[k]] <= values[perm[k + 1]] for k in range(n - 1)):
            count += 1
            for rank, idx in enumerate(perm, start=1):
                totals[idx] += rank
    return [t / count for t in totals]
