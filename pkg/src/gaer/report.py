"""Rendering: fixed-width tables, JSON records and static SVG charts.

Charts are drawn only from the record dictionaries produced here, so a chart
can never disagree with the machine-readable output of the same run.
"""

from __future__ import annotations

import json
from datetime import date
from typing import Iterable, Optional, Sequence
from xml.sax.saxutils import escape

from .core_selection import CoreSelectionRule
from .engine import AssetContribution, GaerResult, contributions
from .sensitivity import LeaveOneOut, PerturbationReport, ThresholdSweep
from .series import SeriesDecomposition, SeriesPoint

CORE_MARK = "*"


def headline(gaer: float) -> str:
    return f"{gaer:.2f}"


def render_table(result: GaerResult) -> str:
    header = f"{'Ticker':<12} {'Reg.':<4} {'MCAP':>10} {'ADV':>7} {'G':>5} {'I':>5} {'w':>10} {'Core':>4}"
    rule = "-" * len(header)
    lines = [header, rule]
    for a in result.per_asset:
        adv = "" if a.adv is None else f"{a.adv:.1f}"
        lines.append(
            f"{a.ticker:<12} {a.region:<4} {a.market_cap:>10,.1f} {adv:>7} "
            f"{a.g:>5.2f} {a.i:>5.2f} {a.weight:>10,.1f} {CORE_MARK if a.core else '':>4}"
        )
    lines.append(rule)
    lines.append(
        f"GAER {result.gaer:.4f} (~{headline(result.gaer)})  "
        f"core {result.core_size}/{len(result.per_asset)}  "
        f"core mass {result.core_mass:,.1f} / total {result.total_mass:,.1f}"
    )
    return "\n".join(lines) + "\n"


def render_summary(result: GaerResult, top_n: int = 5) -> str:
    title = result.label or "universe"
    lines = [
        f"{title} as of {result.as_of.isoformat()}",
        f"GAER {headline(result.gaer)}  ({result.gaer:.4f})",
        f"core size {result.core_size} of {len(result.per_asset)} ({describe_rule(result.rule)})",
        "",
        render_table(result),
        f"top {top_n} contributors:",
    ]
    for ticker, c, core in contributions(result, top_n):
        lines.append(f"  {ticker:<12} {c:7.2%}  {'core' if core else 'non-core'}")
    return "\n".join(lines) + "\n"


def describe_rule(rule: CoreSelectionRule) -> str:
    if rule.kind == "cumulative-cap-threshold":
        return f"cumulative market cap <= {rule.threshold:g}"
    if rule.kind == "explicit-list":
        return f"explicit list of {len(rule.tickers)}"
    p = rule.predicate
    parts = [f"{k}>={v:g}" for k, v in (("g", p.min_g), ("i", p.min_i), ("mcap", p.min_market_cap)) if v is not None]
    if p.regions is not None:
        parts.append("region in " + "/".join(sorted(p.regions)))
    return "predicate " + (" ".join(parts) or "(always true)")


# -- records ---------------------------------------------------------------

def result_to_dict(result: GaerResult) -> dict:
    return {
        "as_of": result.as_of.isoformat(),
        "label": result.label,
        "gaer": result.gaer,
        "gaer_display": headline(result.gaer),
        "total_mass": result.total_mass,
        "core_mass": result.core_mass,
        "core_size": result.core_size,
        "rule": result.rule.to_dict(),
        "per_asset": [
            {
                "ticker": a.ticker,
                "region": a.region,
                "mcap": a.market_cap,
                "adv": a.adv,
                "g": a.g,
                "i": a.i,
                "w": a.weight,
                "contribution": a.contribution,
                "core": a.core,
            }
            for a in result.per_asset
        ],
    }


def result_from_dict(d: dict) -> GaerResult:
    return GaerResult(
        as_of=date.fromisoformat(d["as_of"]),
        gaer=d["gaer"],
        total_mass=d["total_mass"],
        core_mass=d["core_mass"],
        per_asset=tuple(
            AssetContribution(
                ticker=a["ticker"],
                region=a["region"],
                market_cap=a["mcap"],
                adv=a["adv"],
                g=a["g"],
                i=a["i"],
                weight=a["w"],
                contribution=a["contribution"],
                core=a["core"],
            )
            for a in d["per_asset"]
        ),
        rule=CoreSelectionRule.from_dict(d["rule"]),
        label=d.get("label"),
    )


def sweep_to_records(sweep: ThresholdSweep) -> list[dict]:
    return [{"theta": p.theta, "gaer": p.gaer, "core_size": p.core_size} for p in sweep.points]


def series_to_records(points: Sequence[SeriesPoint]) -> list[dict]:
    return [{"as_of": p.as_of.isoformat(), "gaer": p.gaer, "core_size": p.core_size} for p in points]


def decomposition_to_dict(d: SeriesDecomposition) -> dict:
    return {
        "from": d.from_date.isoformat(),
        "to": d.to_date.isoformat(),
        "delta_total": d.delta_total,
        "mc_channel": d.mc_channel,
        "embedding_channel": d.embedding_channel,
        "composition_channel": d.composition_channel,
        "disjoint": d.disjoint,
    }


def loo_to_dict(r: LeaveOneOut) -> dict:
    return {
        "ticker": r.ticker,
        "gaer_baseline": r.gaer_baseline,
        "gaer_without": r.gaer_without,
        "delta": r.delta,
        "membership_changed": r.membership_changed,
    }


def perturbation_to_dict(r: PerturbationReport) -> dict:
    delta = dict(sorted(r.delta.items())) if isinstance(r.delta, dict) else r.delta
    return {
        "delta": delta,
        "target": r.target,
        "gaer_low": r.gaer_low,
        "baseline": r.baseline,
        "gaer_high": r.gaer_high,
        "membership_changed_low": r.membership_changed_low,
        "membership_changed_high": r.membership_changed_high,
    }


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


# -- charts ----------------------------------------------------------------

WIDTH, HEIGHT = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 60, 20, 30, 50


def _svg_open(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
    ]


def _axes(parts, y_lo, y_hi, x_label, y_label):
    x0, x1 = LEFT, WIDTH - RIGHT
    y0, y1 = HEIGHT - BOTTOM, TOP
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>')
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>')
    for k in range(5):
        v = y_lo + (y_hi - y_lo) * k / 4
        y = _scale(v, y_lo, y_hi, y0, y1)
        parts.append(f'<line x1="{x0 - 4}" y1="{y:.2f}" x2="{x0}" y2="{y:.2f}" stroke="black"/>')
        parts.append(f'<text x="{x0 - 6}" y="{y + 4:.2f}" text-anchor="end">{v:.2f}</text>')
    parts.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(x_label)}</text>')
    parts.append(
        f'<text x="14" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 14 {(y0 + y1) / 2:.1f})">{escape(y_label)}</text>'
    )


def _scale(v, lo, hi, out_lo, out_hi):
    if hi == lo:
        return (out_lo + out_hi) / 2
    return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo)


def _line_with_points(parts, xs, ys, x_lo, x_hi, y_lo, y_hi, labels):
    coords = [
        (_scale(x, x_lo, x_hi, LEFT, WIDTH - RIGHT), _scale(y, y_lo, y_hi, HEIGHT - BOTTOM, TOP))
        for x, y in zip(xs, ys)
    ]
    if len(coords) > 1:
        path = " ".join(f"{px:.2f},{py:.2f}" for px, py in coords)
        parts.append(f'<polyline points="{path}" fill="none" stroke="#1f77b4" stroke-width="2"/>')
    for (px, py), label, y in zip(coords, labels, ys):
        parts.append(
            f'<circle class="point" cx="{px:.2f}" cy="{py:.2f}" r="3" fill="#1f77b4" '
            f'data-x="{escape(label)}" data-y="{y!r}"/>'
        )
        parts.append(f'<text x="{px:.2f}" y="{HEIGHT - BOTTOM + 14}" text-anchor="middle">{escape(label)}</text>')


def sweep_svg(records: Sequence[dict], title: str = "GAER by core threshold") -> str:
    parts = _svg_open(title)
    xs = [r["theta"] for r in records]
    ys = [r["gaer"] for r in records]
    _axes(parts, 0.0, 1.0, "cumulative market-cap threshold", "GAER")
    x_lo, x_hi = (min(xs), max(xs)) if xs else (0.0, 1.0)
    _line_with_points(parts, xs, ys, x_lo, x_hi, 0.0, 1.0, [f"{x:g}" for x in xs])
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


CHANNEL_COLORS = {
    "mc_channel": "#ff7f0e",
    "embedding_channel": "#2ca02c",
    "composition_channel": "#9467bd",
}


def series_svg(
    records: Sequence[dict],
    decomposition: Optional[Iterable[dict]] = None,
    title: str = "GAER over time",
) -> str:
    """Date on x, GAER on y; with a decomposition, stacked channel bars per period.

    Channel bars use their own scale on the right-hand part of the y range and
    are placed at the end date of each period.
    """
    parts = _svg_open(title)
    _axes(parts, 0.0, 1.0, "as of", "GAER")
    ordinals = [date.fromisoformat(r["as_of"]).toordinal() for r in records]
    ys = [r["gaer"] for r in records]
    x_lo, x_hi = (min(ordinals), max(ordinals)) if ordinals else (0, 1)
    x_at = {r["as_of"]: _scale(o, x_lo, x_hi, LEFT, WIDTH - RIGHT) for r, o in zip(records, ordinals)}

    if decomposition:
        decomposition = list(decomposition)
        span = max(
            (abs(d[k]) for d in decomposition for k in CHANNEL_COLORS), default=0.0
        ) * 3 or 1.0
        mid = (HEIGHT - BOTTOM + TOP) / 2
        half = (HEIGHT - BOTTOM - TOP) / 2
        parts.append(f'<line x1="{LEFT}" y1="{mid:.2f}" x2="{WIDTH - RIGHT}" y2="{mid:.2f}" stroke="#ccc" stroke-dasharray="3,3"/>')
        for d in decomposition:
            cx = x_at.get(d["to"], LEFT)
            pos, neg = mid, mid
            for key, color in CHANNEL_COLORS.items():
                v = d[key]
                h = abs(v) / span * half
                if v >= 0:
                    pos -= h
                    y = pos
                else:
                    y = neg
                    neg += h
                parts.append(
                    f'<rect class="channel" x="{cx - 6:.2f}" y="{y:.2f}" width="12" height="{h:.2f}" '
                    f'fill="{color}" opacity="0.6" data-period="{d["from"]}/{d["to"]}" '
                    f'data-channel="{key}" data-value="{v!r}"/>'
                )
        for k, (key, color) in enumerate(CHANNEL_COLORS.items()):
            y = TOP + 12 * k
            parts.append(f'<rect x="{WIDTH - RIGHT - 130}" y="{y}" width="8" height="8" fill="{color}"/>')
            parts.append(f'<text x="{WIDTH - RIGHT - 118}" y="{y + 8}">{key.replace("_", " ")}</text>')

    _line_with_points(parts, ordinals, ys, x_lo, x_hi, 0.0, 1.0, [r["as_of"] for r in records])
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
