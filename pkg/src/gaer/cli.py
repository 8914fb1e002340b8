"""``gaer`` command-line entry point.

Exit codes: 0 success, 1 data or validation failure (diagnostics on stderr),
2 usage error. Nothing is written to stdout or to chart files unless the
whole command succeeds.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Optional

from .core_selection import CoreSelectionRule, RuleError, select_core
from .engine import compute_gaer
from .ingest import _DATE_IN_NAME, DELIMITED, format_for_path, load_snapshot, write_snapshot, SnapshotFileSpec
from .normalization import NormalizationScheme, normalize
from .report import (
    decomposition_to_dict,
    describe_rule,
    dumps,
    headline,
    loo_to_dict,
    perturbation_to_dict,
    render_summary,
    result_to_dict,
    series_svg,
    series_to_records,
    sweep_svg,
    sweep_to_records,
)
from .sensitivity import leave_one_out, parse_theta_grid, perturb_embedding, threshold_sweep
from .series import ScenarioShock, apply_shock, build_series, decompose_change, decompose_series
from .universe import DataError, GaerError, filter_min_adv

COMMANDS = ("compute", "core", "sweep", "perturb", "loo", "series", "shock", "normalize", "validate")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input_paths: list[Path] = field(default_factory=list)
    rule_params: dict = field(default_factory=dict)
    output_format: str = "table"
    chart_path: Optional[Path] = None
    as_of: Optional[date] = None
    options: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.output_format not in ("table", "records"):
            raise UsageError("--format must be 'table' or 'records'")
        if not self.input_paths:
            raise UsageError(f"{self.command}: at least one input is required")
        if self.command not in ("compute", "series") and len(self.input_paths) != 1:
            raise UsageError(f"{self.command}: exactly one --input is required")
        required = {
            "loo": ("ticker",),
            "shock": ("scenario",),
            "normalize": ("scheme",),
        }.get(self.command, ())
        for name in required:
            if self.options.get(name) is None:
                raise UsageError(f"{self.command}: --{name} is required")
        if self.command == "perturb" and (self.options.get("delta") is None) == (self.options.get("deltas") is None):
            raise UsageError("perturb: give exactly one of --delta or --deltas")
        if self.chart_path is not None and self.command not in ("sweep", "series"):
            raise UsageError("--svg is only supported by sweep and series")
        if self.command not in ("normalize", "series") and self.as_of is None:
            for p in self.input_paths:
                if format_for_path(p) == DELIMITED and not _DATE_IN_NAME.search(Path(p).stem):
                    raise UsageError(f"{p}: delimited input needs --as-of (or an ISO date in the file name)")
        self.rule()

    def rule(self) -> CoreSelectionRule:
        p = self.rule_params
        kind = p.get("rule", "cumulative")
        try:
            if kind == "cumulative":
                return CoreSelectionRule.cumulative(p.get("threshold", 0.75))
            if kind == "list":
                if not p.get("tickers"):
                    raise UsageError("--rule list requires --tickers")
                return CoreSelectionRule.explicit(_read_ticker_list(Path(p["tickers"])))
            if kind == "predicate":
                return CoreSelectionRule.where(
                    min_g=p.get("min_g"), min_i=p.get("min_i"), min_market_cap=p.get("min_mcap")
                )
        except RuleError as exc:
            raise UsageError(str(exc)) from None
        except OSError as exc:
            raise UsageError(f"cannot read ticker list: {exc}") from None
        raise UsageError(f"unknown rule {kind!r}")


@dataclass
class RunOutcome:
    status: int
    stdout: str = ""
    stderr: str = ""
    files: dict = field(default_factory=dict)


def _read_ticker_list(path: Path) -> list[str]:
    text = path.read_text(encoding="utf-8")
    return [t.strip() for t in text.replace(",", "\n").splitlines() if t.strip()]


def _load(config: RunConfig, path: Path):
    parsed = load_snapshot(path, as_of=config.as_of)
    snap = parsed.snapshot
    min_adv = config.options.get("min_adv")
    if min_adv is not None:
        snap = filter_min_adv(snap, min_adv)
    return snap, parsed.declared_core


def _expand_inputs(paths) -> list[Path]:
    out = []
    for p in map(Path, paths):
        if p.is_dir():
            out.extend(sorted(q for q in p.iterdir() if q.suffix.lower() in (".csv", ".json")))
        else:
            out.append(p)
    return out


def run(config: RunConfig) -> RunOutcome:
    try:
        config.validate()
        stdout, files = _dispatch(config)
    except UsageError as exc:
        return RunOutcome(2, stderr=f"usage error: {exc}\n")
    except DataError as exc:
        lines = [str(exc).splitlines()[0]] + [f"  {v}" for v in exc.violations]
        return RunOutcome(1, stderr="\n".join(lines) + "\n")
    except GaerError as exc:
        return RunOutcome(1, stderr=f"error: {exc}\n")
    except OSError as exc:
        return RunOutcome(1, stderr=f"error: {exc}\n")
    return RunOutcome(0, stdout=stdout, files=files)


def _dispatch(config: RunConfig):
    handler = globals()[f"_cmd_{config.command}"]
    return handler(config)


def _records(config) -> bool:
    return config.output_format == "records"


def _cmd_compute(config):
    rule = config.rule()
    results = []
    for path in config.input_paths:
        snap, _ = _load(config, path)
        results.append(compute_gaer(snap, rule))
    if _records(config):
        docs = [result_to_dict(r) for r in results]
        return dumps(docs[0] if len(docs) == 1 else docs), {}
    if len(results) == 1:
        return render_summary(results[0], top_n=config.options.get("top") or 5), {}
    # several universes: one comparison line each
    lines = [f"{'universe':<32} {'as of':<10} {'GAER':>6} {'exact':>8} {'core':>9}"]
    for path, r in zip(config.input_paths, results):
        name = r.label or Path(path).name
        lines.append(
            f"{name:<32} {r.as_of.isoformat():<10} {headline(r.gaer):>6} {r.gaer:>8.4f} "
            f"{r.core_size:>4}/{len(r.per_asset):<4}"
        )
    lines.append(f"rule: {describe_rule(rule)}")
    return "\n".join(lines) + "\n", {}


def _cmd_core(config):
    snap, declared = _load(config, config.input_paths[0])
    sel = select_core(snap, config.rule())
    mismatch = None
    if declared is not None:
        declared_set = set(declared)
        mismatch = {
            "selected_not_declared": [t for t in snap.tickers if sel.flags[t] and t not in declared_set],
            "declared_not_selected": [t for t in snap.tickers if not sel.flags[t] and t in declared_set],
        }
    if _records(config):
        doc = {
            "as_of": snap.as_of.isoformat(),
            "rule": config.rule().to_dict(),
            "core": list(sel.tickers),
            "flags": [{"ticker": t, "core": sel.flags[t]} for t in snap.tickers],
            "declared_core": None if declared is None else list(declared),
            "mismatches": mismatch,
        }
        return dumps(doc), {}
    lines = [f"core ({describe_rule(config.rule())}): {len(sel)} of {len(snap)}"]
    for t in snap.tickers:
        mark = "*" if sel.flags[t] else ""
        extra = ""
        if declared is not None:
            extra = "  declared" if t in declared else ""
        lines.append(f"  {t:<12} {mark:<2}{extra}")
    if mismatch is not None:
        n = len(mismatch["selected_not_declared"]) + len(mismatch["declared_not_selected"])
        lines.append(f"mismatches against declared core: {n}")
        for t in mismatch["selected_not_declared"]:
            lines.append(f"  {t}: selected but not declared")
        for t in mismatch["declared_not_selected"]:
            lines.append(f"  {t}: declared but not selected")
    return "\n".join(lines) + "\n", {}


def _cmd_sweep(config):
    snap, _ = _load(config, config.input_paths[0])
    try:
        thetas = parse_theta_grid(config.options.get("thetas") or "0.5:0.95:0.05")
    except ValueError as exc:
        raise UsageError(f"bad --thetas: {exc}") from None
    records = sweep_to_records(threshold_sweep(snap, thetas))
    files = {}
    if config.chart_path is not None:
        files[config.chart_path] = sweep_svg(records)
    if _records(config):
        return dumps(records), files
    lines = [f"{'theta':>6} {'GAER':>8} {'core':>5}"]
    lines += [f"{r['theta']:>6.3f} {r['gaer']:>8.4f} {r['core_size']:>5}" for r in records]
    return "\n".join(lines) + "\n", files


def _read_deltas(path: Path) -> dict:
    rows = list(csv.DictReader(io.StringIO(path.read_text(encoding="utf-8"))))
    try:
        return {r["ticker"].strip(): float(r["delta"]) for r in rows}
    except (KeyError, ValueError, AttributeError):
        raise GaerError(f"{path}: expected columns ticker,delta with numeric deltas") from None


def _cmd_perturb(config):
    snap, _ = _load(config, config.input_paths[0])
    opts = config.options
    delta = opts["delta"] if opts.get("delta") is not None else _read_deltas(Path(opts["deltas"]))
    report = perturb_embedding(snap, config.rule(), delta, opts.get("target") or "both")
    doc = perturbation_to_dict(report)
    if _records(config):
        return dumps(doc), {}
    d = "per-asset" if isinstance(report.delta, dict) else f"{report.delta:g}"
    lines = [
        f"perturbation of {report.target} by +/-{d}",
        f"  low      {report.gaer_low:.4f}{'  (core changed)' if report.membership_changed_low else ''}",
        f"  baseline {report.baseline:.4f}",
        f"  high     {report.gaer_high:.4f}{'  (core changed)' if report.membership_changed_high else ''}",
    ]
    return "\n".join(lines) + "\n", {}


def _cmd_loo(config):
    snap, _ = _load(config, config.input_paths[0])
    r = leave_one_out(snap, config.rule(), config.options["ticker"])
    if _records(config):
        return dumps(loo_to_dict(r)), {}
    lines = [
        f"without {r.ticker}: GAER {r.gaer_without:.4f} (baseline {r.gaer_baseline:.4f}, delta {r.delta:+.4f})",
        "core membership changed" if r.membership_changed else "core membership unchanged",
    ]
    return "\n".join(lines) + "\n", {}


def _cmd_series(config):
    paths = _expand_inputs(config.input_paths)
    if not paths:
        raise UsageError("series: no snapshot files found")
    snaps = sorted((_load(config, p)[0] for p in paths), key=lambda s: s.as_of)
    rule = config.rule()
    points = series_to_records(build_series(snaps, rule))
    decomp = None
    if config.options.get("decompose"):
        decomp = [decomposition_to_dict(d) for d in decompose_series(snaps, rule)]
    files = {}
    if config.chart_path is not None:
        files[config.chart_path] = series_svg(points, decomp)
    if _records(config):
        doc = {"points": points}
        if decomp is not None:
            doc["decomposition"] = decomp
        return dumps(doc), files
    lines = [f"{'as of':<10} {'GAER':>8} {'core':>5}"]
    lines += [f"{p['as_of']:<10} {p['gaer']:>8.4f} {p['core_size']:>5}" for p in points]
    if decomp is not None:
        lines.append("")
        lines.append(f"{'period':<21} {'delta':>9} {'repricing':>10} {'embedding':>10} {'composition*':>13}")
        for d in decomp:
            lines.append(
                f"{d['from']}/{d['to']} {d['delta_total']:>+9.4f} {d['mc_channel']:>+10.4f} "
                f"{d['embedding_channel']:>+10.4f} {d['composition_channel']:>+13.4f}"
                + ("  (no common tickers)" if d["disjoint"] else "")
            )
        lines.append("* composition channel: entries/exits, this toolkit's construction")
    return "\n".join(lines) + "\n", files


def _cmd_shock(config):
    snap, _ = _load(config, config.input_paths[0])
    path = Path(config.options["scenario"])
    try:
        shock = ScenarioShock.from_dict(json.loads(path.read_text(encoding="utf-8")))
    except json.JSONDecodeError as exc:
        raise GaerError(f"{path}: malformed JSON: {exc.msg}") from None
    shocked = apply_shock(snap, shock)
    rule = config.rule()
    before = compute_gaer(snap, rule)
    after = compute_gaer(shocked, rule)
    decomp = decompose_change(snap, shocked, rule)
    files = {}
    if config.options.get("output"):
        out = Path(config.options["output"])
        spec = SnapshotFileSpec(format_for_path(out))
        files[out] = write_snapshot(shocked, None, spec).decode("utf-8")
    if _records(config):
        doc = {
            "scenario": shock.name,
            "baseline": before.gaer,
            "shocked": after.gaer,
            "core_size_baseline": before.core_size,
            "core_size_shocked": after.core_size,
            "decomposition": decomposition_to_dict(decomp),
        }
        return dumps(doc), files
    lines = [
        f"scenario {shock.name!r}",
        f"  baseline GAER {before.gaer:.4f} (core {before.core_size})",
        f"  shocked  GAER {after.gaer:.4f} (core {after.core_size})",
        f"  change {decomp.delta_total:+.4f}: repricing {decomp.mc_channel:+.4f}, "
        f"embedding {decomp.embedding_channel:+.4f}, composition {decomp.composition_channel:+.4f}",
    ]
    return "\n".join(lines) + "\n", files


def _cmd_normalize(config):
    path = config.input_paths[0]
    rows = list(csv.reader(io.StringIO(Path(path).read_text(encoding="utf-8"))))
    rows = [r for r in rows if any(c.strip() for c in r)]
    if not rows or [c.strip().lower() for c in rows[0]] != ["ticker", "raw"]:
        raise GaerError(f"{path}: expected header 'ticker,raw'")
    pairs = []
    problems = []
    for n, r in enumerate(rows[1:], start=2):
        try:
            t, raw = r
            pairs.append((t.strip(), float(raw)))
        except ValueError:
            problems.append(f"line {n}: expected ticker and numeric raw value")
    if problems:
        raise GaerError(f"{path}: " + "; ".join(problems))
    opts = config.options
    kinds = {"min-max": "min-max", "rank": "rank", "affine": "affine-clamp", "affine-clamp": "affine-clamp"}
    if opts["scheme"] not in kinds:
        raise UsageError(f"unknown scheme {opts['scheme']!r}")
    scheme = NormalizationScheme(kinds[opts["scheme"]], slope=opts.get("a", 1.0), intercept=opts.get("b", 0.0))
    out = normalize(pairs, scheme)
    if _records(config):
        return dumps([{"ticker": t, "value": v} for t, v in out]), {}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["ticker", "value"])
    for t, v in out:
        w.writerow([t, repr(v)])
    return buf.getvalue(), {}


def _cmd_validate(config):
    snap, declared = _load(config, config.input_paths[0])
    msg = f"OK: {len(snap)} assets"
    if declared is not None:
        msg += f", {len(declared)} declared core"
    return msg + "\n", {}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", action="append", default=[], help="snapshot file (.csv or .json)")
    common.add_argument("--as-of", type=date.fromisoformat, help="ISO date for delimited inputs")
    common.add_argument("--format", choices=("table", "records"), default="table")
    common.add_argument("--threshold", type=float, default=0.75, help="cumulative market-cap share")
    common.add_argument("--rule", choices=("cumulative", "list", "predicate"), default="cumulative")
    common.add_argument("--tickers", help="file listing core tickers for --rule list")
    common.add_argument("--min-g", type=float)
    common.add_argument("--min-i", type=float)
    common.add_argument("--min-mcap", type=float)
    common.add_argument("--min-adv", type=float, help="drop assets below this ADV before computing")
    common.add_argument("--svg", type=Path, help="write a static chart here")

    parser = argparse.ArgumentParser(prog="gaer", description="Geopolitical-adaptive efficiency ratio diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("compute", parents=[common], help="GAER with per-asset attribution")
    p.add_argument("--top", type=int, default=5)
    sub.add_parser("core", parents=[common], help="core flags and mismatches against declared core")
    p = sub.add_parser("sweep", parents=[common], help="GAER across core thresholds")
    p.add_argument("--thetas", default="0.5:0.95:0.05")
    p = sub.add_parser("perturb", parents=[common], help="uniform G/I perturbation band")
    p.add_argument("--delta", type=float)
    p.add_argument("--deltas", help="CSV of ticker,delta")
    p.add_argument("--target", choices=("g", "i", "both"), default="both")
    p = sub.add_parser("loo", parents=[common], help="leave one asset out")
    p.add_argument("--ticker")
    p = sub.add_parser("series", parents=[common], help="GAER through time")
    p.add_argument("--inputs", nargs="+", default=[], help="snapshot files or directories")
    p.add_argument("--decompose", action="store_true")
    p = sub.add_parser("shock", parents=[common], help="apply a scenario shock")
    p.add_argument("--scenario")
    p.add_argument("--output", help="write the shocked snapshot here")
    p = sub.add_parser("normalize", parents=[common], help="map raw proxies onto [0,1]")
    p.add_argument("--scheme", choices=("min-max", "rank", "affine"))
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=0.0)
    sub.add_parser("validate", parents=[common], help="check a snapshot file")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    inputs = list(args.input) + list(getattr(args, "inputs", []) or [])
    options = {
        k: getattr(args, k, None)
        for k in ("top", "thetas", "delta", "deltas", "target", "ticker", "decompose",
                  "scenario", "output", "scheme", "a", "b", "min_adv")
    }
    return RunConfig(
        command=args.command,
        input_paths=[Path(p) for p in inputs],
        rule_params={
            "rule": args.rule,
            "threshold": args.threshold,
            "tickers": args.tickers,
            "min_g": args.min_g,
            "min_i": args.min_i,
            "min_mcap": args.min_mcap,
        },
        output_format=args.format,
        chart_path=args.svg,
        as_of=args.as_of,
        options=options,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    outcome = run(config_from_args(args))
    if outcome.status == 0:
        try:
            for path, content in outcome.files.items():
                Path(path).write_text(content, encoding="utf-8")
        except OSError as exc:
            sys.stderr.write(f"error: {exc}\n")
            return 1
    sys.stdout.write(outcome.stdout)
    sys.stderr.write(outcome.stderr)
    return outcome.status


if __name__ == "__main__":
    sys.exit(main())
