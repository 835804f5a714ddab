"""Command-line front end: ad-hoc prices, price tables, sweeps, MWRs and frontiers.

Exit codes: 0 success, 1 input error, 2 non-viable product, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Iterable, Sequence

from .errors import (AnnuityError, DomainError, DurationBlowUp, InputError,
                     NonViableError, NumericalFailure)
from .mortality import ExponentialLaw, GompertzLaw, MortalityLaw
from .mwr import SexMortality, mwr_batch, sample_quotes_path
from .pricing import ProductKind, ProductSpec, ValuationContext, price
from .quadrature import BisectionSettings, QuadratureSettings
from .sensitivity import analytic_sensitivities
from .viability import frontier_sweep, max_viable_age, min_viable_rate

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NON_VIABLE = 2
EXIT_NUMERICAL = 3

CONFIG_KEYS = ("m", "b", "lambda", "rate", "loading", "format", "out")
FORMATS = ("csv", "json")
QUANTITIES = ("price", "duration", "macaulay", "d_age", "d_rate")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    """Validated run settings after merging the config file and flags."""

    law: MortalityLaw = field(default_factory=GompertzLaw)
    rate: float = 0.02
    loading: float = 0.0
    format: str = "csv"
    out: str | None = None
    timestamp: bool = True
    quadrature: QuadratureSettings = field(default_factory=QuadratureSettings)
    bisection: BisectionSettings = field(default_factory=BisectionSettings)

    @property
    def context(self) -> ValuationContext:
        return ValuationContext(self.law, self.quadrature, self.bisection)


def read_config(path: str) -> dict[str, str]:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are skipped."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    values = {}
    for number, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise InputError(f"{path}:{number}: expected key=value, got {raw.strip()!r}")
        if key not in CONFIG_KEYS:
            raise InputError(f"{path}:{number}: unknown key {key!r}; allowed: {', '.join(CONFIG_KEYS)}")
        values[key] = value.strip()
    return values


def _number(name, text):
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise InputError(f"{name} must be a number, got {text!r}") from None
    if not math.isfinite(value):
        raise InputError(f"{name} must be finite, got {text!r}")
    return value


def float_list(text: str) -> list[float]:
    text = text.strip()
    if not text:
        return []
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def product_kind(text: str) -> ProductKind:
    try:
        return ProductKind.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_config(args) -> RunConfig:
    values = read_config(args.config) if args.config else {}
    for key in ("m", "b", "rate", "loading", "format", "out"):
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = str(flag)
    if getattr(args, "lam", None) is not None:
        values["lambda"] = str(args.lam)

    if "lambda" in values:
        if "m" in values or "b" in values:
            raise InputError("give either lambda or m/b, not both")
        law = ExponentialLaw(_number("lambda", values["lambda"]))
    else:
        law = GompertzLaw(_number("m", values.get("m", 90.0)), _number("b", values.get("b", 10.0)))
    fmt = values.get("format", "csv")
    if fmt not in FORMATS:
        raise InputError(f"format must be one of {', '.join(FORMATS)}, got {fmt!r}")
    quad = QuadratureSettings()
    if args.quad_rtol is not None:
        quad = replace(quad, relative_tolerance=args.quad_rtol)
    bis = BisectionSettings()
    if args.bisect_tol is not None:
        bis = replace(bis, residual_tolerance=args.bisect_tol)
    return RunConfig(
        law=law,
        rate=_number("rate", values.get("rate", 0.02)),
        loading=_number("loading", values.get("loading", 0.0)),
        format=fmt,
        out=values.get("out") or None,
        timestamp=not args.no_timestamp,
        quadrature=quad,
        bisection=bis,
    )


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else ""
    return str(value)


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def render(columns: Sequence[str], rows: Iterable[dict], fmt: str, timestamp: bool) -> str:
    """CSV or JSON text. Floats use the shortest round-trip form; NaN becomes empty or null."""
    rows = list(rows)
    stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ") if timestamp else None
    if fmt == "json":
        body = {"columns": list(columns),
                "rows": [{c: _json_value(row.get(c)) for c in columns} for row in rows]}
        if stamp:
            body = {"generated": stamp, **body}
        return json.dumps(body, indent=2) + "\n"
    buf = io.StringIO()
    if stamp:
        buf.write(f"# generated {stamp}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def emit(cfg: RunConfig, columns, rows):
    text = render(columns, rows, cfg.format, cfg.timestamp)
    if cfg.out:
        try:
            with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {cfg.out}: {exc}") from exc
    else:
        sys.stdout.write(text)


PRICE_COLUMNS = ("kind", "age", "rate", "loading", "price", "income_per_million",
                 "viable", "residual", "iterations", "reason")


def _price_row(ctx, kind, x, r, pi):
    res = price(ctx, ProductSpec(kind, x, r, pi))
    return {
        "kind": ProductKind.parse(kind).value, "age": x, "rate": r, "loading": pi,
        "price": res.price if res.viable else None,
        "income_per_million": res.income_per_million if res.viable else None,
        "viable": res.viable,
        "residual": res.residual if res.viable else None,
        "iterations": res.iterations,
        "reason": res.reason,
    }


def _frontier_hint(cfg, x, r, pi):
    notes = [f"r * a(x, r) must exceed pi / (1 + pi) = {pi / (1 + pi):.6g}"]
    try:
        notes.append(f"minimum viable rate at age {x:g}: {min_viable_rate(cfg.context, x, pi).threshold:.6g}")
        if isinstance(cfg.law, GompertzLaw) and r > 0:
            point = max_viable_age(cfg.context, r, pi)
            if point.exists:
                notes.append(f"maximum viable age at rate {r:g}: {point.threshold:.6g}")
    except AnnuityError:
        pass
    return notes


def cmd_price(args, cfg: RunConfig) -> int:
    pi = cfg.loading
    row = _price_row(cfg.context, args.kind, args.age, cfg.rate, pi)
    emit(cfg, PRICE_COLUMNS, [row])
    if row["viable"]:
        return EXIT_OK
    print(f"non-viable: {row['reason']}", file=sys.stderr)
    if ProductKind.parse(args.kind) is ProductKind.CASH_REFUND and pi > 0 and cfg.rate > 0:
        for note in _frontier_hint(cfg, args.age, cfg.rate, pi):
            print(f"  {note}", file=sys.stderr)
    return EXIT_NON_VIABLE


def cmd_table(args, cfg: RunConfig) -> int:
    ctx = cfg.context
    if args.table in ("loia", "cria", "iria"):
        kind = {"loia": "LO", "cria": "CR", "iria": "IR"}[args.table]
        loadings = args.loadings if args.loadings is not None else [cfg.loading]
        rates = args.rates if args.rates is not None else [0.02, 0.04]
        rows = [_price_row(ctx, kind, x, r, pi) for pi in loadings for x in args.ages for r in rates]
        emit(cfg, PRICE_COLUMNS, rows)
    elif args.table == "frontier":
        loadings = args.loadings if args.loadings is not None else [0.05, 0.15, 0.25]
        rows = []
        for x in args.ages:
            for pi in loadings:
                point = min_viable_rate(ctx, x, pi)
                rows.append({"age": x, "loading": pi, "min_rate": point.threshold,
                             "basis_points": point.basis_points, "residual": point.residual})
        emit(cfg, ("age", "loading", "min_rate", "basis_points", "residual"), rows)
    else:
        return _mwr_rows(args, cfg, solve_rate=False)
    return EXIT_OK


MWR_COLUMNS = ("line", "label", "age", "sex", "kind", "premium", "annual_income",
               "model_price", "empirical_price", "mwr", "implied_rate", "error")


def _mwr_rows(args, cfg, solve_rate):
    path = args.quotes or sample_quotes_path()
    mortality = SexMortality()
    rows = []
    for item in mwr_batch(cfg.context, path, cfg.rate, mortality, solve_rate):
        row = {"line": item.line, "label": item.label, "error": item.error}
        if item.quote is not None:
            q = item.quote
            row.update(age=q.age, sex=q.sex, kind=q.kind.value, premium=q.premium,
                       annual_income=q.annual_income)
        if item.result is not None:
            res = item.result
            row.update(model_price=res.model_price, empirical_price=res.empirical_price,
                       mwr=res.mwr, implied_rate=res.implied_fair_rate)
        rows.append(row)
    emit(cfg, MWR_COLUMNS, rows)
    return EXIT_OK


def cmd_mwr(args, cfg: RunConfig) -> int:
    return _mwr_rows(args, cfg, solve_rate=not args.no_implied_rate)


def sweep_values(args) -> list[float]:
    if args.values is not None:
        return args.values
    if args.start is None or args.stop is None or args.step is None:
        raise InputError("sweep needs --values or all of --start, --stop, --step")
    if not args.step > 0:
        raise InputError(f"--step must be > 0, got {args.step}")
    if args.start > args.stop:
        raise InputError(f"--start {args.start} exceeds --stop {args.stop}")
    count = int(math.floor((args.stop - args.start) / args.step + 0.5)) + 1
    return [args.start + i * args.step for i in range(count)]


def _sweep_cell(ctx, quantity, spec):
    if quantity == "price":
        res = price(ctx, spec)
        if not res.viable:
            return None, res.reason
        return res.price, None
    report = analytic_sensitivities(ctx, spec)
    value = {
        "duration": report.life_annuity_duration,
        "macaulay": report.macaulay_duration,
        "d_age": report.d_price_d_age,
        "d_rate": report.d_price_d_rate,
    }[quantity]
    return value, None


def cmd_sweep(args, cfg: RunConfig) -> int:
    ctx = cfg.context
    rows = []
    for value in sweep_values(args):
        x = value if args.axis == "age" else args.age
        r = value if args.axis == "rate" else cfg.rate
        pi = value if args.axis == "loading" else cfg.loading
        row = {args.axis: value, "age": x, "rate": r, "loading": pi}
        try:
            result, note = _sweep_cell(ctx, args.quantity, ProductSpec(args.kind, x, r, pi))
        except NonViableError as exc:
            result, note = None, str(exc)
        except DurationBlowUp as exc:
            result, note = None, f"duration blow-up: {exc}"
        row.update(value=result, viable=result is not None, note=note)
        rows.append(row)
    columns = ["age", "rate", "loading", "value", "viable", "note"]
    emit(cfg, columns, rows)
    return EXIT_OK


def cmd_frontier(args, cfg: RunConfig) -> int:
    pi = cfg.loading if cfg.loading > 0 else 0.15
    values = args.values if args.values is not None else (
        [55.0, 65.0, 75.0] if args.axis == "age" else [0.02, 0.04])
    rows = []
    for item in frontier_sweep(cfg.context, pi, args.axis, values):
        point = item.point
        rows.append({
            "axis": item.axis, "coordinate": item.coordinate, "loading": item.loading,
            "threshold": point.threshold if point else None,
            "exists": bool(point and point.exists),
            "residual": point.residual if point and point.exists else None,
            "note": item.error or (point.reason if point else None),
        })
    emit(cfg, ("axis", "coordinate", "loading", "threshold", "exists", "residual", "note"), rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("model and output")
    g.add_argument("--config", help="key=value file; keys " + ", ".join(CONFIG_KEYS))
    g.add_argument("--m", type=float, help="Gompertz modal age (default 90)")
    g.add_argument("--b", type=float, help="Gompertz dispersion (default 10)")
    g.add_argument("--lambda", dest="lam", type=float, help="constant hazard; selects exponential mortality")
    g.add_argument("--rate", type=float, help="continuously compounded valuation rate (default 0.02)")
    g.add_argument("--loading", type=float, help="insurance loading pi (default 0)")
    g.add_argument("--format", choices=FORMATS)
    g.add_argument("--out", help="write here instead of stdout")
    g.add_argument("--no-timestamp", action="store_true", help="omit the generated-at line")
    g.add_argument("--quad-rtol", type=float, help="quadrature relative tolerance")
    g.add_argument("--bisect-tol", type=float, help="bisection residual tolerance")

    parser = _Parser(prog="refund-annuity", description="Price refundable income annuities.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("price", parents=[common], help="price one product")
    p.add_argument("--kind", required=True, type=product_kind, help="lo, ir or cr")
    p.add_argument("--age", required=True, type=float)
    p.set_defaults(run=cmd_price)

    p = sub.add_parser("table", parents=[common], help="price or frontier table over a grid")
    p.add_argument("table", choices=("loia", "cria", "iria", "frontier", "mwr"))
    p.add_argument("--ages", type=float_list, default=[55.0, 65.0, 75.0])
    p.add_argument("--rates", type=float_list)
    p.add_argument("--loadings", type=float_list)
    p.add_argument("--quotes", help="quote file for the mwr table (default: bundled sample)")
    p.set_defaults(run=cmd_table)

    p = sub.add_parser("sweep", parents=[common], help="one quantity along one axis")
    p.add_argument("--quantity", choices=QUANTITIES, default="price")
    p.add_argument("--kind", required=True, type=product_kind)
    p.add_argument("--axis", choices=("age", "rate", "loading"), default="age")
    p.add_argument("--age", type=float, default=65.0, help="fixed age when sweeping another axis")
    p.add_argument("--values", type=float_list, help="explicit comma-separated grid")
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--step", type=float)
    p.set_defaults(run=cmd_sweep)

    p = sub.add_parser("mwr", parents=[common], help="money's worth ratios of a quote file")
    p.add_argument("--quotes", help="CSV with label,age,sex,kind,premium,annual_income")
    p.add_argument("--no-implied-rate", action="store_true", help="skip solving for the fair rate")
    p.set_defaults(run=cmd_mwr)

    p = sub.add_parser("frontier", parents=[common], help="cash-refund viability frontier")
    p.add_argument("--axis", choices=("age", "rate"), default="age",
                   help="age: minimum rate per age; rate: maximum age per rate")
    p.add_argument("--values", type=float_list)
    p.set_defaults(run=cmd_frontier)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # usage errors and --help; return the code instead of exiting
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        cfg = build_config(args)
        return args.run(args, cfg)
    except NonViableError as exc:
        print(f"non-viable: {exc}", file=sys.stderr)
        return EXIT_NON_VIABLE
    except (DomainError, InputError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalFailure, DurationBlowUp) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
