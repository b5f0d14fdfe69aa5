"""Batch command line harness.

Every command writes CSV (or JSON mirroring the CSV rows) to ``--out`` or
stdout. Options may also come from a ``key = value`` config file given with
``--config``; command-line flags win. Exit status is 1 when any checked
inequality fails or an integrity error occurs, 2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from jnseq import concentration, construction, optimizer, transfer
from jnseq.errors import DomainError, IntegrityError, ResourceLimitError, SpecError
from jnseq.numerics import DEFAULT_PRECISION, parse_rational, to_decimal
from jnseq.reports import BOUND_REPORT_COLUMNS

log = logging.getLogger("jnseq")

DEFAULT_EPS = "1/12,1/16,1/24,1/48"
DEFAULTS = {
    "mu-table": {"n_range": "1..64", "method": "closed-form"},
    "check-bollobas": {"eps": DEFAULT_EPS},
    "rectangle-eval": {"n_range": "1..8", "eps": "1/12", "samples": "0"},
    "transfer-demo": {"n_range": "1..10", "model_k": "omega_plus_one", "model_l": "omega_plus_one",
                      "function": "product_xy"},
}
COMMON = {"seed": "0", "format": "csv", "precision": str(DEFAULT_PRECISION)}
RECTANGLE_COLUMNS = BOUND_REPORT_COLUMNS + ["spec", "status"]
GRID_COLUMNS = concentration.GRID_COLUMNS + ["status"]


class UsageError(Exception):
    pass


def parse_n_range(text: str) -> list[int]:
    """``a..b`` (inclusive, empty when b < a), or a comma list of integers."""
    text = text.strip()
    if ".." in text:
        lo, _, hi = text.partition("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",") if x.strip()]


def parse_eps_list(text: str) -> list[Fraction]:
    return [parse_rational(x) for x in text.split(",") if x.strip()]


def read_config(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment. Keys use the flag names."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise SpecError(f"expected 'key = value', got {raw!r}", lineno)
        out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def read_specs(path: str) -> list[tuple[int, construction.RectangleSpec]]:
    """One JSON rectangle spec per line; blank lines and ``#`` lines are skipped."""
    specs = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON ({exc.msg}, column {exc.colno})", lineno) from exc
        specs.append((lineno, construction.RectangleSpec.from_json(obj, lineno)))
    return specs


def write_rows(rows: list[dict], columns: list[str], fmt: str, out) -> None:
    if fmt == "json":
        json.dump(rows, out, indent=1)
        out.write("\n")
        return
    writer = csv.DictWriter(out, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


# -- commands ----------------------------------------------------------------------
# Each returns (rows, columns, failed).

def cmd_mu_table(opts) -> tuple[list[dict], list[str], bool]:
    rows = optimizer.decay_table(parse_n_range(opts["n_range"]), opts["method"])
    return [r.row(opts["precision"]) for r in rows], optimizer.DECAY_COLUMNS, False


def cmd_check_bollobas(opts):
    eps_list = parse_eps_list(opts["eps"])
    if opts.get("n_range"):
        ms = parse_n_range(opts["n_range"])
        points = [(m, e) for e in sorted(set(eps_list), reverse=True) for m in ms]
    else:
        points = concentration.bollobas_grid(eps_list)
    rows, failed = [], False
    for m, eps in points:
        base = {"m": m, "eps_num": eps.numerator, "eps_den": eps.denominator}
        try:
            report = concentration.check_bollobas(m, eps)
        except DomainError as exc:
            rows.append({**base, "tail_num": "", "tail_den": "", "tail_decimal": "", "holds": "",
                         "status": f"DomainError: {exc}"})
            continue
        failed |= not report.holds
        rows.append({**base, "tail_num": report.lhs.numerator, "tail_den": report.lhs.denominator,
                     "tail_decimal": to_decimal(report.lhs, opts["precision"]),
                     "holds": str(report.holds).lower(), "status": "ok"})
    return rows, GRID_COLUMNS, failed


def cmd_rectangle_eval(opts):
    eps_list = parse_eps_list(opts["eps"])
    for eps in eps_list:
        concentration.check_eps(eps)
    specs = [spec for _, spec in read_specs(opts["spec"])] if opts.get("spec") else []
    specs += construction.random_specs(int(opts["samples"]), int(opts["seed"]))
    if not specs:
        raise UsageError("rectangle-eval needs --spec and/or --samples > 0")
    rows, failed = [], False
    for n in parse_n_range(opts["n_range"]):
        for spec in specs:
            label = spec.label()
            try:
                rect = construction.resolve(spec, n)
                value = construction.rectangle_value(rect)
                reports = construction.rectangle_reports(rect, eps_list)
            except (ResourceLimitError, DomainError) as exc:
                rows.append({"n": n, "lhs_num": "", "lhs_den": "", "lhs_decimal": "", "bound_kind": "",
                             "bound_params": "", "holds": "", "spec": label,
                             "status": f"{type(exc).__name__}: {exc}"})
                continue
            rows.append({"n": n, "lhs_num": value.numerator, "lhs_den": value.denominator,
                         "lhs_decimal": to_decimal(value, opts["precision"]), "bound_kind": "value",
                         "bound_params": f"sizeA={rect.size_a()};sizeB={rect.m}", "holds": "",
                         "spec": label, "status": "ok"})
            for rep in reports:
                failed |= not rep.holds
                rows.append({**rep.row(opts["precision"]), "spec": label, "status": "ok"})
    return rows, RECTANGLE_COLUMNS, failed


def cmd_transfer_demo(opts):
    model_k, model_l = transfer.get_model(opts["model_k"]), transfer.get_model(opts["model_l"])
    f = transfer.get_function(opts["function"])
    rows = []
    for n in parse_n_range(opts["n_range"]):
        rho = transfer.pushforward_mu(n, model_k, model_l)
        value = sum((w * f(*p) for p, w in rho.items()), Fraction(0))
        rows.append({"n": n, "f_name": opts["function"], "model_K": model_k.name, "model_L": model_l.name,
                     "value_decimal": to_decimal(value, opts["precision"]),
                     "value_num": value.numerator, "value_den": value.denominator})
    return rows, transfer.DEMO_COLUMNS, False


COMMANDS = {
    "mu-table": cmd_mu_table,
    "check-bollobas": cmd_check_bollobas,
    "rectangle-eval": cmd_rectangle_eval,
    "transfer-demo": cmd_transfer_demo,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jnseq", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "mu-table": "decay table of the worst rectangle value W(n)",
        "check-bollobas": "exact grid check of the Bernoulli tail bound",
        "rectangle-eval": "evaluate rectangles and check every per-rectangle bound",
        "transfer-demo": "integrals of a test function against the pushed-forward measures",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="key = value file; flags override it")
        p.add_argument("--n-range", dest="n_range", help="a..b or a comma list")
        p.add_argument("--eps", help="comma list of p/q rationals")
        p.add_argument("--spec", help="rectangle spec file, one JSON object per line")
        p.add_argument("--samples", help="random rectangles added per level")
        p.add_argument("--seed", help="64-bit seed for random rectangles")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--precision", help="significant digits of decimal columns")
        if name == "mu-table":
            p.add_argument("--method", choices=optimizer.METHODS)
        if name == "transfer-demo":
            p.add_argument("--model-k", dest="model_k", choices=sorted(transfer.MODELS))
            p.add_argument("--model-l", dest="model_l", choices=sorted(transfer.MODELS))
            p.add_argument("--function", choices=sorted(transfer.TEST_FUNCTIONS))
    return parser


def resolve_options(args: argparse.Namespace) -> dict:
    opts = {**COMMON, **DEFAULTS[args.command]}
    if args.config:
        opts.update(read_config(args.config))
    for key, value in vars(args).items():
        if value is not None and key not in ("command", "config", "verbose"):
            opts[key] = value
    opts["precision"] = int(opts["precision"])
    if opts["format"] not in ("csv", "json"):
        raise UsageError(f"unknown format {opts['format']!r}")
    return opts


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        opts = resolve_options(args)
        rows, columns, failed = COMMANDS[args.command](opts)
    except IntegrityError as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return 1
    except (UsageError, SpecError, DomainError, ResourceLimitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    buf = io.StringIO()
    write_rows(rows, columns, opts["format"], buf)
    if opts.get("out"):
        Path(opts["out"]).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    if failed:
        log.error("at least one checked inequality failed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
