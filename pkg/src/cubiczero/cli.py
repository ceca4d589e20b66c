"""Command-line entry point: ``python -m cubiczero <subcommand> ...``.

Exit status is 0 on success, 1 on a domain error (bad form file, budget
exceeded, invalid range), 2 on a usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from mpmath import mp, mpf

from . import expsums, exponents, forms, search
from .forms import BudgetExceeded, CubicForm, FormError

SUBCOMMANDS = (
    "parse", "height", "rank-census", "delta", "expsum", "series",
    "local", "exponents", "audit", "search", "count-box",
)


@dataclass(frozen=True)
class RunConfig:
    digits: int = 50
    budget: int = 10**7
    output: str = "json"
    seed: int = 0

    def __post_init__(self):
        if self.digits < 15:
            raise ValueError("--digits must be at least 15")
        if self.budget < 10**3:
            raise ValueError("--budget must be at least 1000")
        if self.output not in ("csv", "json"):
            raise ValueError("--output must be csv or json")


class UsageError(Exception):
    pass


# -- rendering ------------------------------------------------------------------

def fmt_rational(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def fmt_real(x, digits: int) -> str:
    with mp.workdps(digits):
        if isinstance(x, Fraction):
            x = mpf(x.numerator) / x.denominator
        return mp.nstr(+mpf(x), digits)


def render(records: dict | list[dict], cfg: RunConfig, columns: list[str] | None = None) -> str:
    """JSON keeps the shape (object or list); CSV always writes a header and rows."""
    if cfg.output == "json":
        return json.dumps(records, indent=2) + "\n"
    if isinstance(records, dict):
        records = [records]
    if not records:
        return ""
    columns = columns or list(records[0])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for rec in records:
        w.writerow([_csv_cell(rec.get(c, "")) for c in columns])
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    return v


def load_form(path: str | None, expr: str | None = None) -> CubicForm:
    if expr is not None:
        return forms.parse_form(expr)
    if path is None:
        raise UsageError("a form is required: --form FILE or --expr EXPRESSION")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormError(f"cannot read form file {path}: {exc.strerror}") from exc
    return forms.parse_form(text)


def parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise UsageError(f"--range expects a..b, got {text!r}") from None


def parse_overrides(items: list[str] | None) -> dict[int, str]:
    out = {}
    for item in items or []:
        try:
            n, v = item.split("=")
            mpf(v)
            out[int(n)] = v
        except ValueError:
            raise UsageError(f"--theta-override expects n=value, got {item!r}") from None
    return out


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except ValueError:
        raise UsageError(f"expected a rational number, got {text!r}") from None


# -- subcommands ------------------------------------------------------------------

def cmd_parse(args, cfg):
    C = load_form(args.form, args.expr)
    return {"n": C.n, "text": C.to_text(), "document": C.to_document()}


def cmd_height(args, cfg):
    C = load_form(args.form, args.expr)
    return {"height": forms.height(C), "tensor_height": fmt_rational(forms.tensor_height(C))}


def cmd_rank_census(args, cfg):
    C = load_form(args.form, args.expr)
    census = forms.rank_census(C, args.H, budget=cfg.budget)
    ratios = census.exponent_ratios
    return [
        {"H": census.H, "r": r, "count": c,
         "log_ratio": fmt_real(ratios[r], 17) if r in ratios else ""}
        for r, c in enumerate(census.counts)
    ]


def cmd_delta(args, cfg):
    C = load_form(args.form, args.expr)
    d = forms.delta_invariant(C)
    return {"delta": fmt_rational(d.value), "degenerate": d.degenerate, "scale": d.scale}


def cmd_expsum(args, cfg):
    C = load_form(args.form, args.expr)
    rec = expsums.complete_sum(C, args.a, args.q, digits=cfg.digits, budget=cfg.budget)
    return {
        "a": rec.a, "q": rec.q,
        "re": fmt_real(rec.value.real, cfg.digits),
        "im": fmt_real(rec.value.imag, cfg.digits),
        "abs": fmt_real(rec.abs, cfg.digits),
        "rho": rec.exact_counts.rho,
    }


def cmd_series(args, cfg):
    C = load_form(args.form, args.expr)
    rep = expsums.singular_series(C, args.R, budget=cfg.budget)
    rows = []
    for q, a, cum in rep.cumulative():
        rows.append({
            "q": q, "A_num": str(a.numerator), "A_den": str(a.denominator),
            "cumulative_num": str(cum.numerator), "cumulative_den": str(cum.denominator),
        })
    if cfg.output == "json":
        return {
            "R": rep.R, "partial_sum": fmt_rational(rep.partial_sum), "positive": rep.positive,
            "A": rows,
            "local_densities": [
                {"p": p, "k": k, "density": fmt_rational(v)}
                for (p, k), v in sorted(rep.local_densities.items())
            ],
            "multiplicativity": [
                {"q1": a, "q2": b, "holds": ok} for a, b, ok in rep.multiplicativity
            ],
        }
    return rows


def cmd_local(args, cfg):
    C = load_form(args.form, args.expr)
    lhs, rhs, ok = expsums.local_density_identity(C, args.p, args.k, budget=cfg.budget)
    return {
        "p": args.p, "k": args.k,
        "rho": expsums.local_count(C, args.p, args.k, budget=cfg.budget),
        "sum_A": fmt_rational(lhs), "density": fmt_rational(rhs), "identity_holds": ok,
    }


EXPONENT_COLUMNS = ["n", "eoP0", "delta0", "e_n", "binding_e", "theta_n", "binding_theta", "e2_n"]
AUDIT_COLUMNS = ["constant", "printed_value", "recomputed", "abs_diff"]


def _audit_rows(entries, digits):
    return [
        {"constant": a.constant, "printed_value": fmt_real(a.printed_value, digits),
         "recomputed": fmt_real(a.recomputed, digits), "abs_diff": fmt_real(a.abs_diff, digits)}
        for a in entries
    ]


def cmd_exponents(args, cfg):
    lo, hi = parse_range(args.range)
    overrides = parse_overrides(args.theta_override)
    rows, audit = exponents.table_report(lo, hi, overrides, digits=cfg.digits)
    d = cfg.digits
    table = [
        {"n": r.n, "eoP0": fmt_real(r.eoP0, d), "delta0": fmt_real(r.delta0, d),
         "e_n": fmt_real(r.e_n, d), "binding_e": r.binding_e,
         "theta_n": fmt_real(r.theta_n, d), "binding_theta": r.binding_theta, "e2_n": r.e2_n}
        for r in rows
    ]
    return table, _audit_rows(audit, d)


def cmd_audit(args, cfg):
    if args.form is None and args.expr is None:
        return _audit_rows(exponents.audit_constants(cfg.digits), cfg.digits)
    C = load_form(args.form, args.expr)
    q_list = parse_int_list(args.q)
    rep = expsums.bound_audit(C, q_list, samples=args.samples, seed=cfg.seed,
                              digits=cfg.digits, budget=cfg.budget)
    return [
        {"q": row.q, "sampled": len(row.sampled), "max_abs": fmt_real(row.max_abs, cfg.digits),
         "max_ratio": fmt_real(row.max_ratio, cfg.digits), "trivial_cap_ok": row.trivial_ok}
        for row in rep.rows
    ]


def _outcome_record(C, out, timing):
    rec = {
        "form": C.to_text(),
        "status": out.status,
        "lambda": out.lam,
        "witness": list(out.witness.x) if out.witness else None,
        "frontier": out.frontier,
        "points_examined": out.points_examined,
        "strategy": out.strategy,
    }
    if timing:
        rec["wall_time"] = round(out.wall_time, 6)
    return rec


def cmd_search(args, cfg):
    if args.corpus:
        try:
            lines = Path(args.corpus).read_text().splitlines()
        except OSError as exc:
            raise FormError(f"cannot read corpus {args.corpus}: {exc.strerror}") from exc
        recs = []
        for line in lines:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            C = forms.parse_form(line)
            try:
                out = search.find_least_zero(C, args.amax, args.strategy, cfg.budget)
            except BudgetExceeded:
                out = search.SearchOutcome("budget", None, None, 0)
            rec = _outcome_record(C, out, args.timing)
            rec["M"] = forms.height(C)
            recs.append(rec)
        return recs
    C = load_form(args.form, args.expr)
    out = search.find_least_zero(C, args.amax, args.strategy, cfg.budget)
    return _outcome_record(C, out, args.timing)


def cmd_count_box(args, cfg):
    C = load_form(args.form, args.expr)
    if args.center:
        z = [parse_rational(v) for v in args.center.split(",")]
    else:
        z = [Fraction(0)] * C.n
    box = expsums.BoxSpec(tuple(z), parse_rational(args.rho), parse_rational(args.P))
    rec = {"lattice_points": box.lattice_count(),
           "zeros": expsums.zero_count_in_box(C, box, cfg.budget)}
    if args.alpha is not None:
        val = expsums.generating_sum(C, box, parse_rational(args.alpha), cfg.digits, cfg.budget)
        rec["S_re"] = fmt_real(val.real, cfg.digits)
        rec["S_im"] = fmt_real(val.imag, cfg.digits)
    return rec


# -- argument parsing ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--digits", type=int, default=50)
    common.add_argument("--budget", type=int, default=10**7)
    common.add_argument("--output", choices=("csv", "json"), default=None)
    common.add_argument("--seed", type=int, default=0)

    form_args = argparse.ArgumentParser(add_help=False)
    form_args.add_argument("--form", metavar="FILE")
    form_args.add_argument("--expr", metavar="EXPRESSION")

    parser = _Parser(prog="cubiczero", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(SUBCOMMANDS) + "}",
                                parser_class=_Parser)

    def add(name, func, *parents, default_output="json"):
        p = sub.add_parser(name, parents=[common, *parents])
        p.set_defaults(func=func, default_output=default_output)
        return p

    add("parse", cmd_parse, form_args)
    add("height", cmd_height, form_args)
    p = add("rank-census", cmd_rank_census, form_args, default_output="csv")
    p.add_argument("--H", type=int, required=True)
    add("delta", cmd_delta, form_args)
    p = add("expsum", cmd_expsum, form_args)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p = add("series", cmd_series, form_args, default_output="csv")
    p.add_argument("--R", type=int, required=True)
    p = add("local", cmd_local, form_args)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p = add("exponents", cmd_exponents, default_output="csv")
    p.add_argument("--range", default="14..18")
    p.add_argument("--theta-override", action="append", metavar="N=VALUE")
    p = add("audit", cmd_audit, form_args, default_output="csv")
    p.add_argument("--q", default="1,3,9,27")
    p.add_argument("--samples", type=int, default=16)
    p = add("search", cmd_search, form_args)
    p.add_argument("--amax", type=int, required=True)
    p.add_argument("--strategy", choices=("auto", "brute", "mitm"), default="auto")
    p.add_argument("--corpus", metavar="FILE")
    p.add_argument("--timing", action="store_true", help="include wall_time (not reproducible)")
    p = add("count-box", cmd_count_box, form_args)
    p.add_argument("--center", help="comma-separated rationals; default origin")
    p.add_argument("--rho", required=True)
    p.add_argument("--P", default="1")
    p.add_argument("--alpha")
    return parser


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError(parser.format_usage().strip())
        cfg = RunConfig(args.digits, args.budget, args.output or args.default_output, args.seed)
    except UsageError as exc:
        print(exc, file=stderr)
        return 2
    except ValueError as exc:
        print(f"cubiczero: {exc}", file=stderr)
        return 2
    try:
        result = args.func(args, cfg)
    except UsageError as exc:
        print(exc, file=stderr)
        return 2
    except (FormError, BudgetExceeded, exponents.ExponentError, search.StrategyError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    if args.command == "exponents":
        table, audit = result
        if cfg.output == "json":
            stdout.write(json.dumps({"table": table, "audit": audit}, indent=2) + "\n")
        else:
            stdout.write(render(table, cfg, EXPONENT_COLUMNS))
            stdout.write("\n")
            stdout.write(render(audit, cfg, AUDIT_COLUMNS))
    else:
        stdout.write(render(result, cfg))
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
