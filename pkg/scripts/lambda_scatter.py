#!/usr/bin/env python3
"""Least zeros of every diagonal ternary cubic with coefficients in [-c, c].

Prints one CSV row per form (coefficients, height, status, lambda,
log lambda / log M) and a short summary on stderr.  Forms equal up to
overall sign and permutation of the variables are visited once.
"""
import argparse
import csv
import itertools
import sys

from cubiczero.forms import CubicForm
from cubiczero.search import lambda_upper_profile


def corpus(c: int):
    seen = set()
    coeffs = [v for v in range(-c, c + 1) if v]
    for combo in itertools.product(coeffs, repeat=3):
        key = min(tuple(sorted(combo)), tuple(sorted(-v for v in combo)))
        if key in seen:
            continue
        seen.add(key)
        yield CubicForm.diagonal(list(key))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--coef", type=int, default=6)
    ap.add_argument("--amax", type=int, default=30)
    args = ap.parse_args()

    rows = lambda_upper_profile(corpus(args.coef), args.amax)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["a1", "a2", "a3", "M", "status", "lambda", "log_ratio"])
    for row in rows:
        c = [row.form.monomials.get((i, i, i), 0) for i in range(3)]
        r = row.log_ratio
        w.writerow(c + [row.M, row.outcome.status, row.outcome.lam or "", f"{r:.4f}" if r is not None else ""])
    found = [r for r in rows if r.outcome.status == "found"]
    print(f"{len(rows)} forms, {len(found)} with a zero of norm <= {args.amax}, "
          f"largest lambda {max((r.outcome.lam for r in found), default=0)}", file=sys.stderr)


if __name__ == "__main__":
    main()
