#!/usr/bin/env python3
"""Regenerate the e2(n) and per-n exponent tables, then the constant audit.

    python3 scripts/reproduce_tables.py --digits 30
    python3 scripts/reproduce_tables.py --printed-theta
"""
import argparse

from mpmath import mp

from cubiczero.exponents import TABLE1_E2, TABLE2_THETA, table_report


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--digits", type=int, default=30)
    ap.add_argument("--printed-theta", action="store_true",
                    help="compute e2 from the tabulated theta row instead of the recomputed one")
    args = ap.parse_args()

    overrides = dict(TABLE2_THETA) if args.printed_theta else None
    rows, audit = table_report(14, 18, overrides, digits=args.digits)
    d = 12
    print(f"{'n':>3} {'eoP0':>14} {'delta0':>10} {'e(n)':>14} {'theta(n)':>14} {'binding':>12} {'e2':>7} {'table':>7}")
    for r in rows:
        print(
            f"{r.n:>3} {mp.nstr(r.eoP0, d):>14} {mp.nstr(r.delta0, 6):>10} {mp.nstr(r.e_n, d):>14} "
            f"{mp.nstr(r.theta_n, d):>14} {r.binding_theta:>12} {r.e2_n:>7} {TABLE1_E2[r.n]:>7}"
        )
    print()
    print(f"{'constant':<32} {'printed':>12} {'recomputed':>16} {'|diff|':>12}")
    for a in audit:
        print(f"{a.constant:<32} {mp.nstr(a.printed_value, 10):>12} {mp.nstr(a.recomputed, 12):>16} {mp.nstr(a.abs_diff, 5):>12}")


if __name__ == "__main__":
    main()
