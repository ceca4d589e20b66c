#!/usr/bin/env python3
"""Local densities rho(p^k) / p^{k(n-1)} and the truncated singular series of one form.

    python3 scripts/local_densities.py "x1^3 + 2*x2^3 - 3*x3^3" --R 30 --primes 2,3,5,7 --kmax 3
"""
import argparse

from cubiczero.expsums import local_count, singular_series
from cubiczero.forms import parse_form


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("form")
    ap.add_argument("--R", type=int, default=30)
    ap.add_argument("--primes", default="2,3,5,7")
    ap.add_argument("--kmax", type=int, default=3)
    args = ap.parse_args()

    C = parse_form(args.form)
    print(f"form: {C}  (n = {C.n})")
    for p in (int(v) for v in args.primes.split(",")):
        dens = []
        for k in range(1, args.kmax + 1):
            if p ** (k * C.n) > 10**7:
                break
            rho = local_count(C, p, k)
            dens.append(f"k={k}: {rho}/{p ** (k * (C.n - 1))} = {rho / p ** (k * (C.n - 1)):.6f}")
        print(f"p={p}: " + ", ".join(dens))
    rep = singular_series(C, args.R)
    print(f"S({args.R}) = {rep.partial_sum} ~ {float(rep.partial_sum):.6f}, positive = {rep.positive}")
    print("multiplicativity checks:", sum(ok for *_, ok in rep.multiplicativity), "/", len(rep.multiplicativity))


if __name__ == "__main__":
    main()
