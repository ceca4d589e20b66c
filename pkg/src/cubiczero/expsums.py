"""Complete exponential sums, singular series and local densities.

Everything that the circle-method identities need exactly (A(q), the
truncated singular series, rho(p^k)) is computed from the value
distribution of C modulo q with Ramanujan sums, so no floating point is
involved.  Complex values of S(a, q) and S(alpha) are rendered with mpmath
at a chosen precision.
"""
from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from mpmath import mp, mpf, mpc
from sympy import factorint, isprime

from .forms import BudgetExceeded, CubicForm, height

DEFAULT_BUDGET = 10**7
DEFAULT_DIGITS = 50


# -- elementary number theory -------------------------------------------------

@lru_cache(maxsize=None)
def _factor(q: int) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(factorint(q).items()))


def mobius(q: int) -> int:
    f = _factor(q)
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def divisors(q: int) -> list[int]:
    divs = [1]
    for p, e in _factor(q):
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def euler_phi(q: int) -> int:
    out = q
    for p, _ in _factor(q):
        out -= out // p
    return out


def ramanujan_sum(q: int, m: int) -> int:
    """``c_q(m) = sum_{d | gcd(q, m)} d * mu(q / d)``."""
    g = math.gcd(q, m)
    return sum(d * mobius(q // d) for d in divisors(g))


def prime_power_split(q: int) -> tuple[int, int] | None:
    f = _factor(q)
    if len(f) != 1:
        return None
    return f[0]


# -- value distributions -------------------------------------------------------

@dataclass(frozen=True)
class ValueDistribution:
    q: int
    n: int
    counts: tuple[int, ...]
    method: str = "brute"

    @property
    def rho(self) -> int:
        return self.counts[0]

    @property
    def total(self) -> int:
        return sum(self.counts)


def _coeffs_mod(C: CubicForm, q: int):
    return [((i, j, k), c % q) for (i, j, k), c in C.monomials.items() if c % q]


def _brute_counts(C: CubicForm, q: int) -> np.ndarray:
    n = C.n
    terms = _coeffs_mod(C, q)
    counts = np.zeros(q, dtype=np.int64)
    if n == 1:
        x = np.arange(q, dtype=np.int64)
        vals = np.zeros(q, dtype=np.int64)
        for _, c in terms:
            vals = (vals + c * (x * x % q * x % q)) % q
        return np.bincount(vals, minlength=q).astype(np.int64)
    # Fix the first coordinate, vectorise over the remaining n - 1.
    grids = np.meshgrid(*([np.arange(q, dtype=np.int64)] * (n - 1)), indexing="ij")
    rest = [g.ravel() for g in grids]
    for x0 in range(q):
        coords = [np.full_like(rest[0], x0)] + rest
        vals = np.zeros_like(rest[0])
        for (i, j, k), c in terms:
            mono = coords[i] * coords[j] % q * coords[k] % q
            vals = (vals + c * mono) % q
        counts += np.bincount(vals, minlength=q)
    return counts


def _diagonal_counts(C: CubicForm, q: int) -> list[int]:
    x = np.arange(q, dtype=np.int64)
    cubes = x * x % q * x % q
    total = np.zeros(q, dtype=np.int64)
    total[0] = 1
    for i in range(C.n):
        c = C.monomials.get((i, i, i), 0) % q
        single = np.bincount(c * cubes % q, minlength=q)
        # cyclic convolution: linear convolution folded mod q
        lin = np.convolve(total, single)
        folded = lin[:q].copy()
        folded[: len(lin) - q] += lin[q:]
        total = folded
    return [int(v) for v in total]


def _projective_counts(C: CubicForm, p: int) -> list[int]:
    """Distribution mod a prime p using C(lam r) = lam^3 C(r).

    Each nonzero vector is a unit multiple of exactly one normalised
    representative (first nonzero coordinate 1), and lam -> lam^3 hits every
    element of a coset of the cubes exactly g = gcd(3, p - 1) times.
    """
    n = C.n
    zero_reps = 0
    by_class: Counter[int] = Counter()
    g = math.gcd(3, p - 1)
    e = (p - 1) // g

    def cls(v: int) -> int:
        return pow(v, e, p) if g > 1 else 1

    terms = _coeffs_mod(C, p)
    for lead in range(n):
        tail = n - lead - 1
        if tail == 0:
            vals = [C.monomials.get((lead, lead, lead), 0) % p]
        else:
            grids = np.meshgrid(*([np.arange(p, dtype=np.int64)] * tail), indexing="ij")
            rest = [gr.ravel() for gr in grids]
            size = rest[0].size
            coords = [None] * n
            for idx in range(lead):
                coords[idx] = np.zeros(size, dtype=np.int64)
            coords[lead] = np.ones(size, dtype=np.int64)
            for t in range(tail):
                coords[lead + 1 + t] = rest[t]
            acc = np.zeros(size, dtype=np.int64)
            for (i, j, k), c in terms:
                acc = (acc + c * (coords[i] * coords[j] % p * coords[k] % p)) % p
            vals = acc.tolist()
        hist = Counter(vals)
        zero_reps += hist.pop(0, 0)
        for v, cnt in hist.items():
            by_class[cls(v)] += cnt
    counts = [0] * p
    counts[0] = 1 + (p - 1) * zero_reps
    for m in range(1, p):
        counts[m] = g * by_class.get(cls(m), 0)
    return counts


def value_distribution(
    C: CubicForm, q: int, budget: int = DEFAULT_BUDGET, method: str = "auto"
) -> ValueDistribution:
    """``counts[m] = #{r mod q : C(r) = m mod q}``.

    ``method`` is one of ``auto``, ``brute``, ``diagonal`` (convolution of
    one-variable distributions) or ``projective`` (prime q only).
    """
    if q < 1:
        raise ValueError("modulus must be positive")
    n = C.n
    if q == 1:
        return ValueDistribution(1, n, (q**n,), "trivial")
    if method == "auto":
        if isprime(q):
            method = "projective"
        elif C.is_diagonal and n > 1:
            method = "diagonal"
        else:
            method = "brute"
    if method == "diagonal":
        if not C.is_diagonal:
            raise ValueError("diagonal method needs a diagonal form")
        need = n * q * q
        if q**n >= 2**62:
            raise BudgetExceeded(q**n, 2**62, "diagonal counts overflow")
        if need > budget:
            raise BudgetExceeded(need, budget, f"diagonal distribution mod {q}")
        counts = _diagonal_counts(C, q)
    elif method == "projective":
        if not isprime(q):
            raise ValueError("projective method needs a prime modulus")
        need = (q**n - 1) // (q - 1)
        if need > budget:
            raise BudgetExceeded(need, budget, f"projective distribution mod {q}")
        counts = _projective_counts(C, q)
    elif method == "brute":
        need = q**n
        if need > budget:
            raise BudgetExceeded(need, budget, f"residues mod {q}")
        counts = [int(v) for v in _brute_counts(C, q)]
    else:
        raise ValueError(f"unknown method {method!r}")
    return ValueDistribution(q, n, tuple(int(v) for v in counts), method)


# -- complete sums -------------------------------------------------------------

@dataclass(frozen=True)
class ExpSumRecord:
    a: int
    q: int
    exact_counts: ValueDistribution
    value: mpc
    digits: int

    @property
    def abs(self) -> mpf:
        with mp.workdps(self.digits):
            return abs(self.value)


def _exp_sum(counts: Sequence[int], a: int, q: int, digits: int) -> mpc:
    with mp.workdps(digits + 10):
        total = mpc(0)
        # fixed reduction order: ascending residue
        for m, c in enumerate(counts):
            if c:
                total += c * mp.expjpi(mpf(2 * a * m) / q)
    with mp.workdps(digits):
        return +total


def complete_sum(
    C: CubicForm, a: int, q: int, digits: int = DEFAULT_DIGITS, budget: int = DEFAULT_BUDGET,
    dist: ValueDistribution | None = None,
) -> ExpSumRecord:
    """``S(a, q) = sum_{r mod q} e_q(a C(r))`` for coprime ``a, q``."""
    if q < 1:
        raise ValueError("modulus must be positive")
    if math.gcd(a, q) != 1:
        raise ValueError(
            f"a={a} and q={q} are not coprime; use raw_sum_over_a for sums over all a"
        )
    if dist is None:
        dist = value_distribution(C, q, budget)
    value = _exp_sum(dist.counts, a % q, q, digits)
    return ExpSumRecord(a, q, dist, value, digits)


def raw_sum_over_a(C: CubicForm, q: int, budget: int = DEFAULT_BUDGET) -> int:
    """``sum_{a mod q} S(a, q) = q * rho(q)``, exactly."""
    return q * value_distribution(C, q, budget).counts[0]


def _A_from_counts(counts: Sequence[int], q: int, n: int) -> Fraction:
    by_gcd: Counter[int] = Counter()
    for m, c in enumerate(counts):
        if c:
            by_gcd[math.gcd(m, q)] += c
    total = sum(c * ramanujan_sum(q, d) for d, c in by_gcd.items())
    return Fraction(total, q**n)


def A_of_q(C: CubicForm, q: int, budget: int = DEFAULT_BUDGET) -> Fraction:
    """``A(q) = q^{-n} sum_{(a,q)=1} S(a, q)`` as an exact rational."""
    return _A_from_counts(value_distribution(C, q, budget).counts, q, C.n)


def local_count(C: CubicForm, p: int, k: int, budget: int = DEFAULT_BUDGET) -> int:
    """``rho(p^k)``: number of residues mod p^k with C = 0."""
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if k < 0:
        raise ValueError("k must be nonnegative")
    return value_distribution(C, p**k, budget).counts[0]


def local_density_identity(
    C: CubicForm, p: int, k: int, budget: int = DEFAULT_BUDGET
) -> tuple[Fraction, Fraction, bool]:
    """Both sides of ``sum_{i<=k} A(p^i) = rho(p^k) / p^{k(n-1)}``."""
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    lhs = sum((A_of_q(C, p**i, budget) for i in range(k + 1)), Fraction(0))
    rhs = Fraction(local_count(C, p, k, budget), p ** (k * (C.n - 1)))
    return lhs, rhs, lhs == rhs


# -- singular series -------------------------------------------------------------

@dataclass(frozen=True)
class SeriesReport:
    R: int
    n: int
    A_values: dict[int, Fraction]
    partial_sum: Fraction
    local_densities: dict[tuple[int, int], Fraction]
    multiplicativity: list[tuple[int, int, bool]] = field(default_factory=list)

    @property
    def positive(self) -> bool:
        return self.partial_sum > 0

    def cumulative(self) -> list[tuple[int, Fraction, Fraction]]:
        out, run = [], Fraction(0)
        for q in sorted(self.A_values):
            run += self.A_values[q]
            out.append((q, self.A_values[q], run))
        return out


def singular_series(C: CubicForm, R: int, budget: int = DEFAULT_BUDGET) -> SeriesReport:
    """Truncated singular series ``sum_{q <= R} A(q)`` with per-q detail."""
    if R < 1:
        raise ValueError("R must be at least 1")
    A_values: dict[int, Fraction] = {}
    for q in range(1, R + 1):
        try:
            A_values[q] = A_of_q(C, q, budget)
        except BudgetExceeded as exc:
            raise BudgetExceeded(exc.required, budget, f"series stops at R={q - 1}") from exc
    dens = {}
    for q in range(2, R + 1):
        pk = prime_power_split(q)
        if pk:
            p, k = pk
            dens[(p, k)] = sum((A_values[p**i] for i in range(k + 1)), Fraction(0))
    checks = []
    for q1 in range(2, R + 1):
        for q2 in range(q1 + 1, R // q1 + 1):
            if math.gcd(q1, q2) == 1:
                checks.append((q1, q2, A_values[q1 * q2] == A_values[q1] * A_values[q2]))
    return SeriesReport(R, C.n, A_values, sum(A_values.values(), Fraction(0)), dens, checks)


def default_k_of_p(M: int) -> Callable[[int], int]:
    """Placeholder cutoff: least k with p^k > p * M^2 (not a published choice)."""

    def k_of_p(p: int) -> int:
        k, target = 1, p * M * M
        while p**k <= target:
            k += 1
        return k

    return k_of_p


def truncated_euler_product(
    C: CubicForm,
    P0: int,
    k_of_p: Callable[[int], int] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> Fraction:
    """``prod_{p <= P0} sum_{i <= k(p)} A(p^i)``; each factor is rho(p^k)/p^{k(n-1)}."""
    if k_of_p is None:
        k_of_p = default_k_of_p(height(C))
    out = Fraction(1)
    for p in range(2, P0 + 1):
        if isprime(p):
            k = k_of_p(p)
            out *= Fraction(local_count(C, p, k, budget), p ** (k * (C.n - 1)))
    return out


# -- the generating function over a box ---------------------------------------------

@dataclass(frozen=True)
class BoxSpec:
    z: tuple[Fraction, ...]
    rho: Fraction
    P: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(Fraction(v) for v in self.z))
        object.__setattr__(self, "rho", Fraction(self.rho))
        object.__setattr__(self, "P", Fraction(self.P))
        if self.rho <= 0:
            raise ValueError("box radius must be positive")
        if self.P < 1:
            raise ValueError("scale P must be at least 1")

    @classmethod
    def centered(cls, n: int, radius) -> "BoxSpec":
        return cls(tuple([0] * n), Fraction(radius), Fraction(1))

    def ranges(self) -> list[range]:
        out = []
        for zi in self.z:
            lo = math.ceil(self.P * (zi - self.rho))
            hi = math.floor(self.P * (zi + self.rho))
            out.append(range(lo, hi + 1))
        return out

    def lattice_count(self) -> int:
        return math.prod(len(r) for r in self.ranges())


def value_histogram(C: CubicForm, box: BoxSpec, budget: int = DEFAULT_BUDGET) -> Counter:
    """Exact histogram ``v -> #{x in Z^n cap P*B : C(x) = v}``."""
    if len(box.z) != C.n:
        raise ValueError("box dimension does not match the form")
    npts = box.lattice_count()
    if npts > budget:
        raise BudgetExceeded(npts, budget, "lattice points in box")
    hist: Counter = Counter()
    if npts == 0:
        return hist
    ranges = box.ranges()
    bound = max(max(abs(r.start), abs(r.stop - 1)) for r in ranges)
    if sum(abs(c) for c in C.monomials.values()) * bound**3 < 2**62:
        axes = [np.arange(r.start, r.stop, dtype=np.int64) for r in ranges]
        grids = [g.ravel() for g in np.meshgrid(*axes, indexing="ij")]
        vals = np.zeros(npts, dtype=np.int64)
        for (i, j, k), c in C.monomials.items():
            vals += c * grids[i] * grids[j] * grids[k]
        uniq, cnt = np.unique(vals, return_counts=True)
        hist.update(dict(zip(uniq.tolist(), cnt.tolist())))
    else:
        for x in itertools.product(*ranges):
            hist[C(x)] += 1
    return hist


def generating_sum(
    C: CubicForm, box: BoxSpec, alpha, digits: int = DEFAULT_DIGITS, budget: int = DEFAULT_BUDGET
) -> mpc:
    """``S(alpha) = sum_{x in Z^n cap P*B} e(alpha C(x))`` via the value histogram."""
    hist = value_histogram(C, box, budget)
    with mp.workdps(digits + 10):
        a = _to_mpf(alpha)
        total = mpc(0)
        for v in sorted(hist):
            total += hist[v] * mp.expjpi(2 * a * v)
    with mp.workdps(digits):
        return +total


def generating_sum_naive(
    C: CubicForm, box: BoxSpec, alpha, digits: int = DEFAULT_DIGITS
) -> mpc:
    """Point-by-point evaluation of S(alpha); reference path for small boxes."""
    with mp.workdps(digits + 10):
        a = _to_mpf(alpha)
        total = mpc(0)
        for x in itertools.product(*box.ranges()):
            total += mp.expjpi(2 * a * C(x))
    with mp.workdps(digits):
        return +total


def _to_mpf(alpha):
    if isinstance(alpha, Fraction):
        return mpf(alpha.numerator) / alpha.denominator
    if isinstance(alpha, str) and "/" in alpha:
        num, den = alpha.split("/")
        return mpf(int(num)) / int(den)
    return mpf(alpha)


def zero_count_in_box(C: CubicForm, box: BoxSpec, budget: int = DEFAULT_BUDGET) -> int:
    """``N(P) = #{x in Z^n cap P*B : C(x) = 0}``."""
    return value_histogram(C, box, budget).get(0, 0)


# -- audit of the complete-sum bound ---------------------------------------------------

@dataclass(frozen=True)
class BoundAuditRow:
    q: int
    sampled: tuple[int, ...]
    max_abs: mpf
    max_ratio: mpf
    trivial_ok: bool


@dataclass(frozen=True)
class BoundAudit:
    n: int
    M: int
    rows: list[BoundAuditRow]

    @property
    def growth(self) -> mpf:
        """Ratio of the last row's max ratio to the first one's."""
        if not self.rows or self.rows[0].max_ratio == 0:
            return mpf(0)
        return self.rows[-1].max_ratio / self.rows[0].max_ratio


def bound_audit(
    C: CubicForm,
    q_list: Iterable[int],
    samples: int = 16,
    seed: int = 0,
    digits: int = DEFAULT_DIGITS,
    budget: int = DEFAULT_BUDGET,
) -> BoundAudit:
    """Compare ``|S(a, q)|`` with ``M^{n/6} q^{5n/6}`` on a sample of units a."""
    rng = random.Random(seed)
    M = height(C)
    n = C.n
    rows = []
    for q in q_list:
        units = [a for a in range(1, q + 1) if math.gcd(a, q) == 1] if q > 1 else [0]
        if len(units) > samples:
            units = sorted(rng.sample(units, samples))
        dist = value_distribution(C, q, budget)
        with mp.workdps(digits):
            scale = mpf(M) ** (mpf(n) / 6) * mpf(q) ** (mpf(5 * n) / 6)
            best_abs = mpf(0)
            ok = True
            for a in units:
                s = abs(_exp_sum(dist.counts, a, q, digits))
                ok = ok and s <= mpf(q) ** n * (1 + mpf(10) ** (-digits + 5))
                best_abs = max(best_abs, s)
            rows.append(BoundAuditRow(q, tuple(units), best_abs, best_abs / scale, ok))
    return BoundAudit(n, M, rows)
