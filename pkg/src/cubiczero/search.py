"""Least nonzero integer zero of a cubic form, by exact enumeration.

Radii are searched in unit steps, so a reported Lambda is exact and not
merely an upper bound.  Among the zeros of minimal sup-norm the witness is
the lexicographically greatest one; of each pair +-x that is the member
with positive leading entry.
"""
from __future__ import annotations

import math
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .forms import CubicForm, FormError, height

DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class ZeroWitness:
    x: tuple[int, ...]
    norm: int
    verified: bool

    @classmethod
    def make(cls, C: CubicForm, x: Sequence[int]) -> "ZeroWitness":
        x = tuple(int(v) for v in x)
        return cls(x, max(abs(v) for v in x), any(x) and C(x) == 0)


@dataclass(frozen=True)
class SearchOutcome:
    status: str  # found | exhausted | budget
    lam: int | None
    witness: ZeroWitness | None
    frontier: int
    points_examined: int = 0
    strategy: str = "brute"
    wall_time: float = 0.0


class StrategyError(ValueError):
    pass


def canonical_sign(x: Sequence[int]) -> tuple[int, ...]:
    """Flip ``x`` so that its first nonzero entry is positive (C(-x) = -C(x))."""
    x = tuple(int(v) for v in x)
    lead = next((v for v in x if v), 0)
    return x if lead >= 0 else tuple(-v for v in x)


def _fits_int64(C: CubicForm, A: int) -> bool:
    return sum(abs(c) for c in C.monomials.values()) * A**3 < 2**62


def _evaluate(C: CubicForm, cols: list[np.ndarray]) -> np.ndarray:
    vals = np.zeros(cols[0].shape, dtype=cols[0].dtype)
    for (i, j, k), c in C.monomials.items():
        vals = vals + c * cols[i] * cols[j] * cols[k]
    return vals


def _shell_blocks(n: int, A: int) -> Iterator[list[np.ndarray]]:
    """Cover ``{|x| = A}`` once, keeping only points with positive leading entry.

    Block ``i``: coordinates before ``i`` are zero or lie strictly inside,
    ``x_i = +A`` or ``-A``.  Restricting to a positive leading nonzero entry
    halves the work and is harmless since zeros come in pairs +-x.
    """
    inner = np.arange(-(A - 1), A)
    full = np.arange(-A, A + 1)
    for i in range(n):
        for s in (A, -A):
            axes = [inner] * i + [np.array([s])] + [full] * (n - 1 - i)
            grids = [g.ravel() for g in np.meshgrid(*axes, indexing="ij")]
            if i == 0:
                if s < 0:
                    continue
                yield grids
                continue
            # keep points whose first nonzero coordinate (among 0..i) is positive
            prefix = np.stack(grids[:i] + [grids[i]], axis=1)
            nz = prefix != 0
            first = nz.argmax(axis=1)
            lead = prefix[np.arange(prefix.shape[0]), first]
            keep = lead > 0
            yield [g[keep] for g in grids]


def _shell_zeros(C: CubicForm, A: int) -> tuple[list[tuple[int, ...]], int]:
    zeros: list[tuple[int, ...]] = []
    examined = 0
    exact = not _fits_int64(C, A)
    for grids in _shell_blocks(C.n, A):
        if exact:
            grids = [g.astype(object) for g in grids]
        vals = _evaluate(C, grids)
        examined += len(vals)
        hit = np.nonzero(vals == 0)[0]
        for idx in hit:
            zeros.append(tuple(int(g[idx]) for g in grids))
    return zeros, examined


def _shell_size(n: int, A: int) -> int:
    return (2 * A + 1) ** n - (2 * A - 1) ** n


def brute_force(C: CubicForm, A_max: int, budget: int = DEFAULT_BUDGET) -> SearchOutcome:
    t0 = time.perf_counter()
    examined = 0
    for A in range(1, A_max + 1):
        # half of every shell is skipped by sign symmetry
        cost = (_shell_size(C.n, A) + 1) // 2
        if examined + cost > budget:
            return SearchOutcome("budget", None, None, A - 1, examined, "brute", time.perf_counter() - t0)
        zeros, seen = _shell_zeros(C, A)
        examined += seen
        if zeros:
            w = ZeroWitness.make(C, max(zeros))
            return SearchOutcome("found", A, w, A - 1, examined, "brute", time.perf_counter() - t0)
    return SearchOutcome("exhausted", None, None, A_max, examined, "brute", time.perf_counter() - t0)


# -- meet in the middle ---------------------------------------------------------------

def split_components(C: CubicForm) -> list[list[int]]:
    """Groups of variables that never share a monomial."""
    parent = list(range(C.n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for triple in C.monomials:
        r = find(triple[0])
        for v in triple[1:]:
            parent[find(v)] = r
    groups = defaultdict(list)
    for v in range(C.n):
        groups[find(v)].append(v)
    return sorted(groups.values())


def _halves(C: CubicForm) -> tuple[list[int], list[int]] | None:
    comps = split_components(C)
    if len(comps) < 2:
        return None
    # greedy balance, largest components first
    left: list[int] = []
    right: list[int] = []
    for comp in sorted(comps, key=len, reverse=True):
        (left if len(left) <= len(right) else right).extend(comp)
    return sorted(left), sorted(right)


def _restrict(C: CubicForm, idx: list[int]) -> CubicForm:
    pos = {v: i for i, v in enumerate(idx)}
    return CubicForm(
        len(idx),
        {tuple(pos[v] for v in t): c for t, c in C.monomials.items() if all(v in pos for v in t)},
    )


def _table(part: CubicForm, A: int) -> dict[int, list[tuple[int, tuple[int, ...]]]]:
    axes = [np.arange(-A, A + 1)] * part.n
    grids = [g.ravel() for g in np.meshgrid(*axes, indexing="ij")]
    if not _fits_int64(part, A):
        grids = [g.astype(object) for g in grids]
    vals = _evaluate(part, grids)
    pts = np.stack(grids, axis=1)
    norms = np.abs(pts).max(axis=1)
    table: dict[int, list] = defaultdict(list)
    for v, nm, p in zip(vals.tolist(), norms.tolist(), pts.tolist()):
        table[v].append((nm, tuple(p)))
    return table


def mitm_split(C: CubicForm, A: int, budget: int = DEFAULT_BUDGET) -> SearchOutcome:
    """Meet in the middle for forms ``C1(x_L) + C2(x_R)`` with disjoint variable sets."""
    t0 = time.perf_counter()
    halves = _halves(C)
    if halves is None:
        raise StrategyError("form does not split into independent variable groups")
    L, R = halves
    need = (2 * A + 1) ** max(len(L), len(R))
    if need > budget:
        return SearchOutcome("budget", None, None, 0, 0, "mitm", time.perf_counter() - t0)
    left = _table(_restrict(C, L), A)
    right = _table(_restrict(C, R), A)
    examined = (2 * A + 1) ** len(L) + (2 * A + 1) ** len(R)

    # least achievable norm: pair (l, r) with C1(l) = -C2(r), not both zero
    best = None
    for v, lpts in left.items():
        rpts = right.get(-v)
        if not rpts:
            continue
        lmin = min(nm for nm, _ in lpts)
        rmin = min(nm for nm, _ in rpts)
        cand = max(lmin, rmin)
        if cand == 0:
            lnz = [nm for nm, _ in lpts if nm > 0]
            rnz = [nm for nm, _ in rpts if nm > 0]
            opts = []
            if lnz:
                opts.append(max(min(lnz), rmin))
            if rnz:
                opts.append(max(lmin, min(rnz)))
            if not opts:
                continue
            cand = min(opts)
        if best is None or cand < best:
            best = cand
    if best is None:
        return SearchOutcome("exhausted", None, None, A, examined, "mitm", time.perf_counter() - t0)

    witnesses = []
    for v, lpts in left.items():
        rpts = right.get(-v)
        if not rpts:
            continue
        ls = [p for nm, p in lpts if nm <= best]
        rs = [p for nm, p in rpts if nm <= best]
        for lp in ls:
            for rp in rs:
                x = [0] * C.n
                for i, vi in enumerate(L):
                    x[vi] = lp[i]
                for i, vi in enumerate(R):
                    x[vi] = rp[i]
                if any(x) and max(abs(c) for c in x) == best:
                    witnesses.append(canonical_sign(x))
    w = ZeroWitness.make(C, max(witnesses))
    return SearchOutcome("found", best, w, best - 1, examined, "mitm", time.perf_counter() - t0)


def mitm_diagonal(C: CubicForm, A: int, budget: int = DEFAULT_BUDGET) -> SearchOutcome:
    if not C.is_diagonal:
        raise StrategyError("mitm_diagonal needs a diagonal form")
    if C.n < 2:
        raise StrategyError("meet in the middle needs at least two variables")
    return mitm_split(C, A, budget)


def find_least_zero(
    C: CubicForm, A_max: int, strategy: str = "auto", budget: int = DEFAULT_BUDGET
) -> SearchOutcome:
    """Search radii 1..A_max for the least nonzero zero of C."""
    if C.is_zero:
        raise FormError("the zero form vanishes everywhere")
    if A_max < 1:
        raise ValueError("A_max must be at least 1")
    if strategy == "auto":
        strategy = "mitm" if _halves(C) is not None else "brute"
    if strategy == "brute":
        return brute_force(C, A_max, budget)
    if strategy == "mitm":
        return mitm_split(C, A_max, budget)
    raise StrategyError(f"unknown strategy {strategy!r}")


@dataclass(frozen=True)
class ProfileRow:
    form: CubicForm
    M: int
    outcome: SearchOutcome

    @property
    def log_ratio(self) -> float | None:
        lam = self.outcome.lam
        if lam is None or lam <= 1 or self.M <= 1:
            return None
        return math.log(lam) / math.log(self.M)


def lambda_upper_profile(
    corpus: Iterable[CubicForm], A_max: int, strategy: str = "auto", budget: int = DEFAULT_BUDGET
) -> list[ProfileRow]:
    rows = []
    for C in corpus:
        if C.is_zero:
            raise FormError("corpus contains the zero form")
        rows.append(ProfileRow(C, height(C), find_least_zero(C, A_max, strategy, budget)))
    return rows
