"""Integer cubic forms and their exact invariants.

A form is stored through its expanded monomial coefficients, keyed by the
sorted index triple ``(i, j, k)`` with ``i <= j <= k`` (0-based).  The
symmetric tensor ``c_ijk`` with ``C(x) = sum_{i,j,k} c_ijk x_i x_j x_k`` is
rational in general; ``t_ijk = 6 c_ijk`` is always an integer and is what the
linear-algebra routines work with.
"""
from __future__ import annotations

import itertools
import json
import math
import re
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Mapping, Sequence

DEFAULT_CENSUS_BUDGET = 10**8


class FormError(ValueError):
    """Malformed or unsupported cubic form input."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed the configured point budget."""

    def __init__(self, required: int, budget: int, what: str = "points"):
        super().__init__(f"{what}: need {required}, budget is {budget}")
        self.required = required
        self.budget = budget


Triple = tuple[int, int, int]


def _perm_count(triple: Triple) -> int:
    """Number of ordered index triples that collapse onto ``triple``."""
    distinct = len(set(triple))
    return {1: 1, 2: 3, 3: 6}[distinct]


@dataclass(frozen=True)
class CubicForm:
    n: int
    monomials: Mapping[Triple, int]

    def __post_init__(self):
        if self.n < 1:
            raise FormError("a cubic form needs at least one variable")
        clean = {}
        for key, coef in self.monomials.items():
            triple = tuple(sorted(key))
            if len(triple) != 3:
                raise FormError(f"monomial {key!r} is not of degree 3")
            if min(triple) < 0 or max(triple) >= self.n:
                raise FormError(f"variable index out of range in {key!r}")
            if int(coef) != coef:
                raise FormError(f"non-integer coefficient {coef!r}")
            clean[triple] = clean.get(triple, 0) + int(coef)
        clean = {k: v for k, v in sorted(clean.items()) if v != 0}
        object.__setattr__(self, "monomials", clean)

    # -- construction -----------------------------------------------------

    @classmethod
    def diagonal(cls, coeffs: Sequence[int]) -> "CubicForm":
        return cls(len(coeffs), {(i, i, i): c for i, c in enumerate(coeffs)})

    @classmethod
    def from_tensor(cls, t: Sequence) -> "CubicForm":
        """Build from a full ``n x n x n`` tensor of ``6 * c_ijk`` values."""
        n = len(t)
        mons = {}
        for i, j, k in itertools.combinations_with_replacement(range(n), 3):
            vals = {t[a][b][c] for a, b, c in itertools.permutations((i, j, k))}
            if len(vals) != 1:
                raise FormError(f"tensor is not symmetric at {(i, j, k)}")
            num = t[i][j][k] * _perm_count((i, j, k))
            if num % 6:
                raise FormError(f"monomial coefficient at {(i, j, k)} is not integral")
            mons[(i, j, k)] = num // 6
        return cls(n, mons)

    # -- basic data ------------------------------------------------------

    def __hash__(self):
        return hash((self.n, tuple(self.monomials.items())))

    def __eq__(self, other):
        if not isinstance(other, CubicForm):
            return NotImplemented
        return self.n == other.n and self.monomials == other.monomials

    def tensor_entry(self, i: int, j: int, k: int) -> int:
        """``t_ijk = 6 c_ijk`` (an integer)."""
        triple = tuple(sorted((i, j, k)))
        return 6 * self.monomials.get(triple, 0) // _perm_count(triple)

    def coefficient(self, i: int, j: int, k: int) -> Fraction:
        """The rational tensor coefficient ``c_ijk``."""
        return Fraction(self.tensor_entry(i, j, k), 6)

    @cached_property
    def tensor(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        n = self.n
        return tuple(
            tuple(tuple(self.tensor_entry(i, j, k) for k in range(n)) for j in range(n))
            for i in range(n)
        )

    @property
    def is_zero(self) -> bool:
        return not self.monomials

    @property
    def is_diagonal(self) -> bool:
        return all(i == j == k for i, j, k in self.monomials)

    @property
    def content(self) -> int:
        return reduce(math.gcd, self.monomials.values(), 0)

    def __call__(self, x: Sequence[int]):
        if len(x) != self.n:
            raise FormError(f"expected a vector of length {self.n}, got {len(x)}")
        return sum(c * x[i] * x[j] * x[k] for (i, j, k), c in self.monomials.items())

    def scaled(self, lam: int) -> "CubicForm":
        return CubicForm(self.n, {k: lam * v for k, v in self.monomials.items()})

    def permuted(self, perm: Sequence[int]) -> "CubicForm":
        """Rename variable ``i`` to ``perm[i]``."""
        return CubicForm(
            self.n,
            {tuple(sorted(perm[a] for a in key)): v for key, v in self.monomials.items()},
        )

    def embedded(self, n: int) -> "CubicForm":
        """The same polynomial viewed in ``n >= self.n`` variables."""
        if n < self.n:
            raise FormError("cannot embed into fewer variables")
        return CubicForm(n, self.monomials)

    # -- serialization ---------------------------------------------------

    def exponent_vector(self, triple: Triple) -> tuple[int, ...]:
        e = [0] * self.n
        for i in triple:
            e[i] += 1
        return tuple(e)

    def to_document(self) -> dict:
        mons = sorted(
            (self.exponent_vector(t), c) for t, c in self.monomials.items()
        )
        return {"n": self.n, "monomials": [{"exps": list(e), "coef": c} for e, c in mons]}

    def to_json(self) -> str:
        return json.dumps(self.to_document(), separators=(",", ":"))

    def to_text(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for triple, c in sorted(self.monomials.items()):
            powers = Counter(triple)
            mono = "*".join(
                f"x{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in sorted(powers.items())
            )
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = mono if mag == 1 else f"{mag}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.to_text()


# -- parsing -------------------------------------------------------------

_FACTOR = re.compile(r"(\d+)|x(\d+)")
_DIGITS = re.compile(r"\d+")


def _parse_expression(text: str, n: int | None) -> CubicForm:
    pos = 0
    terms: dict[Triple, int] = {}
    max_var = 0
    length = len(text)

    def skip_ws(p):
        while p < length and text[p].isspace():
            p += 1
        return p

    pos = skip_ws(pos)
    if pos == length:
        raise FormError("empty form expression", 0)
    first = True
    while True:
        pos = skip_ws(pos)
        if pos == length:
            break
        sign = 1
        if text[pos] in "+-":
            sign = -1 if text[pos] == "-" else 1
            pos = skip_ws(pos + 1)
        elif not first:
            raise FormError(f"expected '+' or '-', found {text[pos]!r}", pos)
        first = False
        term_start = pos
        coef = 1
        variables: list[int] = []
        expect_factor = True
        while True:
            pos = skip_ws(pos)
            if not expect_factor:
                if pos < length and text[pos] == "*":
                    pos += 1
                    expect_factor = True
                    continue
                break
            m = _FACTOR.match(text, pos)
            if not m:
                found = text[pos] if pos < length else "end of input"
                raise FormError(f"expected a coefficient or variable, found {found!r}", pos)
            pos = m.end()
            if m.group(1) is not None:
                coef *= int(m.group(1))
            else:
                idx = int(m.group(2))
                if idx < 1:
                    raise FormError("variables are numbered from x1", m.start())
                exp = 1
                p2 = skip_ws(pos)
                if p2 < length and text[p2] == "^":
                    p2 = skip_ws(p2 + 1)
                    em = _DIGITS.match(text, p2)
                    if not em:
                        raise FormError("expected an exponent after '^'", p2)
                    exp = int(em.group())
                    pos = em.end()
                variables.extend([idx - 1] * exp)
                max_var = max(max_var, idx)
            expect_factor = False
        if len(variables) != 3:
            raise FormError(
                f"term {text[term_start:pos].strip()!r} has degree {len(variables)}, expected 3",
                term_start,
            )
        key = tuple(sorted(variables))
        terms[key] = terms.get(key, 0) + sign * coef
    if n is None:
        n = max_var
    elif max_var > n:
        raise FormError(f"variable x{max_var} out of range for n={n}")
    return CubicForm(n, terms)


def _parse_document(doc: Mapping) -> CubicForm:
    try:
        n = int(doc["n"])
        items = doc["monomials"]
    except (KeyError, TypeError) as exc:
        raise FormError("form document needs fields 'n' and 'monomials'") from exc
    terms: dict[Triple, int] = {}
    for item in items:
        exps = list(item["exps"])
        coef = item["coef"]
        if isinstance(coef, str):
            coef = int(coef)
        if len(exps) != n:
            raise FormError(f"exponent vector {exps} does not have length {n}")
        if any(e < 0 for e in exps) or sum(exps) != 3:
            raise FormError(f"exponent vector {exps} does not have degree 3")
        key = tuple(sorted(i for i, e in enumerate(exps) for _ in range(e)))
        terms[key] = terms.get(key, 0) + int(coef)
    return CubicForm(n, terms)


def parse_form(text: str | Mapping, n: int | None = None) -> CubicForm:
    """Parse a polynomial expression such as ``"3*x1^3 - x1*x2*x3"`` or a
    structured document ``{"n": 3, "monomials": [{"exps": [...], "coef": c}]}``.

    ``n`` forces the variable count for expressions (default: largest index).
    """
    if isinstance(text, Mapping):
        return _parse_document(text)
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise FormError(f"invalid form document: {exc.msg}", exc.pos) from exc
        form = _parse_document(doc)
        if n is not None and n != form.n:
            form = form.embedded(n)
        return form
    return _parse_expression(text, n)


def normalize(C: CubicForm) -> CubicForm:
    """Divide out the content so the coefficients have gcd 1."""
    if C.is_zero:
        raise FormError("the zero form cannot be normalized")
    g = C.content
    return CubicForm(C.n, {k: v // g for k, v in C.monomials.items()})


# -- height ----------------------------------------------------------------

def height(C: CubicForm) -> int:
    """Largest absolute monomial coefficient of the expanded polynomial."""
    if C.is_zero:
        raise FormError("the zero form has no height")
    return max(abs(v) for v in C.monomials.values())


def tensor_height(C: CubicForm) -> Fraction:
    """Largest ``|c_ijk|`` of the symmetric tensor."""
    if C.is_zero:
        raise FormError("the zero form has no height")
    return max(abs(C.coefficient(*t)) for t in C.monomials)


# -- the matrix M(x) and its rank --------------------------------------------

def _check_dim(C: CubicForm, x: Sequence[int]):
    if len(x) != C.n:
        raise FormError(f"expected a vector of length {C.n}, got {len(x)}")


def scaled_matrix_of(C: CubicForm, x: Sequence[int]) -> list[list[int]]:
    """``6 * M(x)``: the integer matrix with entries ``sum_i t_ijk x_i``."""
    _check_dim(C, x)
    n = C.n
    out = [[0] * n for _ in range(n)]
    for (i, j, k), coef in C.monomials.items():
        t = 6 * coef // _perm_count((i, j, k))
        for a, b, c in set(itertools.permutations((i, j, k))):
            out[b][c] += t * x[a]
    return out


def matrix_of(C: CubicForm, x: Sequence[int]) -> list[list[Fraction]]:
    """M(x) with ``M(x)[j][k] = sum_i c_ijk x_i`` as exact rationals."""
    return [[Fraction(v, 6) for v in row] for row in scaled_matrix_of(C, x)]


def integer_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over Q of an integer matrix by fraction-free (Bareiss) elimination."""
    a = [list(r) for r in rows]
    if not a:
        return 0
    m, ncols = len(a), len(a[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        pivot = next((r for r in range(rank, m) if a[r][col] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        p = a[rank][col]
        for r in range(rank + 1, m):
            f = a[r][col]
            row_r, row_p = a[r], a[rank]
            for c in range(col + 1, ncols):
                row_r[c] = (p * row_r[c] - f * row_p[c]) // prev
            row_r[col] = 0
        prev = p
        rank += 1
        if rank == m:
            break
    return rank


def rank_of(C: CubicForm, x: Sequence[int]) -> int:
    """Rank of M(x) over the rationals."""
    return integer_rank(scaled_matrix_of(C, x))


@dataclass(frozen=True)
class RankCensus:
    H: int
    counts: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.counts) - 1

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def exponent_ratios(self) -> dict[int, float]:
        base = math.log(2 * self.H)
        return {r: math.log(c) / base for r, c in enumerate(self.counts) if c > 1}


def _primitive_key(x: tuple[int, ...]) -> tuple[int, ...]:
    g = reduce(math.gcd, x, 0)
    y = tuple(v // g for v in x)
    lead = next(v for v in y if v)
    return y if lead > 0 else tuple(-v for v in y)


def _census_slab(C: CubicForm, H: int, first: Iterable[int]) -> list[int]:
    # rank(M(lam x)) = rank(M(x)), so one evaluation per primitive direction.
    n = C.n
    counts = [0] * (n + 1)
    cache: dict[tuple[int, ...], int] = {}
    rng = range(-H, H + 1)
    for x0 in first:
        for rest in itertools.product(rng, repeat=n - 1):
            x = (x0,) + rest
            if not any(x):
                counts[0] += 1
                continue
            key = _primitive_key(x)
            r = cache.get(key)
            if r is None:
                r = cache[key] = rank_of(C, key)
            counts[r] += 1
    return counts


def rank_census(
    C: CubicForm,
    H: int,
    budget: int = DEFAULT_CENSUS_BUDGET,
    workers: int = 1,
) -> RankCensus:
    """Count lattice points ``|x| <= H`` by the rank of M(x)."""
    if H < 1:
        raise ValueError("H must be a positive integer")
    points = (2 * H + 1) ** C.n
    if points > budget:
        raise BudgetExceeded(points, budget, "rank census")
    first = list(range(-H, H + 1))
    if workers <= 1:
        counts = _census_slab(C, H, first)
    else:
        slabs = [first[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_census_slab, [C] * workers, [H] * workers, slabs))
        counts = [sum(col) for col in zip(*parts)]
    return RankCensus(H, tuple(counts))


@dataclass(frozen=True)
class GoodnessProfile:
    H: int
    census: RankCensus
    excess: dict[int, float]

    @property
    def worst(self) -> tuple[int, float]:
        r = max(self.excess, key=self.excess.get)
        return r, self.excess[r]


def good_exponent_profile(
    C: CubicForm, H_list: Iterable[int], budget: int = DEFAULT_CENSUS_BUDGET
) -> list[GoodnessProfile]:
    """For each H, the excess ``log(counts[r]) / log(2H) - r`` per rank.

    A form behaving like a good form at these scales has every excess close
    to zero; an excess near 1 or more points at a rank that is populated too
    densely.
    """
    out = []
    for H in H_list:
        if H < 2:
            raise ValueError(f"H={H}: need H >= 2 for a meaningful log ratio")
        census = rank_census(C, H, budget)
        base = math.log(2 * H)
        excess = {
            r: (math.log(c) / base if c > 1 else 0.0) - r
            for r, c in enumerate(census.counts)
            if c > 0
        }
        out.append(GoodnessProfile(H, census, excess))
    return out


# -- bilinear forms ------------------------------------------------------------

def bilinear(C: CubicForm, h: Sequence[int], w: Sequence[int]) -> list[Fraction]:
    """``B_i(h; w) = sum_{j,k} c_ijk h_j w_k`` for ``i = 1..n``."""
    _check_dim(C, h)
    _check_dim(C, w)
    n = C.n
    out = [0] * n
    for (i, j, k), coef in C.monomials.items():
        t = 6 * coef // _perm_count((i, j, k))
        for a, b, c in set(itertools.permutations((i, j, k))):
            out[a] += t * h[b] * w[c]
    return [Fraction(v, 6) for v in out]


# -- unimodular substitution and Davenport's invariant -------------------------

def substitute(C: CubicForm, U: Sequence[Sequence[int]]) -> CubicForm:
    """The form ``y -> C(U y)`` for an integer ``n x n`` matrix ``U``."""
    n = C.n
    if len(U) != n or any(len(row) != n for row in U):
        raise FormError("substitution matrix has the wrong shape")
    # C(Uy) = sum over monomials c * (U y)_i (U y)_j (U y)_k, expanded directly.
    lin = [list(row) for row in U]
    mons: dict[Triple, int] = {}
    for (i, j, k), coef in C.monomials.items():
        for a in range(n):
            if not lin[i][a]:
                continue
            for b in range(n):
                if not lin[j][b]:
                    continue
                for c in range(n):
                    if not lin[k][c]:
                        continue
                    key = tuple(sorted((a, b, c)))
                    mons[key] = mons.get(key, 0) + coef * lin[i][a] * lin[j][b] * lin[k][c]
    return CubicForm(n, mons)


def coefficient_matrix(C: CubicForm) -> tuple[list[list[int]], int]:
    """The ``n x n(n+1)/2`` matrix of the quadratic forms ``sum_{jk} c_ijk x_j x_k``.

    Row ``i``, column ``{j <= k}`` holds ``c_ijj`` on the diagonal columns and
    ``2 c_ijk`` otherwise.  Entries are rational; the matrix is returned
    multiplied by the least positive integer ``scale`` clearing denominators,
    together with that scale.
    """
    n = C.n
    cols = list(itertools.combinations_with_replacement(range(n), 2))
    rows = []
    for i in range(n):
        row = []
        for j, k in cols:
            c = C.coefficient(i, j, k)
            row.append(c if j == k else 2 * c)
        rows.append(row)
    scale = reduce(math.lcm, (v.denominator for row in rows for v in row), 1)
    return [[int(v * scale) for v in row] for row in rows], scale


def maximal_minor_gcd(rows: Sequence[Sequence[int]]) -> int:
    """gcd of all maximal (``m x m``) minors of an ``m x N`` integer matrix.

    Unimodular column operations preserve this gcd, so the matrix is column
    reduced to lower-triangular ``[L | 0]`` and ``|det L|`` returned.
    """
    a = [list(r) for r in rows]
    m = len(a)
    if m == 0:
        return 1
    ncols = len(a[0])
    if ncols < m:
        return 0
    for r in range(m):
        # Euclid across columns r..N-1 of row r.
        while True:
            nz = [c for c in range(r, ncols) if a[r][c] != 0]
            if not nz:
                return 0
            piv = min(nz, key=lambda c: abs(a[r][c]))
            if piv != r:
                for row in a:
                    row[r], row[piv] = row[piv], row[r]
            done = True
            for c in range(r + 1, ncols):
                if a[r][c]:
                    q = a[r][c] // a[r][r]
                    for row in a:
                        row[c] -= q * row[r]
                    if a[r][c]:
                        done = False
            if done:
                break
    det = 1
    for r in range(m):
        det *= a[r][r]
    return abs(det)


@dataclass(frozen=True)
class DeltaInvariant:
    value: Fraction
    scale: int = 1

    @property
    def degenerate(self) -> bool:
        return self.value == 0


def delta_invariant(C: CubicForm) -> DeltaInvariant:
    """Davenport's invariant: gcd of the ``n x n`` minors of the coefficient matrix.

    When the tensor is not integral the matrix is scaled by ``scale`` first
    and the result divided by ``scale**n``; forms with integral ``c_ijk`` get
    an integer value with ``scale == 1``.
    """
    if C.n < 2:
        raise FormError("the invariant needs n >= 2")
    mat, scale = coefficient_matrix(C)
    g = maximal_minor_gcd(mat)
    return DeltaInvariant(Fraction(g, scale**C.n), scale)


def random_unimodular(n: int, rng, steps: int = 12, bound: int = 2) -> list[list[int]]:
    """A random product of elementary integer matrices (determinant +-1)."""
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        if n > 1:
            i, j = rng.sample(range(n), 2)
            f = rng.randint(-bound, bound)
            for row in U:
                row[j] += f * row[i]
        if rng.random() < 0.2:
            s = rng.randrange(n)
            for row in U:
                row[s] = -row[s]
    return U
