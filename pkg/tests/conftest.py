import itertools
import random

import pytest
import sympy
from hypothesis import strategies as st

from cubiczero.forms import CubicForm


def all_triples(n):
    return list(itertools.combinations_with_replacement(range(n), 3))


def random_form(rng: random.Random, n: int, lo: int = -5, hi: int = 5, density: float = 0.6) -> CubicForm:
    while True:
        mono = {t: rng.randint(lo, hi) for t in all_triples(n) if rng.random() < density}
        C = CubicForm(n, mono)
        if not C.is_zero:
            return C


def sympy_poly(C: CubicForm):
    """The expanded polynomial, built independently of the tensor code."""
    xs = sympy.symbols(f"x1:{C.n + 1}")
    expr = sum(c * xs[i] * xs[j] * xs[k] for (i, j, k), c in C.monomials.items())
    return sympy.expand(expr), xs


@st.composite
def forms(draw, n_min=1, n_max=3, coef=5):
    n = draw(st.integers(n_min, n_max))
    triples = all_triples(n)
    coeffs = draw(st.lists(st.integers(-coef, coef), min_size=len(triples), max_size=len(triples)))
    if not any(coeffs):
        coeffs[0] = 1
    return CubicForm(n, dict(zip(triples, coeffs)))


def vectors(n, bound=4):
    return st.lists(st.integers(-bound, bound), min_size=n, max_size=n)


def diagonal_corpus():
    """Diagonal forms in 2, 3 and 4 variables with nonzero coefficients in [-9, 9]."""
    rng = random.Random(11)
    out = []
    for n in (2, 3, 4):
        for _ in range(8):
            out.append(CubicForm.diagonal([rng.choice([c for c in range(-9, 10) if c]) for _ in range(n)]))
    return out


def acceptance_corpus():
    """Twenty-four random forms with n <= 3 and coefficients in [-5, 5]."""
    r = random.Random(7)
    return [random_form(r, n) for n in (2, 3) for _ in range(12)]


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(scope="session")
def corpus():
    return acceptance_corpus()
