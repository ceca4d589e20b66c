import cmath
import itertools
import math
import random
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf, mpc, cos, pi

from cubiczero.expsums import (
    A_of_q,
    BoxSpec,
    bound_audit,
    complete_sum,
    default_k_of_p,
    divisors,
    euler_phi,
    generating_sum,
    generating_sum_naive,
    local_count,
    local_density_identity,
    mobius,
    ramanujan_sum,
    raw_sum_over_a,
    singular_series,
    truncated_euler_product,
    value_distribution,
    value_histogram,
    zero_count_in_box,
)
from cubiczero.forms import BudgetExceeded, CubicForm, parse_form

from conftest import forms, random_form

CUBE = parse_form("x1^3")


def brute_counts(C, q):
    out = [0] * q
    for r in itertools.product(range(q), repeat=C.n):
        out[C(r) % q] += 1
    return tuple(out)


def direct_sum(C, a, q):
    return sum(cmath.exp(2j * math.pi * a * C(r) / q) for r in itertools.product(range(q), repeat=C.n))


# -- arithmetic helpers ------------------------------------------------------------------

def test_arithmetic_functions():
    assert [mobius(q) for q in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert [euler_phi(q) for q in (1, 9, 12, 13)] == [1, 6, 4, 12]


@pytest.mark.parametrize("q", range(1, 25))
def test_ramanujan_sum_vs_definition(q):
    for m in range(q):
        direct = sum(cmath.exp(2j * math.pi * a * m / q) for a in range(1, q + 1) if math.gcd(a, q) == 1)
        assert abs(direct - ramanujan_sum(q, m)) < 1e-9


# -- value distributions ----------------------------------------------------------------------

def test_cube_mod_nine():
    d = value_distribution(CUBE, 9)
    assert {m: c for m, c in enumerate(d.counts) if c} == {0: 3, 1: 3, 8: 3}
    assert d.rho == 3


def test_trivial_modulus():
    assert value_distribution(parse_form("x1^3 + x2^3"), 1).counts == (1,)


def test_sum_of_two_cubes_mod_seven():
    # 1 from the origin plus 6 choices of x with y = -x, and 6 more from
    # the other two cube roots of -1 mod 7: 1 + 3 * 6 = 19
    C = parse_form("x1^3 + x2^3")
    assert brute_counts(C, 7)[0] == 19
    for method in ("brute", "diagonal", "projective"):
        assert value_distribution(C, 7, method=method).counts == brute_counts(C, 7)
    assert local_count(C, 7, 1) == 19


@pytest.mark.parametrize("q", list(range(1, 31)))
def test_diagonal_path_matches_brute(q):
    rng = random.Random(q)
    for n in (1, 2, 3):
        if q**n > 30000:
            continue
        C = CubicForm.diagonal([rng.choice([c for c in range(-5, 6) if c]) for _ in range(n)])
        assert value_distribution(C, q, method="diagonal").counts == brute_counts(C, q)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13, 31])
def test_projective_path_matches_brute(p, rng):
    for n in (1, 2, 3):
        C = random_form(rng, n)
        assert value_distribution(C, p, method="projective").counts == value_distribution(C, p, method="brute").counts


@settings(max_examples=40, deadline=None)
@given(forms(n_max=3), st.integers(1, 12))
def test_partition_and_auto(C, q):
    d = value_distribution(C, q)
    assert d.total == q**C.n
    assert d.counts == brute_counts(C, q)


def test_distribution_errors():
    with pytest.raises(ValueError):
        value_distribution(CUBE, 0)
    with pytest.raises(ValueError):
        value_distribution(parse_form("x1^2*x2"), 4, method="diagonal")
    with pytest.raises(BudgetExceeded):
        value_distribution(parse_form("x1^3 + x1*x2*x3"), 100, budget=1000)


# -- complete sums ------------------------------------------------------------------------------

def test_complete_sum_examples():
    assert complete_sum(CUBE, 0, 1).value == 1
    assert abs(complete_sum(CUBE, 1, 3).value) < mpf(10) ** -45
    with mp.workdps(60):
        expected = 3 * (1 + 2 * cos(2 * pi / 9))
    rec = complete_sum(CUBE, 1, 9)
    assert abs(rec.value - expected) < mpf(10) ** -45
    assert abs(rec.value.imag) < mpf(10) ** -45
    assert mp.nstr(rec.value.real, 5) == "7.5963"


def test_complete_sum_rejects_non_coprime():
    with pytest.raises(ValueError, match="raw_sum_over_a"):
        complete_sum(CUBE, 3, 9)


@pytest.mark.parametrize("q", [4, 5, 6, 7, 9])
def test_complete_sum_vs_direct(q, rng):
    C = random_form(rng, 2)
    for a in range(1, q):
        if math.gcd(a, q) == 1:
            rec = complete_sum(C, a, q)
            assert abs(complex(rec.value) - direct_sum(C, a, q)) < 1e-8
            assert rec.abs <= q**C.n


def test_conjugate_symmetry(rng):
    C = random_form(rng, 2)
    for q in (5, 8, 9):
        for a in range(1, q):
            if math.gcd(a, q) == 1:
                s, t = complete_sum(C, a, q).value, complete_sum(C, q - a, q).value
                assert abs(s - mp.conj(t)) < mpf(10) ** -40


def test_raw_sum_examples(rng):
    assert raw_sum_over_a(CUBE, 9) == 27
    assert raw_sum_over_a(CUBE, 1) == 1
    C = random_form(rng, 2)
    direct = sum(direct_sum(C, a, 5) for a in range(5))
    assert abs(direct - raw_sum_over_a(C, 5)) < 1e-8


# -- A(q), local counts and the singular series ---------------------------------------------------

def test_A_examples():
    assert A_of_q(CUBE, 1) == 1
    assert A_of_q(CUBE, 3) == 0
    assert A_of_q(CUBE, 9) == 2


def test_A_vs_complex_summation(rng):
    C = random_form(rng, 2)
    for q in range(1, 13):
        s = sum(direct_sum(C, a, q) for a in range(1, q + 1) if math.gcd(a, q) == 1) / q**C.n
        assert abs(s - float(A_of_q(C, q))) < 1e-9


def test_local_count_examples():
    assert local_count(CUBE, 3, 2) == 3
    with pytest.raises(ValueError):
        local_count(CUBE, 9, 1)
    for p in (2, 3, 5):
        assert local_count(parse_form("x1^3+x1*x2^2-x2^3"), p, 1) >= 1


def test_local_identity_examples(rng):
    lhs, rhs, ok = local_density_identity(CUBE, 3, 2)
    assert (lhs, rhs, ok) == (3, 3, True)
    lhs, rhs, ok = local_density_identity(random_form(rng, 2), 5, 0)
    assert lhs == rhs == 1 and ok
    assert local_density_identity(random_form(rng, 2), 2, 2)[2]


def test_singular_series_small():
    assert singular_series(CUBE, 1).partial_sum == 1
    rep = singular_series(CUBE, 9)
    assert rep.partial_sum == sum(A_of_q(CUBE, q) for q in range(1, 10))
    assert rep.A_values[1] == 1
    assert all(ok for _, _, ok in rep.multiplicativity)
    assert rep.local_densities[(3, 2)] == 3
    assert rep.cumulative()[-1][2] == rep.partial_sum


def test_singular_series_budget_message():
    with pytest.raises(BudgetExceeded, match="R="):
        singular_series(parse_form("x1^3 + x1*x2*x3"), 40, budget=2000)


@pytest.mark.parametrize("seed", range(4))
def test_multiplicativity(seed):
    C = random_form(random.Random(seed), 2)
    for q1 in range(2, 13):
        for q2 in range(q1 + 1, 13):
            if math.gcd(q1, q2) == 1:
                assert A_of_q(C, q1 * q2) == A_of_q(C, q1) * A_of_q(C, q2)


def test_euler_product_uses_local_counts():
    C = parse_form("x1^3 + x2^3 + x3^3")
    k = default_k_of_p(1)
    assert k(2) == 2 and k(5) == 2
    ours = truncated_euler_product(C, 5, lambda p: 1)
    expected = Fraction(1)
    for p in (2, 3, 5):
        expected *= Fraction(brute_counts(C, p)[0], p**2)
    assert ours == expected


# -- box sums ---------------------------------------------------------------------------------------

def test_box_spec_validation():
    with pytest.raises(ValueError):
        BoxSpec((0,), 0)
    with pytest.raises(ValueError):
        BoxSpec((0,), 1, Fraction(1, 2))
    assert BoxSpec((Fraction(1, 3),), Fraction(1, 4), 2).lattice_count() == 1


def test_generating_sum_examples():
    box = BoxSpec.centered(1, 2)
    assert generating_sum(CUBE, box, 0) == 5
    assert abs(generating_sum(CUBE, box, Fraction(1, 2)) - 1) < mpf(10) ** -45


@pytest.mark.parametrize("seed", range(5))
def test_histogram_vs_naive(seed):
    rng = random.Random(seed)
    C = random_form(rng, 2)
    z = tuple(Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(2))
    box = BoxSpec(z, Fraction(rng.randint(1, 4), 2), rng.randint(1, 3))
    alpha = Fraction(rng.randint(1, 50), 97)
    a = generating_sum(C, box, alpha)
    b = generating_sum_naive(C, box, alpha)
    assert abs(a - b) < mpf(10) ** -30
    hist = value_histogram(C, box)
    assert zero_count_in_box(C, box) == hist.get(0, 0)
    assert sum(hist.values()) == box.lattice_count()
    expected = Counter(C(x) for x in itertools.product(*box.ranges()))
    assert hist == expected


def test_zero_count_examples():
    assert zero_count_in_box(parse_form("x1^3 + x2^3"), BoxSpec.centered(2, 5)) == 11
    empty = BoxSpec((Fraction(1, 2), Fraction(1, 2)), Fraction(1, 4))
    assert zero_count_in_box(parse_form("x1^3 + x2^3"), empty) == 0


def test_box_dimension_and_budget():
    with pytest.raises(ValueError):
        value_histogram(CUBE, BoxSpec.centered(2, 1))
    with pytest.raises(BudgetExceeded):
        value_histogram(parse_form("x1^3+x2^3+x3^3"), BoxSpec.centered(3, 50), budget=1000)


# -- bound audit -------------------------------------------------------------------------------------

def test_bound_audit_cube():
    audit = bound_audit(CUBE, [1, 9, 27])
    rows = {r.q: r for r in audit.rows}
    assert rows[1].max_ratio == 1
    assert abs(rows[9].max_ratio - mpf("1.21730")) < mpf("1e-5")
    assert all(r.trivial_ok for r in audit.rows)


def test_bound_audit_sampling_is_seeded(rng):
    C = random_form(rng, 2)
    a = bound_audit(C, [31], samples=5, seed=3)
    b = bound_audit(C, [31], samples=5, seed=3)
    assert a.rows[0].sampled == b.rows[0].sampled and len(a.rows[0].sampled) == 5
