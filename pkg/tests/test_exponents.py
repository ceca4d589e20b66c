from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf, sqrt

from cubiczero.exponents import (
    E_NAMES,
    TABLE1_E2,
    TABLE2_DELTA,
    TABLE2_E,
    TABLE2_THETA,
    THETA_NAMES,
    ExponentError,
    audit_constants,
    delta0,
    derivative_numerator,
    e1_reference,
    e2_of,
    e_constraints,
    e_of,
    eop0,
    exponent_report,
    f_derivative,
    f_n,
    not_good_bound,
    t_exponent,
    t_minor_requirement,
    table_report,
    theta_constraints,
    theta_of,
)



@pytest.fixture(autouse=True)
def fifty_digits():
    with mp.workdps(50):
        yield


TINY20 = mpf(10) ** -20
TINY30 = mpf(10) ** -30


def eop0_oracle(n):
    """The P_0 exponent written out separately at 80 digits."""
    with mp.workdps(80):
        s = sqrt(3 * n * (3 * n - 35))
        return 3675 * n * s / ((s - 18 * n + 210) * (3 * n - 6 * s))


def test_eop0_values():
    assert abs(eop0(14) - mpf("583.05")) < 0.01
    assert abs(eop0(15) - mpf("366.42")) < 0.01
    for n in range(14, 31):
        assert abs(eop0(n) - eop0_oracle(n)) < mpf(10) ** -45


def test_eop0_consistency_with_upper_bound():
    val = 3 * eop0(14) + Fraction(14 * (6 * 14 - 11), 12) + mpf("320.239")
    assert abs(val - mpf("2154.556")) < 0.05


@pytest.mark.parametrize("n", range(14, 31))
def test_delta_identities(n):
    d = delta0(n)
    assert 2 < d < mpf(n) / 6
    assert abs(f_derivative(n, d)) < TINY30
    assert abs(derivative_numerator(n, d)) < TINY30
    assert abs(f_n(n, d) - eop0(n)) < TINY20


@pytest.mark.parametrize("n", range(14, 19))
def test_delta_table(n):
    assert mp.nstr(delta0(n), 4) == TABLE2_DELTA[n]


@settings(max_examples=30)
@given(st.integers(14, 40), st.floats(0.01, 0.99))
def test_delta0_is_the_minimiser(n, frac):
    lo, hi = mpf(2), mpf(n) / 6
    d = lo + (hi - lo) * mpf(frac)
    assert f_n(n, d) >= f_n(n, delta0(n)) - TINY20


def test_domain_errors():
    with pytest.raises(ExponentError):
        eop0(13)
    with pytest.raises(ExponentError):
        f_n(14, 2)
    with pytest.raises(ExponentError):
        f_n(14, mpf(14) / 6)
    with pytest.raises(ExponentError):
        theta_constraints(14, 0)
    with pytest.raises(ExponentError):
        e2_of(10)
    with pytest.raises(ExponentError):
        not_good_bound(14, mpf("0.5"))


def test_t_exponent():
    assert t_exponent(14) == mpf("320.239")
    assert t_exponent(15) == mpf(2584) / 13
    assert abs(t_exponent(14, "recomputed") - mpf("321.6")) < 0.01
    assert abs(t_minor_requirement(15) - mpf("169.126")) < 0.001


def test_e_constraints_n14():
    printed = e_constraints(14)
    rc = e_constraints(14, "recomputed")
    assert set(printed) == set(E_NAMES)
    assert printed["T_upper"] == mpf("2154.556")
    assert printed["disjoint"] == mpf("495.446")
    assert abs(rc["disjoint"] - mpf("495.45")) < 0.01
    assert abs(rc["T_upper"] - mpf("2154.556")) < 0.001
    assert abs(rc["major_error"] - mpf("904.789")) < 0.001
    with pytest.raises(ValueError):
        e_constraints(14, "other")


def test_e_constraints_n15():
    E = eop0(15)
    expected = 3 * E + Fraction(18 * 225 - 285 + 4, 13)
    assert abs(e_constraints(15)["T_upper"] - expected) < TINY30
    assert abs(expected - mpf("1389.19")) < 0.01


@pytest.mark.parametrize("n", range(14, 19))
def test_e_binding(n):
    _, name = e_of(n)
    assert name == "T_upper"


def test_e16_value():
    assert abs(e_of(16)[0] - mpf("1123.47")) < 0.01


def test_theta_constraints_examples():
    tc = theta_constraints(14, mpf("2154.556"))
    assert set(tc) == set(THETA_NAMES)
    assert abs(tc["critical"] - mpf("1520.90")) < 0.01
    assert abs(tc["circle2"] - (eop0(14) - 1) / 2) < TINY30
    tc16 = theta_constraints(16, mpf("1123.47"))
    assert abs(tc16["minor_theta"] - mpf("622.69")) < 0.02
    assert abs(tc16["critical"] - mpf("592.3")) < 0.05
    assert tc16["minor_theta"] > tc16["critical"]


@pytest.mark.parametrize("n", range(14, 19))
def test_theta_table(n):
    theta, name = theta_of(n)
    assert abs(theta - mpf(TABLE2_THETA[n])) < 0.5
    assert name == ("critical" if n <= 15 else "minor_theta")


@pytest.mark.parametrize("n", range(14, 19))
def test_feasibility_windows(n):
    theta, _ = theta_of(n)
    assert 2 * n / (n - 6 * delta0(n)) < 1 + 2 * theta
    assert eop0(n) <= 1 + 2 * theta


def test_not_good_bound():
    assert not_good_bound(3, 1) == 7
    v = not_good_bound(14, "1520.904")
    assert mp.nstr(v, 9) == "138499.764"
    assert not_good_bound(14, 10) < not_good_bound(14, 11)


@pytest.mark.parametrize("n", range(14, 19))
def test_e2_table(n):
    assert abs(e2_of(n) - TABLE1_E2[n]) <= 20


@pytest.mark.parametrize("n", [14, 16, 17, 18])
def test_e2_with_printed_theta(n):
    assert e2_of(n, {n: TABLE2_THETA[n]}) == TABLE1_E2[n]


def test_e2_printed_theta_n15():
    # 112 + 835.543 * 105 = 87844.015 rounds up past the tabulated 87844.
    assert not_good_bound(15, TABLE2_THETA[15]) > 87844
    assert e2_of(15) == 87844


def test_e2_monotone_and_clamped():
    vals = [e2_of(n) for n in range(14, 19)]
    assert vals == sorted(vals, reverse=True)
    for n in (19, 25, 40):
        assert e2_of(n) == e2_of(18) == 70932


def test_precision_doubling_stable():
    for n in range(14, 19):
        lo = exponent_report(n, digits=30)
        hi = exponent_report(n, digits=60)
        assert mp.nstr(lo.theta_n, 25) == mp.nstr(hi.theta_n, 25)
        assert (lo.binding_e, lo.binding_theta) == (hi.binding_e, hi.binding_theta)
        assert lo.e2_n == hi.e2_n


def test_report_fields():
    r = exponent_report(14)
    assert abs(r.f_at_delta0 - r.eoP0) < TINY20
    assert r.e_n == max(r.e_constraints.values())
    assert r.theta_n == max(r.theta_constraints.values())
    names = {f.constant for f in r.audit_flags}
    assert "T exponent (n=14)" in names


def test_audit_flags():
    audit = {a.constant: a for a in audit_constants()}
    assert audit["T exponent (n=14)"].abs_diff > 1
    assert audit["major_error (n=14)"].abs_diff > mpf("0.3")
    assert audit["disjoint (n=14)"].abs_diff < mpf("0.001")
    assert audit["T_upper (n=14)"].abs_diff < mpf("0.001")
    assert abs(audit["T minor-arc exponent (n=15)"].abs_diff - mpf("1.154")) < 0.001
    for n in range(14, 18):
        assert audit[f"tabulated E({n}) vs e({n})"].abs_diff > 50
        assert audit[f"tabulated E({n}) vs e({n + 1})"].abs_diff < mpf("0.3")


def test_table_report_range():
    rows, audit = table_report(14, 15)
    assert [r.n for r in rows] == [14, 15]
    assert audit
    with pytest.raises(ExponentError):
        table_report(15, 14)
    with pytest.raises(ExponentError):
        table_report(12, 14)


def test_e1_reference():
    assert e1_reference(17) == Fraction(22 * 17**3 + 107 * 289 - 597 * 17 - 432, 15 * 8 * 1)
    with pytest.raises(ExponentError):
        e1_reference(16)
