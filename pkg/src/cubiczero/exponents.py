"""The exponent pipeline behind the e_2(n) table.

Every bound carries an arbitrarily small epsilon in its original form; here
the epsilon -> 0 limit is evaluated and each constraint is treated as a closed
inequality.  Polynomial-in-n pieces are exact rationals, the square roots
come from mpmath at the working precision.

For n = 14 the tabulated derivation uses three decimal constants that do not
follow from its own formulas (the M-exponent of T, and two of the bounds on
e(n)).  Those constants are kept in a ``printed`` channel that drives the
pipeline exactly as printed, and the formula values live in a ``recomputed``
channel used only for the audit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from mpmath import mp, mpf, sqrt

DEFAULT_DIGITS = 50
N_MIN = 14
N_CLAMP = 18

# Decimal constants printed for the special cases n = 14, 15.
PRINTED_T14 = "320.239"
PRINTED_T15_MINOR = "167.972"
PRINTED_DISJOINT_14 = "495.446"
PRINTED_MAJOR_14 = "904.479"
PRINTED_T_UPPER_14 = "2154.556"

TABLE1_E2 = {14: 138500, 15: 87844, 16: 74851, 17: 71400, 18: 70932}
TABLE2_E = {14: "1389.187", 15: "1123.474", 16: "984.990", 17: "904.562", 18: "855.213"}
TABLE2_DELTA = {14: "2.237", 15: "2.369", 16: "2.505", 17: "2.642", 18: "2.781"}
TABLE2_THETA = {14: "1520.904", 15: "835.543", 16: "622.688", 17: "523.934", 18: "462.548"}

E_NAMES = ("disjoint", "major_error", "minorQ1", "minorQ2", "T_upper")
THETA_NAMES = ("good1", "minor_theta", "good2", "good3", "critical", "circle2", "circle1")


class ExponentError(ValueError):
    pass


class PrecisionError(ArithmeticError):
    pass


def _check_n(n: int):
    if n < N_MIN:
        raise ExponentError(f"the pipeline needs n >= {N_MIN}, got n={n}")


def _q(num, den=1) -> mpf:
    """An exact rational rendered at the current precision."""
    f = Fraction(num, den)
    return mpf(f.numerator) / f.denominator


def _root(n: int) -> mpf:
    return sqrt(mpf(3 * n * (3 * n - 35)))


def _stable(fn, n, digits, *args):
    """Evaluate at ``digits`` and ``2 * digits``; refuse if they disagree."""
    with mp.workdps(2 * digits):
        hi = fn(n, *args)
    with mp.workdps(digits):
        lo = fn(n, *args)
        tol = mpf(10) ** (-(digits - 5)) * max(1, abs(hi))
        if abs(lo - hi) > tol:
            raise PrecisionError(f"{fn.__name__}({n}) unstable at {digits} digits")
        return +hi


# -- P_0 exponent and the delta optimisation ------------------------------------

def _eop0(n):
    s = _root(n)
    return 3675 * n * s / ((s - 18 * n + 210) * (3 * n - 6 * s))


def eop0(n: int, digits: int = DEFAULT_DIGITS) -> mpf:
    """Exponent of M in P_0 (epsilon dropped)."""
    _check_n(n)
    return _stable(_eop0, n, digits)


def _delta0(n):
    return _q(6 * n, 35) - _root(n) / 105


def delta0(n: int, digits: int = DEFAULT_DIGITS) -> mpf:
    """Minimiser of f_n on (2, n/6)."""
    _check_n(n)
    return _stable(_delta0, n, digits)


def _check_delta(n, delta):
    if not (2 < delta < mpf(n) / 6):
        raise ExponentError(f"delta={delta} outside (2, {n}/6)")


def f_n(n: int, delta, digits: int = DEFAULT_DIGITS) -> mpf:
    """``(n delta / (n - 6 delta) + 6n) / (delta - 2)``."""
    with mp.workdps(digits):
        d = mpf(delta)
        _check_delta(n, d)
        return (n * d / (n - 6 * d) + 6 * n) / (d - 2)


def f_derivative(n: int, delta, digits: int = DEFAULT_DIGITS) -> mpf:
    with mp.workdps(digits):
        d = mpf(delta)
        _check_delta(n, d)
        return 2 * n * (-105 * d**2 + 36 * n * d - n * (3 * n + 1)) / ((d - 2) ** 2 * (n - 6 * d) ** 2)


def derivative_numerator(n: int, delta, digits: int = DEFAULT_DIGITS) -> mpf:
    """``-105 delta^2 + 36 n delta - n(3n + 1)``; vanishes at delta0(n)."""
    with mp.workdps(digits):
        d = mpf(delta)
        return -105 * d**2 + 36 * n * d - n * (3 * n + 1)


# -- the T exponent -------------------------------------------------------------------

def t_exponent_general(n: int) -> Fraction:
    return Fraction(4 * (3 * n * n - 2 * n + 1), n - 2)


def t_minor_requirement(n: int, digits: int = DEFAULT_DIGITS) -> mpf:
    """M-exponent that the small-denominator minor-arc range forces on T.

    For 14 <= n <= 15 it involves P_0; from n = 16 on it is rational.
    """
    _check_n(n)
    with mp.workdps(digits):
        base = _q(54 * n * n - 101 * n - 8, (n - 2) * (n - 8))
        if n <= 15:
            return base + eop0(n, digits) * _q(16 - n, n - 8)
        return base


def t_exponent(n: int, channel: str = "printed", digits: int = DEFAULT_DIGITS) -> mpf:
    """M-exponent in the definition of T."""
    _check_n(n)
    with mp.workdps(digits):
        if n == 14:
            if channel == "printed":
                return mpf(PRINTED_T14)
            return t_minor_requirement(14, digits)
        return _q(t_exponent_general(n))


# -- constraints on e(n) ---------------------------------------------------------------

def _e_bounds(n: int, t: mpf, E: mpf) -> dict[str, mpf]:
    d1 = n * n - 7 * n - 72
    d2 = n**3 - 16 * n * n + 33 * n - 16
    return {
        # 2 T P_0^2 < 1 with P = M^e
        "disjoint": (t + 2 * E) / 3,
        # P_0 T M^{3/2} P^2 << 1
        "major_error": E + t + _q(3, 2),
        "minorQ1": _q(4 * (n + 4), d1) * E + _q(77 * n**3 + 274 * n * n - 746 * n + 16, 2 * (n - 2) * d1),
        "minorQ2": _q(77 * n**4 - 221 * n**3 + 180 * n * n + 70 * n - 96, 2 * (n - 2) * d2),
        # T << P^{-2} M^{-3 eoP_0 - n(6n - 11)/(n - 2)}
        "T_upper": 3 * E + _q(n * (6 * n - 11), n - 2) + t,
    }


def e_constraints(n: int, channel: str = "printed", digits: int = DEFAULT_DIGITS) -> dict[str, mpf]:
    """Lower bounds on e(n), keyed by constraint name.

    ``printed`` uses the printed n = 14 constants verbatim; ``recomputed``
    derives every entry from the formulas.
    """
    _check_n(n)
    if channel not in ("printed", "recomputed"):
        raise ValueError(f"unknown channel {channel!r}")
    with mp.workdps(digits):
        E = eop0(n, digits)
        if n == 14:
            out = _e_bounds(n, mpf(PRINTED_T14), E)
            if channel == "printed":
                out["disjoint"] = mpf(PRINTED_DISJOINT_14)
                out["major_error"] = mpf(PRINTED_MAJOR_14)
                out["T_upper"] = mpf(PRINTED_T_UPPER_14)
            return out
        return _e_bounds(n, t_exponent(n, digits=digits), E)


def _argmax(d: Mapping[str, mpf]) -> str:
    return max(d, key=lambda k: d[k])


def e_of(n: int, channel: str = "printed", digits: int = DEFAULT_DIGITS) -> tuple[mpf, str]:
    """e(n) as the strongest of its lower bounds, with the binding name."""
    bounds = e_constraints(n, channel, digits)
    name = _argmax(bounds)
    return bounds[name], name


# -- constraints on theta ----------------------------------------------------------------

def theta_constraints(n: int, e, digits: int = DEFAULT_DIGITS) -> dict[str, mpf]:
    """Each theta-inequality solved with equality for theta, at the given e."""
    _check_n(n)
    with mp.workdps(digits):
        e = mpf(e)
        if e <= 0:
            raise ExponentError("e must be positive")
        E = eop0(n, digits)
        d0 = delta0(n, digits)
        k = n * n - 11 * n + 8
        return {
            "good1": (e * _q(2 * (n - 3), n + 4) - _q(29 * n * n - 38 * n - 2, (n - 2) * (n + 4))) / 3,
            "minor_theta": 4 * (3 * e + E + _q(6 * n * n - 14 * n + 1, n - 2)) / (n + 8),
            "good2": e * _q(7, n + 4) + _q(12 * n * n - 29 * n - 1, (n + 4) * (n - 2)),
            "good3": (5 * e + _q(12 * n * n - 24 * n - 1, n - 2)) / (n - 1),
            "critical": 4 * (
                e * _q(n * n - 6 * n + 4, k)
                + _q(6 * n**4 - 14 * n**3 + 13 * n * n + 10 * n - 12, (n - 2) * k)
            ) / n,
            "circle2": (E - 1) / 2,
            "circle1": (2 * n / (n - 6 * d0) - 1) / 2,
        }


def theta_of(n: int, channel: str = "printed", digits: int = DEFAULT_DIGITS) -> tuple[mpf, str]:
    """theta(n): maximum over all theta bounds at e = e(n), with the binding name."""
    e, _ = e_of(n, channel, digits)
    bounds = theta_constraints(n, e, digits)
    name = _argmax(bounds)
    return bounds[name], name


# -- the final exponent ----------------------------------------------------------------------

def not_good_bound(n: int, theta, digits: int = DEFAULT_DIGITS) -> mpf:
    """Exponent ``(n^2 - 1)/2 + theta n(n - 1)/2`` of the non-good alternative."""
    if n < 3:
        raise ExponentError("need n >= 3")
    with mp.workdps(digits):
        theta = mpf(theta)
        if theta < 1:
            raise ExponentError("need theta >= 1")
        return _q(n * n - 1, 2) + theta * _q(n * (n - 1), 2)


def e2_of(
    n: int,
    theta_override: Mapping[int, object] | None = None,
    channel: str = "printed",
    digits: int = DEFAULT_DIGITS,
) -> int:
    """Ceiling of the non-good exponent at theta(n); n > 18 reuses n = 18."""
    _check_n(n)
    m = min(n, N_CLAMP)
    with mp.workdps(digits):
        if theta_override and m in theta_override:
            theta = mpf(str(theta_override[m]))
        else:
            theta, _ = theta_of(m, channel, digits)
        return int(mp.ceil(not_good_bound(m, theta, digits)))


# -- reports -----------------------------------------------------------------------------

@dataclass(frozen=True)
class AuditEntry:
    constant: str
    printed_value: mpf
    recomputed: mpf
    abs_diff: mpf = field(init=False)

    def __post_init__(self):
        # evaluated at the caller's working precision
        object.__setattr__(self, "abs_diff", abs(self.printed_value - self.recomputed))


@dataclass(frozen=True)
class ExponentReport:
    n: int
    eoP0: mpf
    delta0: mpf
    f_at_delta0: mpf
    t_exponent: mpf
    e_constraints: dict[str, mpf]
    e_n: mpf
    binding_e: str
    theta_constraints: dict[str, mpf]
    theta_n: mpf
    binding_theta: str
    e2_n: int
    audit_flags: list[AuditEntry] = field(default_factory=list)


def exponent_report(
    n: int,
    theta_override: Mapping[int, object] | None = None,
    digits: int = DEFAULT_DIGITS,
) -> ExponentReport:
    _check_n(n)
    with mp.workdps(digits):
        E = eop0(n, digits)
        d0 = delta0(n, digits)
        ec = e_constraints(n, "printed", digits)
        binding_e = _argmax(ec)
        e = ec[binding_e]
        tc = theta_constraints(n, e, digits)
        binding_t = _argmax(tc)
        flags = []
        if n == 14:
            rc = e_constraints(14, "recomputed", digits)
            flags = [
                AuditEntry("T exponent (n=14)", mpf(PRINTED_T14), t_minor_requirement(14, digits)),
                AuditEntry("disjoint (n=14)", mpf(PRINTED_DISJOINT_14), rc["disjoint"]),
                AuditEntry("major_error (n=14)", mpf(PRINTED_MAJOR_14), rc["major_error"]),
                AuditEntry("T_upper (n=14)", mpf(PRINTED_T_UPPER_14), rc["T_upper"]),
            ]
        elif n == 15:
            flags = [AuditEntry("T minor-arc exponent (n=15)", mpf(PRINTED_T15_MINOR), t_minor_requirement(15, digits))]
        return ExponentReport(
            n=n,
            eoP0=E,
            delta0=d0,
            f_at_delta0=f_n(n, d0, digits),
            t_exponent=t_exponent(n, "printed", digits),
            e_constraints=ec,
            e_n=e,
            binding_e=binding_e,
            theta_constraints=tc,
            theta_n=tc[binding_t],
            binding_theta=binding_t,
            e2_n=e2_of(n, theta_override, "printed", digits),
            audit_flags=flags,
        )


def audit_constants(digits: int = DEFAULT_DIGITS) -> list[AuditEntry]:
    """Every printed constant of the pipeline next to its recomputation."""
    with mp.workdps(digits):
        out = list(exponent_report(14, digits=digits).audit_flags)
        out += exponent_report(15, digits=digits).audit_flags
        for n in range(14, 19):
            e_n, _ = e_of(n, "printed", digits)
            e_next, _ = e_of(n + 1, "printed", digits)
            out.append(AuditEntry(f"tabulated E({n}) vs e({n})", mpf(TABLE2_E[n]), e_n))
            out.append(AuditEntry(f"tabulated E({n}) vs e({n + 1})", mpf(TABLE2_E[n]), e_next))
        for n in range(14, 19):
            out.append(AuditEntry(f"tabulated delta({n})", mpf(TABLE2_DELTA[n]), delta0(n, digits)))
        for n in range(14, 19):
            out.append(AuditEntry(f"tabulated theta({n})", mpf(TABLE2_THETA[n]), theta_of(n, "printed", digits)[0]))
        for n in range(14, 19):
            out.append(AuditEntry(f"tabulated e2({n})", mpf(TABLE1_E2[n]), mpf(e2_of(n, digits=digits))))
        return out


def table_report(
    n_lo: int,
    n_hi: int,
    theta_override: Mapping[int, object] | None = None,
    digits: int = DEFAULT_DIGITS,
) -> tuple[list[ExponentReport], list[AuditEntry]]:
    if not (N_MIN <= n_lo <= n_hi):
        raise ExponentError(f"invalid range {n_lo}..{n_hi}; need {N_MIN} <= lo <= hi")
    rows = [exponent_report(n, theta_override, digits) for n in range(n_lo, n_hi + 1)]
    return rows, audit_constants(digits)


def e1_reference(n: int) -> Fraction:
    """Earlier 17-variable exponent, printed for comparison only."""
    if n < 17:
        raise ExponentError("defined for n >= 17")
    if n <= 20:
        return Fraction(22 * n**3 + 107 * n * n - 597 * n - 432, (n - 2) * (n - 9) * (n - 16))
    return Fraction(n**4 + 125 * n**3 + 1518 * n * n - 7236 * n - 4320, 32 * (n - 2) * (n - 9))
