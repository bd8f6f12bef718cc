import decimal
from decimal import Decimal
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fillpair.bounds import (BelowThreshold, BoundParams, Inconclusive, SporadicSurface, SurfaceSig,
                             _bowditch_holds, bowditch_chain_report, branch_bound, contraction_ratio, distance_upper_log,
                             filling_floor, growth_regime, strictly_less, teich_chain_report, thm12_bound,
                             thm12_distance_upper)

P = BoundParams()


def dec_bound(xi: int, lam: Fraction, g: Fraction, k: int) -> Decimal:
    """(xi**lam / (g * log2(100 xi)))**(k-2) in 60-digit decimal arithmetic."""
    with decimal.localcontext() as ctx:
        ctx.prec = 60
        x = Decimal(xi)
        num = (Decimal(lam.numerator) / Decimal(lam.denominator) * x.ln()).exp()
        f = Decimal(g.numerator) / Decimal(g.denominator) * (Decimal(100) * x).ln() / Decimal(2).ln()
        return (num / f) ** (k - 2)


# values from the decimal oracle above, frozen
B3_100 = Decimal("2.37985107582")
B4_100 = Decimal("5.66369114309")


def close(a, b, rel=Decimal(2) ** -40):
    a, b = Decimal(str(a)), Decimal(str(b))
    return abs(a - b) <= rel * max(abs(a), abs(b))


def test_oracle_values_frozen():
    assert abs(dec_bound(100, Fraction(3, 4), Fraction(1), 3) - B3_100) < Decimal("1e-11")
    assert abs(dec_bound(100, Fraction(3, 4), Fraction(1), 4) - B4_100) < Decimal("1e-11")


def test_thm12_examples():
    with mpmath.workprec(96):
        assert thm12_bound(100, P, 2) == 1
        assert close(mpmath.nstr(thm12_bound(100, P, 3), 25), dec_bound(100, Fraction(3, 4), Fraction(1), 3))
        assert close(mpmath.nstr(thm12_bound(100, P, 4), 25), dec_bound(100, Fraction(3, 4), Fraction(1), 4))
    assert abs(float(thm12_bound(100, P, 3)) - 2.3799) < 1e-4
    assert abs(float(thm12_bound(100, P, 4)) - 5.664) < 1e-3


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10 ** 6), st.fractions(Fraction(1, 100), Fraction(99, 100)),
       st.fractions(Fraction(1, 10), Fraction(10)), st.integers(2, 40))
def test_against_decimal_oracle(xi, lam, g, k):
    p = BoundParams(lam=lam, girth_coeff=g)
    with mpmath.workprec(96):
        assert close(mpmath.nstr(thm12_bound(xi, p, k), 30), dec_bound(xi, lam, g, k), Decimal(2) ** -30)


@settings(max_examples=500, deadline=None)
@given(st.integers(1, 10 ** 9), st.fractions(Fraction(1, 1000), Fraction(999, 1000)), st.integers(2, 200))
def test_multiplicative_in_k(xi, lam, k):
    p = BoundParams(lam=lam)
    with mpmath.workprec(96):
        lhs = thm12_bound(xi, p, k + 1)
        rhs = thm12_bound(xi, p, k) * contraction_ratio(xi, p)
        assert abs(lhs - rhs) <= mpmath.mpf(2) ** -30 * abs(lhs)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10 ** 7), st.fractions(Fraction(1, 100), Fraction(99, 100)))
def test_regime_matches_monotonicity(xi, lam):
    p = BoundParams(lam=lam)
    try:
        regime = growth_regime(xi, p)
    except Inconclusive:
        return
    b3, b4 = thm12_bound(xi, p, 3), thm12_bound(xi, p, 4)
    assert (regime == "increasing") == (b4 > b3)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10 ** 6), st.integers(0, 10 ** 6))
def test_distance_upper_properties(xi, i):
    try:
        d = thm12_distance_upper(xi, P, i)
    except Inconclusive:
        return
    assert d.value >= 1
    if d.via == "thm12":
        assert thm12_bound(xi, P, d.value + 1) > i
    if i:
        assert d.value <= max(distance_upper_log(i), 2) or d.via != "log"


def test_distance_upper_examples():
    assert thm12_distance_upper(100, P, 0).value == 1
    assert thm12_distance_upper(100, P, 2).value == 2
    assert thm12_distance_upper(100, P, 5).value == 3
    with pytest.raises(BelowThreshold):
        thm12_distance_upper(10, P.with_(complexity_threshold=50), 5)
    h = thm12_distance_upper(10, P.with_(complexity_threshold=50), 5, unchecked=True)
    assert h.label.startswith("heuristic")


def test_log_bound_examples():
    assert distance_upper_log(0) == 1
    assert distance_upper_log(1) == 2
    assert distance_upper_log(16) == 10


@pytest.mark.parametrize("g,p,xi", [(2, 0, 2), (0, 5, 1), (1, 1, 0)])
def test_complexity(g, p, xi):
    s = SurfaceSig(g, p)
    assert s.complexity == xi
    assert s.sporadic == (xi <= 0)


def test_filling_floor():
    assert filling_floor(SurfaceSig(2, 0)) == 2
    assert filling_floor(SurfaceSig(1, 2)) == 2
    with pytest.raises(SporadicSurface):
        filling_floor(SurfaceSig(1, 0))


@given(st.integers(0, 50), st.integers(0, 50))
def test_algebraic_identities(g, p):
    s = SurfaceSig(g, p)
    assert 2 * g + p - 2 == -(2 - 2 * g - p)
    assert branch_bound(s) == -9 * s.euler_char - 3 * p
    if not s.sporadic:
        assert filling_floor(s) == -s.euler_char


def test_branch_bound_examples():
    assert branch_bound(SurfaceSig(2, 0)) == 18
    assert branch_bound(SurfaceSig(1, 1)) == 6
    assert branch_bound(SurfaceSig(0, 4)) == 6


def test_bowditch_small_xi():
    r = bowditch_chain_report(2, P)
    assert r.R_sq_plus_1 == 33 and not r.holds
    assert r.B9 < 1
    with mpmath.workprec(96):
        assert r.B9 == thm12_bound(2, P.with_(lam=Fraction(6, 7)), 9)


def test_bowditch_crossover_finite_and_monotone():
    xs = [bowditch_chain_report(2, P.with_(r_coeff=Fraction(r))).crossover for r in ("1/4", "1", "4")]
    assert xs == sorted(xs) and len(set(xs)) == 3
    for r, x in zip(("1/4", "1", "4"), xs):
        q = P.with_(r_coeff=Fraction(r))
        # the crossover sits inside the default comparison band, so check at scan tolerance
        assert _bowditch_holds(x, q) and not _bowditch_holds(x - 1, q)


def test_teich_degenerate_and_monotone():
    t = teich_chain_report(SurfaceSig(2, 0), bers_coeff=0, scan_to=None)
    assert t.E == 0 and t.i_bound == 0 and t.d_bound == 1
    prev = -1
    for b in ("1/2", "1", "2", "3"):
        t = teich_chain_report(SurfaceSig(5, 3), bers_coeff=Fraction(b), scan_to=None)
        assert t.i_bound >= prev
        prev = t.i_bound
    with pytest.raises(SporadicSurface):
        teich_chain_report(SurfaceSig(1, 1))


def test_strictly_less_band():
    assert strictly_less(1, 2)
    with pytest.raises(Inconclusive):
        strictly_less(1, 1 + 2.0 ** -40)


def test_params_round_trip():
    p = BoundParams(lam=Fraction(5, 7), girth_coeff=Fraction(3, 2), r_coeff=Fraction(1, 4),
                    complexity_threshold=3)
    assert BoundParams.from_dict(p.as_dict()) == p
    with pytest.raises(ValueError):
        BoundParams(lam=Fraction(1))
