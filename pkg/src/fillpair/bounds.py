"""Surface signatures and evaluation of the closed-form intersection/distance bounds.

All real-valued quantities are evaluated with mpmath at ``WORK_BITS`` bits of
precision.  Comparisons whose operands agree to within a relative ``2**-30``
raise :class:`Inconclusive` instead of guessing.

Constants that are only known to exist (the girth coefficient, the complexity
threshold, the Bowditch and Bers coefficients) are parameters; every result
that depends on them is a *parameterized* bound, never a certified one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable

import mpmath

WORK_BITS = 96
REL_TOL = mpmath.mpf(2) ** -30

PARAMETERIZED = "parameterized bound"
HEURISTIC = "heuristic (below complexity threshold)"


class SporadicSurface(ValueError):
    pass


class BelowThreshold(ValueError):
    pass


class Inconclusive(ArithmeticError):
    """Two quantities are equal to within the working error bound."""


@dataclass(frozen=True)
class SurfaceSig:
    genus: int
    punctures: int

    def __post_init__(self):
        if self.genus < 0 or self.punctures < 0:
            raise ValueError("genus and punctures must be non-negative")

    @property
    def complexity(self) -> int:
        return 3 * self.genus + self.punctures - 4

    @property
    def euler_char(self) -> int:
        return 2 - 2 * self.genus - self.punctures

    @property
    def sporadic(self) -> bool:
        return self.complexity <= 0


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class BoundParams:
    lam: Fraction = Fraction(3, 4)
    girth_coeff: Fraction = Fraction(1)
    log_dist_coeffs: tuple[Fraction, Fraction] = (Fraction(2), Fraction(2))
    r_coeff: Fraction = Fraction(1)
    bers_coeff: Fraction = Fraction(1)
    complexity_threshold: int = 0

    def __post_init__(self):
        object.__setattr__(self, "lam", _frac(self.lam))
        object.__setattr__(self, "girth_coeff", _frac(self.girth_coeff))
        object.__setattr__(self, "log_dist_coeffs", tuple(_frac(c) for c in self.log_dist_coeffs))
        object.__setattr__(self, "r_coeff", _frac(self.r_coeff))
        object.__setattr__(self, "bers_coeff", _frac(self.bers_coeff))
        if not 0 < self.lam < 1:
            raise ValueError("lambda must lie in (0, 1)")
        if self.girth_coeff <= 0 or self.r_coeff <= 0:
            raise ValueError("girth_coeff and r_coeff must be positive")
        if self.bers_coeff < 0 or self.complexity_threshold < 0:
            raise ValueError("bers_coeff and complexity_threshold must be non-negative")

    def with_(self, **kw) -> "BoundParams":
        return replace(self, **kw)

    def as_dict(self) -> dict:
        return {
            "lambda": str(self.lam),
            "girth_coeff": str(self.girth_coeff),
            "log_dist_coeffs": [str(c) for c in self.log_dist_coeffs],
            "r_coeff": str(self.r_coeff),
            "bers_coeff": str(self.bers_coeff),
            "complexity_threshold": self.complexity_threshold,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BoundParams":
        return cls(
            lam=Fraction(d.get("lambda", "3/4")),
            girth_coeff=Fraction(d.get("girth_coeff", "1")),
            log_dist_coeffs=tuple(Fraction(c) for c in d.get("log_dist_coeffs", ["2", "2"])),
            r_coeff=Fraction(d.get("r_coeff", "1")),
            bers_coeff=Fraction(d.get("bers_coeff", "1")),
            complexity_threshold=int(d.get("complexity_threshold", 0)),
        )


def mpq(x: Fraction) -> mpmath.mpf:
    x = _frac(x)
    return mpmath.mpf(x.numerator) / x.denominator


def strictly_less(a, b, tol=None) -> bool:
    """``a < b`` with an inconclusive band of relative width ``tol`` (default 2**-30)."""
    a, b = mpmath.mpf(a), mpmath.mpf(b)
    scale = max(abs(a), abs(b))
    if abs(a - b) <= (REL_TOL if tol is None else tol) * scale:
        raise Inconclusive(f"{mpmath.nstr(a, 12)} vs {mpmath.nstr(b, 12)}")
    return a < b


def complexity(sig: SurfaceSig) -> int:
    return sig.complexity


def filling_floor(sig: SurfaceSig) -> int:
    if sig.sporadic:
        raise SporadicSurface("sporadic")
    return 2 * sig.genus + sig.punctures - 2


def branch_bound(sig: SurfaceSig) -> int:
    return 18 * sig.genus + 6 * sig.punctures - 18


def girth_function(xi: int, params: BoundParams) -> mpmath.mpf:
    """f(xi) = girth_coeff * log2(2 * 50 * xi)."""
    with mpmath.workprec(WORK_BITS):
        return mpq(params.girth_coeff) * mpmath.log(100 * mpmath.mpf(xi), 2)


def contraction_ratio(xi: int, params: BoundParams) -> mpmath.mpf:
    """xi**lambda / f(xi); the per-step gain of the extraction argument."""
    if xi < 1:
        raise ValueError("xi must be >= 1")
    with mpmath.workprec(WORK_BITS):
        return mpmath.power(xi, mpq(params.lam)) / girth_function(xi, params)


def thm12_bound(xi: int, params: BoundParams, k: int) -> mpmath.mpf:
    if k < 2:
        raise ValueError("k must be >= 2")
    if k == 2:
        return mpmath.mpf(1)
    with mpmath.workprec(WORK_BITS):
        return contraction_ratio(xi, params) ** (k - 2)


def growth_regime(xi: int, params: BoundParams) -> str:
    """'increasing' when the bound grows with k, 'non-increasing' otherwise."""
    return "increasing" if strictly_less(1, contraction_ratio(xi, params)) else "non-increasing"


def distance_upper_log(i: int, params: BoundParams = BoundParams()) -> int:
    if i < 0:
        raise ValueError("intersection number must be non-negative")
    if i == 0:
        return 1
    a, b = params.log_dist_coeffs
    if i & (i - 1) == 0:
        return math.ceil(a * (i.bit_length() - 1) + b)
    if a == 0:
        return math.ceil(b)
    # a*log2(i) + b is irrational here, so the ceiling is unambiguous
    with mpmath.workprec(WORK_BITS):
        return int(mpmath.ceil(mpq(a) * mpmath.log(i, 2) + mpq(b)))


@dataclass(frozen=True)
class DistanceBound:
    value: int
    label: str
    via: str


def thm12_distance_upper(xi: int, params: BoundParams, i: int, unchecked: bool = False,
                         k_max: int = 4096) -> DistanceBound:
    if xi <= params.complexity_threshold and not unchecked:
        raise BelowThreshold("below theoretical threshold")
    label = PARAMETERIZED if xi > params.complexity_threshold else HEURISTIC
    if i == 0:
        return DistanceBound(1, label, "disjoint")
    r = contraction_ratio(xi, params)
    with mpmath.workprec(WORK_BITS):
        if strictly_less(1, r):
            bound = r
            for k in range(3, k_max + 1):
                if strictly_less(i, bound):
                    return DistanceBound(k - 1, label, "thm12")
                bound *= r
    return DistanceBound(distance_upper_log(i, params), label, "log")


@dataclass
class BowditchReport:
    xi: int
    R: mpmath.mpf
    R_sq_plus_1: mpmath.mpf
    B9: mpmath.mpf
    holds: bool
    crossover: int
    label: str = PARAMETERIZED


# Locating the crossover integer needs resolution finer than one part in xi,
# far below 2**-30; the search compares at (almost) full working precision.
SCAN_TOL = mpmath.mpf(2) ** -80


def _bowditch_holds(xi: int, params: BoundParams, tol=SCAN_TOL) -> bool:
    with mpmath.workprec(WORK_BITS):
        R = mpq(params.r_coeff) * mpmath.power(xi, mpmath.mpf(5) / 2)
        return strictly_less(R * R + 1, thm12_bound(xi, params.with_(lam=Fraction(6, 7)), 9), tol)


def _least_true(pred: Callable[[int], bool], lo: int) -> int:
    """Least integer >= lo where a predicate that is monotone on [lo, oo) becomes true."""
    if pred(lo):
        return lo
    hi = max(lo + 1, 2 * lo)
    while not pred(hi):
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


# Above this complexity xi / f(xi)**7 is increasing, so the Bowditch predicate is monotone.
_BOWDITCH_MONOTONE_FROM = 11


def bowditch_chain_report(xi: int, params: BoundParams = BoundParams(), window: int = 64) -> BowditchReport:
    if xi < 1:
        raise ValueError("xi must be >= 1")
    p67 = params.with_(lam=Fraction(6, 7))
    with mpmath.workprec(WORK_BITS):
        R = mpq(params.r_coeff) * mpmath.power(xi, mpmath.mpf(5) / 2)
        B9 = thm12_bound(xi, p67, 9)
        holds = strictly_less(R * R + 1, B9)
    pred = lambda x: _bowditch_holds(x, params)
    start = xi
    # below the monotone range check integers one at a time
    while start < _BOWDITCH_MONOTONE_FROM:
        if pred(start) and all(pred(x) for x in range(start, _BOWDITCH_MONOTONE_FROM + 1)):
            break
        start += 1
    crossover = start if start < _BOWDITCH_MONOTONE_FROM else _least_true(pred, start)
    for j in range(window):
        if not pred(crossover * 2 ** j):
            raise AssertionError(f"predicate fails past crossover at {crossover * 2 ** j}")
    return BowditchReport(xi, R, R * R + 1, B9, holds, crossover)


@dataclass
class TeichReport:
    sig: SurfaceSig
    bers: mpmath.mpf
    E: mpmath.mpf
    i_bound: int
    d_bound: int
    label: str = PARAMETERIZED
    threshold: int | None = None
    c: int | None = None
    trace: list = field(default_factory=list, repr=False)


def _teich_point(xi: int, bers_coeff: Fraction, params: BoundParams):
    with mpmath.workprec(WORK_BITS):
        bers = mpq(bers_coeff) * mpmath.log(xi, 2)
        E = (bers / 2) * mpmath.exp(bers / 2)
        i_bound = int(mpmath.ceil(mpmath.e * E))
    log_d = distance_upper_log(i_bound, params)
    if xi > params.complexity_threshold:
        d = min(thm12_distance_upper(xi, params, i_bound).value, log_d)
    else:
        d = log_d
    return bers, E, i_bound, d


def teich_threshold(bers_coeff: Fraction, params: BoundParams, scan_to: int = 20000) -> tuple[int, int]:
    """Least xi after which d_bound <= 4 throughout the scan, and the constant c."""
    last_bad = 0
    worst = 4
    for x in range(1, scan_to + 1):
        _, _, i_b, d = _teich_point(x, bers_coeff, params)
        if d > 4:
            last_bad = x
    for x in range(1, last_bad + 1):
        _, _, i_b, _ = _teich_point(x, bers_coeff, params)
        worst = max(worst, distance_upper_log(i_b, params))
    return last_bad + 1, worst


def teich_chain_report(sig: SurfaceSig, bers_coeff=None, params: BoundParams = BoundParams(),
                       scan_to: int | None = 20000) -> TeichReport:
    if sig.sporadic:
        raise SporadicSurface("sporadic")
    bc = params.bers_coeff if bers_coeff is None else _frac(bers_coeff)
    bers, E, i_b, d = _teich_point(sig.complexity, bc, params)
    rep = TeichReport(sig, bers, E, i_b, d)
    if scan_to:
        rep.threshold, rep.c = teich_threshold(bc, params, scan_to)
    return rep
