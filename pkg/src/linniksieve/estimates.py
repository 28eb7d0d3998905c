"""
The weak Mertens bound and the prime-valuation identities behind it.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .core_arith import DEFAULT_SIEVE_BUDGET, PrimeTable, sieve_primes
from .logger import get_logger
from .parallel import ordered_map
from .reporting import InequalityCheck, VerificationReport
from .utils import Number, as_fraction, floor_power, integer_log

logger = get_logger("estimates")

DEFAULT_EXACT_WINDOW_PRIMES = 10_000

Real = Union[Fraction, float]


@dataclass(frozen=True)
class MertensWindow:
    """Sum of 1/p over the primes in (n^(1-eps), n]."""

    n: Fraction
    eps: Fraction
    lo: int  # floor(n^(1-eps)); members satisfy p > lo
    hi: int  # floor(n)
    prime_count: int
    total: Real
    exact: bool
    error_bound: float = 0.0

    @property
    def value(self) -> float:
        return float(self.total)

    @property
    def defect(self) -> Real:
        if self.exact:
            return self.total - self.eps
        return float(self.total) - float(self.eps)

    def to_row(self) -> dict:
        return {
            "n": self.n,
            "eps": self.eps,
            "lo": self.lo,
            "hi": self.hi,
            "primes": self.prime_count,
            "sum": self.total if self.exact else float(self.total),
            "defect": self.defect,
            "exact": self.exact,
            "error_bound": self.error_bound,
        }


@dataclass(frozen=True)
class MultinomialSpec:
    """The parts a_1, ..., a_t of a multinomial coefficient n!/(a_1!...a_t!)."""

    parts: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(int(a) for a in self.parts))
        if not self.parts:
            raise ValueError("a multinomial needs at least one part")
        if any(a < 0 for a in self.parts):
            raise ValueError(f"parts must be non-negative: {self.parts}")

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def t(self) -> int:
        return len(self.parts)


def _require_prime_base(p: int) -> None:
    if p < 2:
        raise ValueError(f"p must be a prime >= 2, got {p}")


def factorial_prime_valuation(n: int, p: int) -> int:
    """Exponent of p in n!, i.e. sum over k of floor(n / p^k)."""
    _require_prime_base(p)
    if n < 0:
        raise ValueError("n must be non-negative")
    total = 0
    while n:
        n //= p
        total += n
    return total


def multinomial_prime_valuation(spec: MultinomialSpec, p: int) -> int:
    """Exponent of p in n!/(a_1!...a_t!)."""
    _require_prime_base(p)
    return factorial_prime_valuation(spec.n, p) - sum(
        factorial_prime_valuation(a, p) for a in spec.parts
    )


def check_valuation_bounds(spec: MultinomialSpec, p: int) -> VerificationReport:
    """Both upper bounds on the multinomial valuation used in the Mertens proof."""
    _require_prime_base(p)
    n, t = spec.n, spec.t
    if n < 1:
        raise ValueError("check_valuation_bounds needs n >= 1")
    v = multinomial_prime_valuation(spec, p)
    return VerificationReport(
        "valuation-bounds",
        {"parts": ",".join(map(str, spec.parts)), "p": p},
        (
            InequalityCheck("valuation >= 0", 0, v),
            InequalityCheck(
                "v_p(n!) <= (n-1)/(p-1)",
                factorial_prime_valuation(n, p),
                Fraction(n - 1, p - 1),
            ),
            InequalityCheck("valuation <= n/(p-1)", v, Fraction(n, p - 1)),
            InequalityCheck("valuation <= t*floor(log_p n)", v, t * integer_log(n, p)),
        ),
    )


def check_multinomial_mass(n: int, t: int) -> VerificationReport:
    """
    The counting step of the Mertens proof.

    t^n is the sum of C(n+t-1, t-1) <= (n+1)^t multinomial coefficients, so
    the largest one, attained at the balanced composition, is at least
    t^n/(n+1)^t.
    """
    if n < 0 or t < 1:
        raise ValueError("check_multinomial_mass needs n >= 0 and t >= 1")
    q, r = divmod(n, t)
    parts = [q + 1] * r + [q] * (t - r)
    coefficient = math.factorial(n)
    for a in parts:
        coefficient //= math.factorial(a)
    return VerificationReport(
        "multinomial-mass",
        {"n": n, "t": t},
        (
            InequalityCheck("compositions <= (n+1)^t", math.comb(n + t - 1, t - 1), (n + 1) ** t),
            InequalityCheck("t^n <= max coefficient * (n+1)^t", t**n, coefficient * (n + 1) ** t),
        ),
    )


def _reciprocal_sum(values: Sequence[int]) -> Tuple[int, int]:
    """Numerator and denominator of sum(1/v) by binary splitting."""
    if len(values) == 1:
        return 1, int(values[0])
    mid = len(values) // 2
    a, b = _reciprocal_sum(values[:mid])
    c, d = _reciprocal_sum(values[mid:])
    return a * d + b * c, b * d


def exact_reciprocal_sum(values: Sequence[int]) -> Fraction:
    if len(values) == 0:
        return Fraction(0)
    num, den = _reciprocal_sum(list(values))
    return Fraction(num, den)


def _window_bounds(n: Fraction, eps: Fraction) -> Tuple[int, int]:
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    return floor_power(n, 1 - eps), math.floor(n)


def prime_reciprocal_sum(
    n: Number,
    eps: Number,
    primes: Optional[PrimeTable] = None,
    exact_limit: int = DEFAULT_EXACT_WINDOW_PRIMES,
    budget_bytes: int = DEFAULT_SIEVE_BUDGET,
) -> MertensWindow:
    """
    Sum of 1/p over primes n^(1-eps) < p <= n.

    Windows of at most ``exact_limit`` primes are summed exactly; larger ones
    with ``math.fsum`` and an error bound.
    """
    n_q, eps_q = as_fraction(n), as_fraction(eps)
    lo, hi = _window_bounds(n_q, eps_q)
    if primes is None or primes.limit < hi:
        primes = sieve_primes(hi, budget_bytes=budget_bytes)
    window = primes.between(lo, hi)

    if window.size <= exact_limit:
        total: Real = exact_reciprocal_sum(window.tolist())
        return MertensWindow(n_q, eps_q, lo, hi, int(window.size), total, True)

    approx = math.fsum(np.reciprocal(window.astype(np.float64)).tolist())
    # each term and the final fsum are correctly rounded
    error = approx * 2.0**-52
    logger.debug(f"window ({lo}, {hi}] has {window.size} primes, summed in floating point")
    return MertensWindow(n_q, eps_q, lo, hi, int(window.size), approx, False, error)


def check_reciprocal_shift(
    n: Number, eps: Number, primes: Optional[PrimeTable] = None
) -> VerificationReport:
    """
    The telescoping step: over r < p <= n with r = n^(1-eps),
    sum 1/(p-1) - sum 1/p <= 1/floor(r).
    """
    n_q, eps_q = as_fraction(n), as_fraction(eps)
    lo, hi = _window_bounds(n_q, eps_q)
    if primes is None or primes.limit < hi:
        primes = sieve_primes(hi)
    window = primes.between(lo, hi).tolist()
    by_p = exact_reciprocal_sum(window)
    by_p_minus_one = exact_reciprocal_sum([p - 1 for p in window])
    return VerificationReport(
        "reciprocal-shift",
        {"n": n_q, "eps": eps_q},
        (
            InequalityCheck("sum 1/p <= sum 1/(p-1)", by_p, by_p_minus_one),
            InequalityCheck(
                "sum 1/(p-1) - sum 1/p <= 1/floor(r)",
                by_p_minus_one - by_p,
                Fraction(1, lo),
            ),
        ),
    )


def scan_windows(
    eps: Number,
    n_grid: Sequence[Number],
    primes: Optional[PrimeTable] = None,
    threads: int = 1,
    exact_limit: int = DEFAULT_EXACT_WINDOW_PRIMES,
    budget_bytes: int = DEFAULT_SIEVE_BUDGET,
) -> List[MertensWindow]:
    """One Mertens window per grid point, sharing a single sieve."""
    grid = [as_fraction(n) for n in n_grid]
    if not grid:
        return []
    if any(n < 2 for n in grid):
        raise ValueError("grid values must be at least 2")
    top = math.floor(max(grid))
    if primes is None or primes.limit < top:
        primes = sieve_primes(top, budget_bytes=budget_bytes)
    return ordered_map(
        lambda n: prime_reciprocal_sum(n, eps, primes, exact_limit), grid, threads
    )


def mertens_defect_scan(
    eps: Number,
    n_grid: Sequence[Number],
    primes: Optional[PrimeTable] = None,
    threads: int = 1,
) -> List[Tuple[Fraction, Real]]:
    """(n, sum - eps) over the grid."""
    return [(w.n, w.defect) for w in scan_windows(eps, n_grid, primes, threads)]


def first_stable_nonnegative(points: Sequence[Tuple[Fraction, Real]]) -> Optional[Fraction]:
    """
    The grid point from which every later defect is non-negative, or None.

    This only describes the scanned grid; it certifies nothing beyond it.
    """
    stable: Optional[Fraction] = None
    for n, defect in points:
        if defect < 0:
            stable = None
        elif stable is None:
            stable = n
    return stable
