"""
Counting smooth numbers: Psi(n, y) by enumeration and by recursion.
"""

import math
import threading
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .core_arith import DEFAULT_SIEVE_BUDGET, PrimeTable, sieve_primes
from .exceptions import CapacityError, RecursionBudgetError
from .logger import get_logger
from .reporting import InequalityCheck, VerificationReport
from .utils import Number, as_fraction, ceil_power, compare_power, floor_power

logger = get_logger("smooth")

DEFAULT_MEMO_CAP = 10_000_000


class SmoothMethod(str, Enum):
    ENUMERATIVE = "enumerative"
    RECURSIVE = "recursive"


@dataclass(frozen=True)
class SmoothCount:
    n: Fraction
    y: Fraction
    value: int
    method: SmoothMethod

    def to_row(self) -> dict:
        return {"n": self.n, "y": self.y, "psi": self.value, "method": self.method.value}


@dataclass(frozen=True)
class SmoothConstant:
    """Smallest observed Psi(n, n^(1/u))/n over integers 1 <= n <= n_max."""

    u: Fraction
    n_max: int
    c_empirical: Fraction
    argmin_n: int
    # min of Psi(n, n^(1/u))/(n+1): a lower bound for real x in [1, n_max+1)
    c_real_lower: Fraction
    real_argmin_n: int

    @property
    def adjustment_factor(self) -> Fraction:
        return Fraction(self.argmin_n, self.argmin_n + 1)

    def to_row(self) -> dict:
        return {
            "u": self.u,
            "n_max": self.n_max,
            "c_empirical": self.c_empirical,
            "argmin_n": self.argmin_n,
            "adjustment": self.adjustment_factor,
            "c_real_lower": self.c_real_lower,
            "real_argmin_n": self.real_argmin_n,
        }


@dataclass(frozen=True, eq=False)
class LargestPrimeFactorTable:
    """table[m] is the largest prime factor of m; table[1] = 1, table[0] = 0."""

    limit: int
    table: np.ndarray

    def __post_init__(self):
        self.table.flags.writeable = False

    def __getitem__(self, m: int) -> int:
        return int(self.table[m])

    def __len__(self) -> int:
        return self.limit + 1

    def count_smooth(self, n: int, y: int) -> int:
        """Psi(n, y) for integers n <= limit."""
        if n > self.limit:
            raise ValueError(f"n={n} is beyond this table's limit {self.limit}")
        if n < 1:
            return 0
        return int(np.count_nonzero(self.table[1 : n + 1] <= y))

    def smooth_prefix_counts(self, y: int, n_max: Optional[int] = None) -> np.ndarray:
        """Array c with c[n] = Psi(n, y) for 0 <= n <= n_max."""
        n_max = self.limit if n_max is None else n_max
        counts = np.zeros(n_max + 1, dtype=np.int64)
        counts[1:] = np.cumsum(self.table[1 : n_max + 1] <= y, dtype=np.int64)
        return counts

    def smooth_counts_by_bound(self, n: int, y_max: int) -> np.ndarray:
        """Array c with c[y] = Psi(n, y) for 0 <= y <= y_max, one pass over [1, n]."""
        values = self.table[1 : n + 1]
        hist = np.bincount(values[values <= y_max], minlength=y_max + 1)
        return np.cumsum(hist)


def largest_prime_factor_table(
    limit: int,
    primes: Optional[PrimeTable] = None,
    budget_bytes: int = DEFAULT_SIEVE_BUDGET,
) -> LargestPrimeFactorTable:
    """
    Largest prime factor of every m <= limit.

    Primes are written over their multiples in increasing order, so the last
    write to a slot is its largest prime factor.
    """
    if limit < 2:
        raise ValueError(f"limit must be at least 2, got {limit}")
    dtype = np.int32 if limit < 2**31 else np.int64
    needed = (limit + 1) * np.dtype(dtype).itemsize
    if needed > budget_bytes:
        raise CapacityError(
            f"A factor table to {limit} needs {needed:,} bytes, "
            f"over the budget of {budget_bytes:,} bytes"
        )
    if primes is None or primes.limit < limit:
        primes = sieve_primes(limit, budget_bytes=budget_bytes)
    table = np.ones(limit + 1, dtype=dtype)
    table[0] = 0
    for p in primes.upto(limit).tolist():
        table[p::p] = p
    logger.debug(f"largest prime factor table built to {limit}")
    return LargestPrimeFactorTable(limit, table)


def _floor_arguments(n: Number, y: Number) -> Tuple[Fraction, Fraction, int, int]:
    n_q, y_q = as_fraction(n), as_fraction(y)
    if n_q < 1:
        raise ValueError(f"n must be at least 1, got {n_q}")
    if y_q < 1:
        raise ValueError(f"y must be at least 1, got {y_q}")
    return n_q, y_q, math.floor(n_q), math.floor(y_q)


def psi_enumerate(
    n: Number,
    y: Number,
    table: Optional[LargestPrimeFactorTable] = None,
    budget_bytes: int = DEFAULT_SIEVE_BUDGET,
) -> SmoothCount:
    """Psi(n, y) by scanning a largest-prime-factor table."""
    n_q, y_q, m, y_int = _floor_arguments(n, y)
    if m < 2:
        return SmoothCount(n_q, y_q, 1, SmoothMethod.ENUMERATIVE)
    if table is None or table.limit < m:
        table = largest_prime_factor_table(m, budget_bytes=budget_bytes)
    return SmoothCount(n_q, y_q, table.count_smooth(m, y_int), SmoothMethod.ENUMERATIVE)


class SmoothCounter:
    """
    Memoised Psi over canonical states (floor(n), pi(y)).

    A state (m, k) counts the integers in [1, m] whose prime factors are all
    among the first k primes. It satisfies
    Psi(m, k) = Psi(m, k-1) + Psi(m // p_k, k), the one-prime difference of
    the largest-prime-factor decomposition. Evaluation uses an explicit
    stack, so deep states do not hit the interpreter's recursion limit.
    """

    def __init__(self, primes: PrimeTable, memo_cap: int = DEFAULT_MEMO_CAP):
        self.table = primes
        self._primes = primes.tolist()
        self.memo_cap = memo_cap
        self.memo: Dict[Tuple[int, int], int] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.memo)

    def _known(self, m: int, k: int) -> Optional[int]:
        if m <= 1:
            return m
        if k == 0:
            return 1
        if self._primes[k - 1] >= m:
            return m
        if k == 1:
            return m.bit_length()
        return self.memo.get((m, k))

    def count(self, m: int, k: int) -> int:
        """Psi(m, p_k) for the k-th prime p_k (k = 0 means only 1 is smooth)."""
        if k > len(self._primes):
            raise ValueError(f"only {len(self._primes)} primes are available, asked for {k}")
        value = self._known(m, k)
        if value is not None:
            return value
        primes = self._primes
        stack = [(m, k)]
        while stack:
            top_m, top_k = stack[-1]
            if (top_m, top_k) in self.memo:
                stack.pop()
                continue
            smaller = self._known(top_m, top_k - 1)
            divided = self._known(top_m // primes[top_k - 1], top_k)
            if smaller is None:
                stack.append((top_m, top_k - 1))
            if divided is None:
                stack.append((top_m // primes[top_k - 1], top_k))
            if smaller is None or divided is None:
                continue
            with self._lock:
                if len(self.memo) >= self.memo_cap:
                    raise RecursionBudgetError(
                        f"Psi recursion needs more than {self.memo_cap:,} memo entries"
                    )
                self.memo[(top_m, top_k)] = smaller + divided
            stack.pop()
        return self.memo[(m, k)]

    def psi(self, n: Number, y: Number) -> int:
        """Psi(n, y) for real n >= 1 (n < 1 counts nothing) and real y >= 1."""
        n_q = as_fraction(n)
        if n_q < 1:
            return 0
        m, y_int = math.floor(n_q), math.floor(as_fraction(y))
        if y_int >= m:
            return m
        if y_int > self.table.limit:
            raise ValueError(f"y={y_int} is beyond the prime table's limit {self.table.limit}")
        return self.count(m, self.table.count_upto(y_int))


def psi_recursive(
    n: Number,
    y: Number,
    counter: Optional[SmoothCounter] = None,
    memo_cap: int = DEFAULT_MEMO_CAP,
) -> SmoothCount:
    """Psi(n, y) from the largest-prime-factor decomposition, memoised."""
    n_q, y_q, m, y_int = _floor_arguments(n, y)
    if counter is None or counter.table.limit < min(y_int, m):
        counter = SmoothCounter(sieve_primes(max(2, min(y_int, m))), memo_cap)
    return SmoothCount(n_q, y_q, counter.psi(m, y_int), SmoothMethod.RECURSIVE)


def decomposition_residual(n: Number, y: Number, counter: Optional[SmoothCounter] = None) -> int:
    """Psi(n, y) - 1 - sum over p <= y of Psi(n/p, p), evaluated term by term."""
    _, _, m, y_int = _floor_arguments(n, y)
    if counter is None or counter.table.limit < y_int:
        counter = SmoothCounter(sieve_primes(max(2, y_int)))
    total = counter.psi(m, y_int)
    decomposed = 1 + sum(counter.psi(m // p, p) for p in counter.table.upto(y_int).tolist())
    return total - decomposed


def verify_decomposition(n_max: int, table: Optional[LargestPrimeFactorTable] = None) -> VerificationReport:
    """
    The decomposition identity for every n <= n_max and every y, enumeratively.

    Psi(n, y) only changes with y at primes, and for y < 2 both sides are 1,
    so checking each prime y = p <= n_max covers every real y.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    if table is None or table.limit < n_max:
        table = largest_prime_factor_table(n_max)
    index = np.arange(n_max + 1)
    accumulated = np.zeros(n_max + 1, dtype=np.int64)
    worst = 0
    checked = 0
    primes = [int(v) for v in np.unique(table.table[2 : n_max + 1])]
    for p in primes:
        counts = table.smooth_prefix_counts(p, n_max)
        accumulated += counts[index // p]
        residual = counts[1:] - 1 - accumulated[1:]
        worst = max(worst, int(np.abs(residual).max()))
        checked += n_max
    return VerificationReport(
        "psi-decomposition",
        {"n_max": n_max, "prime_bounds": len(primes)},
        (InequalityCheck("max |residual|", worst, 0, "=="),),
        (f"{checked} (n, y) pairs checked",),
    )


def cross_check_methods(
    n_values: Sequence[int],
    y_values: Sequence[int],
    table: LargestPrimeFactorTable,
    counter: SmoothCounter,
) -> VerificationReport:
    """Compare enumeration against recursion on every (n, y) in the grid."""
    mismatches = 0
    for y in y_values:
        counts = table.smooth_prefix_counts(int(y), max(n_values))
        for n in n_values:
            if int(counts[n]) != counter.psi(n, y):
                mismatches += 1
                logger.error(f"Psi({n}, {y}) differs between methods")
    return VerificationReport(
        "psi-cross-check",
        {"n_count": len(n_values), "y_count": len(y_values)},
        (InequalityCheck("mismatches", mismatches, 0, "=="),),
    )


def empirical_smooth_constant(
    u: Number,
    n_max: int,
    table: Optional[LargestPrimeFactorTable] = None,
    budget_bytes: int = DEFAULT_SIEVE_BUDGET,
) -> SmoothConstant:
    """
    min over integers 1 <= n <= n_max of Psi(n, n^(1/u))/n.

    m <= n is n^(1/u)-smooth iff n >= ceil(P(m)^u), where P(m) is the largest
    prime factor of m; each m therefore enters the count at
    max(m, ceil(P(m)^u)), computed with exact integer powers.
    """
    u_q = as_fraction(u)
    if u_q <= 0:
        raise ValueError(f"u must be positive, got {u_q}")
    if n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max}")
    if n_max == 1:
        return SmoothConstant(u_q, 1, Fraction(1), 1, Fraction(1, 2), 1)
    if table is None or table.limit < n_max:
        table = largest_prime_factor_table(n_max, budget_bytes=budget_bytes)

    entry = np.full(n_max + 1, n_max + 1, dtype=np.int64)
    entry[1] = 1
    for q in np.unique(table.table[2 : n_max + 1]).tolist():
        if compare_power(n_max, q, u_q) < 0:
            break
        entry[q] = ceil_power(q, u_q)
    ms = np.arange(1, n_max + 1, dtype=np.int64)
    start = np.maximum(ms, entry[table.table[1 : n_max + 1]])
    counts = np.cumsum(np.bincount(start, minlength=n_max + 2))[1 : n_max + 1]

    c, argmin = _exact_min_ratio(counts, ms)
    c_real, real_argmin = _exact_min_ratio(counts, ms + 1)
    return SmoothConstant(u_q, n_max, c, int(argmin), c_real, int(real_argmin - 1))


def _exact_min_ratio(numerators: np.ndarray, denominators: np.ndarray) -> Tuple[Fraction, int]:
    ratios = numerators / denominators
    floor = ratios.min()
    candidates = np.flatnonzero(ratios <= floor * (1 + 1e-9))
    best = min(
        (Fraction(int(numerators[i]), int(denominators[i])), int(denominators[i]))
        for i in candidates.tolist()
    )
    return best


def induction_step_check(
    n: Number,
    u: Number,
    counter: Optional[SmoothCounter] = None,
    memo_cap: int = DEFAULT_MEMO_CAP,
) -> VerificationReport:
    """
    The inductive step of the smooth-number lemma on concrete data.

    With u' = u + 1/2, Psi(n, n^(1/u)) is at least the sum of Psi(n/p, p)
    over primes n^(1/u') < p <= n^(1/u), and each such p has
    log(n/p)/log(p) <= u - 1/2.
    """
    n_q, u_q = as_fraction(n), as_fraction(u)
    if u_q <= 1:
        raise ValueError(f"u must exceed 1, got {u_q}")
    if n_q < 1:
        raise ValueError(f"n must be at least 1, got {n_q}")
    u_next = u_q + Fraction(1, 2)
    y_hi = floor_power(n_q, 1 / u_q)
    y_lo = floor_power(n_q, 1 / u_next)
    m = math.floor(n_q)
    if counter is None or counter.table.limit < y_hi:
        counter = SmoothCounter(sieve_primes(max(2, y_hi)), memo_cap)

    window = counter.table.between(y_lo, y_hi).tolist()
    lhs = counter.psi(m, y_hi)
    rhs = sum(counter.psi(m // p, p) for p in window)
    # log(n/p)/log(p) <= u - 1/2  iff  n <= p^(u + 1/2)
    exponent_violations = sum(1 for p in window if compare_power(n_q, p, u_next) > 0)
    return VerificationReport(
        "smooth-induction-step",
        {"n": n_q, "u": u_q, "window": f"({y_lo},{y_hi}]", "primes": len(window)},
        (
            InequalityCheck("sum Psi(n/p,p) <= Psi(n,n^(1/u))", rhs, lhs),
            InequalityCheck("primes with log(n/p)/log p > u-1/2", exponent_violations, 0, "=="),
        ),
    )
