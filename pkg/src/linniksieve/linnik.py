"""
Linnik's theorem on concrete data.

For a census of primes p <= N with n_p > B, the quadratic residue sets
A_p = {x <= n : (x/p) = 1} are fed through the sieve inequality at n = N^3,
which yields (d+1) Psi(N^3, B) <= (5 + d/B^2) N^3.
"""

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core_arith import (
    DEFAULT_SIEVE_BUDGET,
    LeastNonResidue,
    PrimeTable,
    ResidueCensus,
    least_nonresidue_table,
    legendre_symbol,
    nonresidue_census,
    sieve_primes,
)
from .exceptions import CapacityError, EnumerationBudgetError
from .logger import get_logger
from .parallel import ordered_map
from .reporting import InequalityCheck, VerificationReport
from .sieve_core import SieveFamily, tally
from .smooth import (
    DEFAULT_MEMO_CAP,
    LargestPrimeFactorTable,
    SmoothCounter,
    empirical_smooth_constant,
    largest_prime_factor_table,
)
from .utils import Number, as_fraction, ceil_power, compare_power, floor_power

logger = get_logger("linnik")

DEFAULT_CROSS_CHECK_LIMIT = 10_000_000
DEFAULT_REPLAY_LIMIT = 1_000_000
DEFAULT_CLOSURE_PAIRS = 50_000_000


@functools.lru_cache(maxsize=1024)
def _residue_classes(p: int) -> np.ndarray:
    """classes[r] is True iff r is a quadratic residue mod p; one symbol per class."""
    classes = np.zeros(p, dtype=bool)
    for r in range(1, p):
        classes[r] = legendre_symbol(r, p) == 1
    classes.flags.writeable = False
    return classes


def residue_mask(p: int, n: int) -> np.ndarray:
    """mask[x - 1] is True iff x is in A_p, for x = 1..n."""
    classes = _residue_classes(p)
    return classes[np.arange(1, n + 1, dtype=np.int64) % p]


def _class_counts(modulus: int, n: int) -> np.ndarray:
    """counts[c] = #{1 <= x <= n : x = c mod modulus}."""
    c = np.arange(modulus, dtype=np.int64)
    counts = np.where(c <= n, (n - c) // modulus + 1, 0)
    counts[0] = n // modulus
    return counts


@dataclass(frozen=True)
class ResidueSetStats:
    p: int
    n: int
    size_A: int
    size_Ac: int
    lower_bound: Fraction
    elements: Optional[Tuple[int, ...]] = field(default=None, compare=False)

    @property
    def holds(self) -> bool:
        return self.size_Ac >= self.lower_bound

    def to_row(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "size_A": self.size_A,
            "size_Ac": self.size_Ac,
            "lower_bound": self.lower_bound,
            "holds": self.holds,
        }


def _complement_lower_bound(p: int, n: int) -> Fraction:
    return Fraction(n, 2) * (1 + Fraction(1, p)) - p


def _pair_upper_bound(p: int, q: int, n: int) -> Fraction:
    return Fraction(n, 4) * (1 + Fraction(1, p)) * (1 + Fraction(1, q)) + p * q


def residue_set(p: int, n: int, with_elements: bool = False) -> ResidueSetStats:
    """
    |A_p| for A_p = {x <= n : (x/p) = 1}.

    Each class mod p is classified once and counted by floor arithmetic, so
    the cost does not depend on n.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    classes = _residue_classes(p)
    size = int(_class_counts(p, n)[classes].sum())
    elements = None
    if with_elements:
        elements = tuple((np.flatnonzero(residue_mask(p, n)) + 1).tolist())
    return ResidueSetStats(p, n, size, n - size, _complement_lower_bound(p, n), elements)


def check_multiplicative_closure(
    p: int,
    n: int,
    B: Optional[int] = None,
    pair_cap: int = DEFAULT_CLOSURE_PAIRS,
) -> VerificationReport:
    """
    x, y in A_p with xy <= n implies xy in A_p, checked over every pair.

    With ``B`` given, also checks that every prime q <= min(B, n) lies in A_p,
    which is what census membership (n_p > B) means.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    pairs = n * (math.log(n) + 1)
    if pairs > pair_cap:
        raise EnumerationBudgetError(
            f"Closure check at n={n} visits about {int(pairs):,} pairs, over {pair_cap:,}"
        )
    mask = np.concatenate(([False], residue_mask(p, n)))
    members = np.flatnonzero(mask)
    broken = 0
    checked = 0
    for x in members.tolist():
        ys = members[: np.searchsorted(members, n // x, side="right")]
        if ys.size == 0:
            break
        checked += int(ys.size)
        broken += int(np.count_nonzero(~mask[x * ys]))

    checks = [InequalityCheck("products xy <= n outside A", broken, 0, "==")]
    params = {"p": p, "n": n}
    if B is not None:
        small = sieve_primes(max(2, min(B, n))).upto(min(B, n))
        missing = int(np.count_nonzero(~mask[small])) if small.size else 0
        checks.append(InequalityCheck("primes <= B outside A", missing, 0, "=="))
        params["B"] = B
    return VerificationReport(
        "multiplicative-closure", params, tuple(checks), (f"{checked} pairs checked",)
    )


def pair_complement_bound(
    p: int, q: int, n: int, budget_bytes: int = DEFAULT_SIEVE_BUDGET
) -> VerificationReport:
    """
    |A_p^c & A_q^c| <= n/4 (1+1/p)(1+1/q) + pq, counted exactly over classes mod pq.
    """
    if p == q:
        raise ValueError(f"p and q must be distinct, got {p} twice")
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    modulus = p * q
    if 24 * modulus > budget_bytes:
        raise CapacityError(f"Classes mod {modulus} do not fit the budget of {budget_bytes:,} bytes")
    outside_p = ~_residue_classes(p)
    outside_q = ~_residue_classes(q)
    c = np.arange(modulus, dtype=np.int64)
    both = outside_p[c % p] & outside_q[c % q]
    count = int(_class_counts(modulus, n)[both].sum())

    stats_p = residue_set(p, n)
    stats_q = residue_set(q, n)
    return VerificationReport(
        "pair-complement",
        {"p": p, "q": q, "n": n},
        (
            InequalityCheck(
                "classes mod pq in both complements",
                int(both.sum()),
                (p + 1) * (q + 1) // 4,
                "==",
            ),
            InequalityCheck("|Ap^c & Aq^c| <= n/4(1+1/p)(1+1/q)+pq", count, _pair_upper_bound(p, q, n)),
            InequalityCheck("n/2(1+1/p)-p <= |Ap^c|", stats_p.lower_bound, stats_p.size_Ac),
            InequalityCheck("n/2(1+1/q)-q <= |Aq^c|", stats_q.lower_bound, stats_q.size_Ac),
        ),
    )


@dataclass(frozen=True)
class LinnikReport:
    """(d+1) Psi(N^3, B) <= (5 + d/B^2) N^3 for one (N, B), with its proof steps."""

    N: int
    B: int
    d: int
    psi: int
    lhs: int
    rhs: Fraction
    proof: VerificationReport

    @property
    def verdict(self) -> bool:
        return self.lhs <= self.rhs

    @property
    def passed(self) -> bool:
        return self.verdict and self.proof.passed

    def to_row(self) -> dict:
        return {
            "N": self.N,
            "B": self.B,
            "d": self.d,
            "psi": self.psi,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.rhs - self.lhs,
            "verdict": self.verdict,
            "steps_checked": len(self.proof.checks),
            "passed": self.passed,
        }


def proof_chain(N: int, B: int, census: ResidueCensus, psi: int) -> VerificationReport:
    """
    The numeric chain of the theorem's proof at n = N^3, link by link.

    The first link is the sieve inequality with the single and pairwise
    complement bounds substituted; each later link only uses B < p <= N and
    d <= N.
    """
    n = N**3
    d = census.d
    members = census.primes
    sum_p = sum(members)
    sum_p2 = sum(p * p for p in members)
    recip = sum((Fraction(1, p) for p in members), Fraction(0))
    recip2 = sum((Fraction(1, p * p) for p in members), Fraction(0))
    # ordered pairs p != q
    pair_products = sum_p * sum_p - sum_p2
    pair_recip = recip * recip - recip2

    start = (d + 1) ** 2 * psi
    substituted = (d + 1) * n - 2 * n * recip + 4 * d * sum_p + n * pair_recip + 4 * pair_products
    dropped = (d + 1) * n + 4 * d * sum_p + n * pair_recip + 4 * pair_products
    by_range = (d + 1) * n + 4 * d * d * N + Fraction(n * d * d, B * B) + 4 * d * d * N * N
    at_cube = (d + 1) * N**3 + 4 * N**3 + Fraction(d * d, B * B) * N**3 + 4 * d * N**3
    final = (d + 1) * (5 + Fraction(d, B * B)) * N**3

    out_of_range = sum(1 for p in members if not B <= p <= N)
    return VerificationReport(
        "linnik-proof-chain",
        {"N": N, "B": B, "d": d},
        (
            InequalityCheck("d <= N", d, N),
            InequalityCheck("members outside [B, N]", out_of_range, 0, "=="),
            InequalityCheck("(d+1)^2 Psi <= sieve with complement bounds", start, substituted),
            InequalityCheck("drop -2n sum 1/p", substituted, dropped),
            InequalityCheck("B <= p <= N", dropped, by_range),
            InequalityCheck("n = N^3 and d <= N", by_range, at_cube),
            InequalityCheck("<= (d+1)(5 + d/B^2) N^3", at_cube, final),
        ),
    )


def replay_residue_sets(
    N: int, B: int, census: ResidueCensus, psi: int
) -> VerificationReport:
    """The set-level steps of the proof on the actual residue sets of [N^3]."""
    n = N**3
    members = census.primes
    d = len(members)
    family = SieveFamily(n, np.stack([residue_mask(p, n) for p in members]))
    counts = tally(family)

    single_misses = sum(
        1
        for p, size in zip(members, counts.complement_sizes)
        if size < _complement_lower_bound(p, n)
    )
    pair_misses = sum(
        1
        for i in range(d)
        for j in range(i + 1, d)
        if counts.pair_complement_sizes[i][j] > _pair_upper_bound(members[i], members[j], n)
    )
    recip = sum((Fraction(1, p) for p in members), Fraction(0))
    recip2 = sum((Fraction(1, p * p) for p in members), Fraction(0))
    sum_p = sum(members)
    pair_products = sum_p * sum_p - sum(p * p for p in members)
    singles = 4 * d * sum(counts.complement_sizes)
    pairs = 4 * counts.ordered_pair_sum

    return VerificationReport(
        "linnik-residue-sets",
        {"N": N, "B": B, "n": n, "d": d},
        (
            InequalityCheck("Psi(n,B) <= |intersection|", psi, counts.intersection_size),
            InequalityCheck("complements below n/2(1+1/p)-p", single_misses, 0, "=="),
            InequalityCheck("pairs above n/4(1+1/p)(1+1/q)+pq", pair_misses, 0, "=="),
            InequalityCheck(
                "2d^2n + 2dn sum 1/p - 4d sum p <= 4d sum|A^c|",
                2 * d * d * n + 2 * d * n * recip - 4 * d * sum_p,
                singles,
            ),
            InequalityCheck(
                "4 sum_{i!=j}|Ai^c & Aj^c| <= pair bound",
                pairs,
                d * (d - 1) * n
                + 2 * (d - 1) * n * recip
                + n * (recip * recip - recip2)
                + 4 * pair_products,
            ),
            InequalityCheck("sieve inequality on the family", counts.lhs, counts.rhs),
        ),
    )


def _assemble(
    N: int,
    B: int,
    census: ResidueCensus,
    psi: int,
    enumerated: Optional[int],
    replay: bool,
) -> LinnikReport:
    d = census.d
    report = proof_chain(N, B, census, psi)
    if enumerated is not None:
        report = report.extend(
            [InequalityCheck("Psi recursion == enumeration", psi, enumerated, "==")]
        )
    if replay and d > 0:
        report = report.extend(replay_residue_sets(N, B, census, psi).checks)
    lhs = (d + 1) * psi
    rhs = (5 + Fraction(d, B * B)) * N**3
    return LinnikReport(N, B, d, psi, lhs, rhs, report)


def theorem_check(
    N: int,
    B: int,
    primes: Optional[PrimeTable] = None,
    threads: int = 1,
    memo_cap: int = DEFAULT_MEMO_CAP,
    cross_check_limit: int = DEFAULT_CROSS_CHECK_LIMIT,
    replay_limit: int = DEFAULT_REPLAY_LIMIT,
    budget_bytes: int = DEFAULT_SIEVE_BUDGET,
) -> LinnikReport:
    """
    Theorem check at (N, B): census for d, recursive Psi(N^3, B), both sides exact.

    Psi is cross-checked by enumeration when N^3 <= ``cross_check_limit``;
    the residue-set steps are replayed when d * N^3 <= ``replay_limit``.
    """
    if B < 2 or B >= N:
        raise ValueError(f"need 2 <= B < N, got N={N}, B={B}")
    if primes is None or primes.limit < N:
        primes = sieve_primes(N, budget_bytes=budget_bytes)
    census = nonresidue_census(N, B, primes, threads)
    n = N**3
    psi = SmoothCounter(primes, memo_cap).psi(n, B)

    enumerated = None
    if n <= cross_check_limit:
        table = largest_prime_factor_table(n, budget_bytes=budget_bytes)
        enumerated = table.count_smooth(n, B)
    replay = max(census.d, 1) * n <= replay_limit
    if not replay:
        logger.debug(f"residue sets not replayed at N={N}: d*N^3 over {replay_limit}")
    return _assemble(N, B, census, psi, enumerated, replay)


def _sweep_one(
    N: int,
    primes: PrimeTable,
    nonresidues: Sequence[LeastNonResidue],
    table: Optional[LargestPrimeFactorTable],
    memo_cap: int,
    replay_limit: int,
) -> List[LinnikReport]:
    counter = SmoothCounter(primes, memo_cap)
    n = N**3
    by_bound = table.smooth_counts_by_bound(n, N - 1) if table is not None else None
    upto_N = [entry for entry in nonresidues if entry.p <= N]
    reports = []
    for B in range(2, N):
        census = ResidueCensus(N, B, tuple(e for e in upto_N if e.n_p > B))
        psi = counter.psi(n, B)
        enumerated = int(by_bound[B]) if by_bound is not None else None
        replay = max(census.d, 1) * n <= replay_limit
        reports.append(_assemble(N, B, census, psi, enumerated, replay))
    logger.info(f"sweep N={N}: {len(reports)} bounds, memo {len(counter)}")
    return reports


def theorem_sweep(
    N_max: int,
    N_min: int = 3,
    threads: int = 1,
    memo_cap: int = DEFAULT_MEMO_CAP,
    cross_check_limit: int = DEFAULT_CROSS_CHECK_LIMIT,
    replay_limit: int = 0,
    budget_bytes: int = DEFAULT_SIEVE_BUDGET,
) -> List[LinnikReport]:
    """
    theorem_check for every 2 <= B < N with N_min <= N <= N_max.

    One least-non-residue pass serves every census, each N gets its own Psi
    memo, and the N values run in parallel.
    """
    if N_min < 3 or N_max < N_min:
        raise ValueError(f"need 3 <= N_min <= N_max, got {N_min}..{N_max}")
    primes = sieve_primes(N_max, budget_bytes=budget_bytes)
    nonresidues = least_nonresidue_table(N_max, primes, threads)
    table = None
    if N_max**3 <= cross_check_limit:
        table = largest_prime_factor_table(N_max**3, budget_bytes=budget_bytes)
    per_N = ordered_map(
        lambda N: _sweep_one(N, primes, nonresidues, table, memo_cap, replay_limit),
        range(N_min, N_max + 1),
        threads,
    )
    return [report for chunk in per_N for report in chunk]


@dataclass(frozen=True)
class CorollaryEstimate:
    """
    Bounds on d = #{p <= N : n_p > N^eps} at one N.

    The certified bound 5N^3/(Psi(N^3, N^eps) - N^(3-2eps)) is rigorous for
    this N. The heuristic bound 5/(c - N^(-2eps)) uses the empirical smooth
    constant in place of c_{3/eps}.
    """

    N: int
    eps: Fraction
    B: int  # ceil(N^eps)
    y: int  # floor(N^eps)
    d_actual: int  # census at B
    d_exact: int  # primes with n_p > N^eps
    psi: int
    c_used: Fraction
    certified_bound: Optional[float]
    certified_holds: Optional[bool]
    heuristic_bound: Optional[float]
    heuristic_holds: Optional[bool]

    @property
    def certified_vacuous(self) -> bool:
        return self.certified_bound is None

    @property
    def heuristic_vacuous(self) -> bool:
        return self.heuristic_bound is None

    @property
    def passed(self) -> bool:
        return self.certified_holds is not False

    def to_rows(self) -> List[dict]:
        common = {
            "N": self.N,
            "eps": self.eps,
            "B": self.B,
            "d_actual": self.d_actual,
            "d_exact": self.d_exact,
            "psi": self.psi,
            "c_used": self.c_used,
        }
        rows = []
        for kind, bound, holds in (
            ("certified", self.certified_bound, self.certified_holds),
            ("heuristic", self.heuristic_bound, self.heuristic_holds),
        ):
            rows.append(
                {
                    **common,
                    "kind": kind,
                    "bound": "vacuous" if bound is None else bound,
                    "holds": holds,
                }
            )
        return rows


def _below_bound(d: int, scale: Fraction, N: int, exponent: Fraction, numerator: int) -> bool:
    """d * (scale - N^exponent) <= numerator, given scale > N^exponent."""
    if d == 0:
        return True
    threshold = Fraction(d * scale - numerator, d)
    return threshold <= 0 or compare_power(threshold, N, exponent) <= 0


def corollary_estimate(
    N: int,
    eps: Number,
    n_max_for_c: int,
    primes: Optional[PrimeTable] = None,
    smooth_table: Optional[LargestPrimeFactorTable] = None,
    threads: int = 1,
    memo_cap: int = DEFAULT_MEMO_CAP,
    budget_bytes: int = DEFAULT_SIEVE_BUDGET,
) -> CorollaryEstimate:
    """
    Both corollary bounds at N, compared against the actual census count.

    Vacuous bounds (non-positive denominator at this N) are reported as None.
    Every sign test is exact.
    """
    eps_q = as_fraction(eps)
    if not 0 < eps_q < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps_q}")
    if N < 2:
        raise ValueError(f"N must be at least 2, got {N}")
    B = ceil_power(N, eps_q)
    if B < 2:
        raise ValueError(f"ceil(N^eps) must be at least 2, got {B}")
    y = floor_power(N, eps_q)
    if primes is None or primes.limit < N:
        primes = sieve_primes(N, budget_bytes=budget_bytes)

    nonresidues = least_nonresidue_table(N, primes, threads)
    d_actual = sum(1 for e in nonresidues if e.n_p > B)
    d_exact = sum(1 for e in nonresidues if e.n_p > y)
    psi = SmoothCounter(primes, memo_cap).psi(N**3, y)

    constant = empirical_smooth_constant(3 / eps_q, n_max_for_c, smooth_table, budget_bytes)
    c_used = constant.c_empirical

    cube = N**3
    mid_exponent = 3 - 2 * eps_q
    certified_bound = certified_holds = None
    if compare_power(psi, N, mid_exponent) > 0:
        gap = psi - float(N) ** float(mid_exponent)
        certified_bound = 5 * cube / gap if gap > 0 else math.inf
        certified_holds = _below_bound(d_exact, Fraction(psi), N, mid_exponent, 5 * cube)
    else:
        logger.info(f"certified bound vacuous at N={N}, eps={eps_q}")

    heuristic_bound = heuristic_holds = None
    if compare_power(c_used, N, -2 * eps_q) > 0:
        gap = float(c_used) - float(N) ** float(-2 * eps_q)
        heuristic_bound = 5 / gap if gap > 0 else math.inf
        heuristic_holds = _below_bound(d_exact, c_used, N, -2 * eps_q, 5)
        if not heuristic_holds:
            logger.warning(f"heuristic bound below the census count at N={N}")

    return CorollaryEstimate(
        N,
        eps_q,
        B,
        y,
        d_actual,
        d_exact,
        psi,
        c_used,
        certified_bound,
        certified_holds,
        heuristic_bound,
        heuristic_holds,
    )
