"""
The quadratic-weight combinatorial sieve inequality for arbitrary set families.

For sets A_1..A_d of [n]:

    (d+1)^2 |A_1 & ... & A_d|
        <= (d+1)^2 n - 4d sum|A_i^c| + 4 sum_{i != j} |A_i^c & A_j^c|

where the last sum runs over ordered pairs. An element lying in l of the
complements contributes (d+1-2l)^2 >= 0 to the right hand side.
"""

from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .exceptions import EnumerationBudgetError
from .logger import get_logger
from .parallel import ordered_map
from .reporting import InequalityCheck, VerificationReport

logger = get_logger("sieve_core")

DEFAULT_ENUMERATION_CAP = 18
ENUMERATION_BLOCK = 1 << 12
RANDOM_BATCH = 1000


@dataclass(frozen=True, eq=False)
class SieveFamily:
    """Sets A_1..A_d of [n] as a boolean (d, n) membership matrix."""

    n: int
    membership: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.membership, dtype=bool)
        if matrix.ndim != 2:
            raise ValueError("membership must be a (d, n) matrix")
        if self.n < 1 or matrix.shape[1] != self.n:
            raise ValueError(f"membership has {matrix.shape[1]} columns, expected n={self.n}")
        if matrix.shape[0] < 1:
            raise ValueError("a sieve family needs at least one set")
        object.__setattr__(self, "membership", matrix)

    @property
    def d(self) -> int:
        return int(self.membership.shape[0])

    @classmethod
    def from_sets(cls, n: int, sets: Sequence[Iterable[int]]) -> "SieveFamily":
        matrix = np.zeros((len(sets), max(n, 0)), dtype=bool)
        for i, members in enumerate(sets):
            for x in members:
                if not 1 <= x <= n:
                    raise ValueError(f"element {x} of set {i + 1} is outside [1, {n}]")
                matrix[i, x - 1] = True
        return cls(n, matrix)

    def sets(self) -> List[frozenset]:
        return [frozenset((np.flatnonzero(row) + 1).tolist()) for row in self.membership]

    def complement_counts(self) -> np.ndarray:
        """l(x) for x = 1..n: how many complements contain x."""
        return (~self.membership).sum(axis=0)


@dataclass(frozen=True)
class SieveTally:
    n: int
    d: int
    intersection_size: int
    complement_sizes: Tuple[int, ...]
    # |A_i^c & A_j^c| for i != j; the diagonal is left at zero
    pair_complement_sizes: Tuple[Tuple[int, ...], ...]
    lhs: int
    rhs: int

    @property
    def unordered_pair_sum(self) -> int:
        return sum(
            self.pair_complement_sizes[i][j]
            for i in range(self.d)
            for j in range(i + 1, self.d)
        )

    @property
    def ordered_pair_sum(self) -> int:
        return 2 * self.unordered_pair_sum

    @property
    def slack(self) -> int:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    def to_row(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "intersection": self.intersection_size,
            "complements": sum(self.complement_sizes),
            "ordered_pairs": self.ordered_pair_sum,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
        }


def pointwise_weight(l: int, d: int) -> int:
    """(d+1-2l)^2, the count of an element lying in l complements."""
    if d < 1:
        raise ValueError(f"d must be positive, got {d}")
    if not 0 <= l <= d:
        raise ValueError(f"l must lie in [0, {d}], got {l}")
    weight = (d + 1 - 2 * l) ** 2
    expanded = (d + 1) ** 2 - 4 * d * l + 4 * l * (l - 1)
    if weight != expanded:
        raise ArithmeticError(f"weight identity broken at l={l}, d={d}")
    return weight


def _popcount(packed: np.ndarray) -> np.ndarray:
    return np.bitwise_count(packed).sum(axis=-1, dtype=np.int64)


def tally(family: SieveFamily) -> SieveTally:
    """All counts of the sieve inequality, from packed bitsets and popcounts."""
    n, d = family.n, family.d
    # packbits pads with zero bits, which popcounts ignore
    inside = np.packbits(family.membership, axis=1)
    outside = np.packbits(~family.membership, axis=1)

    intersection = int(_popcount(np.bitwise_and.reduce(inside, axis=0)))
    complements = _popcount(outside)
    pairs = np.zeros((d, d), dtype=np.int64)
    for i in range(d - 1):
        pairs[i, i + 1 :] = _popcount(outside[i] & outside[i + 1 :])
    pairs = pairs + pairs.T

    complement_sizes = tuple(int(c) for c in complements)
    ordered = int(pairs.sum())
    lhs = (d + 1) ** 2 * intersection
    rhs = (d + 1) ** 2 * n - 4 * d * sum(complement_sizes) + 4 * ordered
    return SieveTally(
        n,
        d,
        intersection,
        complement_sizes,
        tuple(tuple(int(v) for v in row) for row in pairs),
        lhs,
        rhs,
    )


def pointwise_accounting(family: SieveFamily) -> int:
    """Sum over x outside the intersection of (d+1-2l(x))^2; equals rhs - lhs."""
    ell = family.complement_counts().astype(np.int64)
    weights = (family.d + 1 - 2 * ell) ** 2
    return int(weights[ell > 0].sum())


def _exhaustive_block(n: int, d: int, start: int, stop: int) -> Tuple[int, int, int]:
    """(violations, accounting mismatches, min slack) over family indices [start, stop)."""
    index = np.arange(start, stop, dtype=np.int64)
    bits = ((index[:, None] >> np.arange(n * d, dtype=np.int64)) & 1).astype(bool)
    inside = bits.reshape(-1, d, n)
    outside = (~inside).astype(np.int64)

    complements = outside.sum(axis=2)
    gram = np.einsum("fin,fjn->fij", outside, outside)
    ordered = gram.sum(axis=(1, 2)) - complements.sum(axis=1)
    intersection = inside.all(axis=1).sum(axis=1)

    lhs = (d + 1) ** 2 * intersection
    rhs = (d + 1) ** 2 * n - 4 * d * complements.sum(axis=1) + 4 * ordered
    ell = outside.sum(axis=1)
    accounting = np.where(ell > 0, (d + 1 - 2 * ell) ** 2, 0).sum(axis=1)

    slack = rhs - lhs
    return (
        int(np.count_nonzero(slack < 0)),
        int(np.count_nonzero(slack != accounting)),
        int(slack.min()),
    )


def verify_lemma_exhaustive(
    n_max: int,
    d_max: int,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
    threads: int = 1,
) -> VerificationReport:
    """Every family of d <= d_max subsets of [n], for every n <= n_max."""
    if n_max < 1 or d_max < 1:
        raise ValueError("n_max and d_max must be positive")
    if n_max * d_max > enumeration_cap:
        raise EnumerationBudgetError(
            f"Enumerating families with n*d = {n_max * d_max} exceeds the cap of "
            f"{enumeration_cap} (2^{enumeration_cap} families per shape)"
        )

    checks: List[InequalityCheck] = []
    notes: List[str] = []
    total = 0
    for n in range(1, n_max + 1):
        for d in range(1, d_max + 1):
            count = 1 << (n * d)
            ranges = [
                (start, min(start + ENUMERATION_BLOCK, count))
                for start in range(0, count, ENUMERATION_BLOCK)
            ]
            results = ordered_map(lambda r: _exhaustive_block(n, d, *r), ranges, threads)
            violations = sum(r[0] for r in results)
            mismatches = sum(r[1] for r in results)
            min_slack = min(r[2] for r in results)
            checks.append(InequalityCheck(f"n={n} d={d}: min slack >= 0", 0, min_slack))
            checks.append(
                InequalityCheck(f"n={n} d={d}: accounting mismatches", mismatches, 0, "==")
            )
            notes.append(f"n={n} d={d}: {count} families, {violations} violations")
            total += count
    logger.info(f"exhaustive sieve check: {total} families")
    return VerificationReport(
        "sieve-exhaustive",
        {"n_max": n_max, "d_max": d_max, "families": total},
        tuple(checks),
        tuple(notes),
    )


def _random_batch(seed: np.random.SeedSequence, size: int, n_max: int, d_max: int):
    rng = np.random.default_rng(seed)
    violations = mismatches = 0
    for _ in range(size):
        n = int(rng.integers(1, n_max + 1))
        d = int(rng.integers(1, d_max + 1))
        density = rng.random()
        family = SieveFamily(n, rng.random((d, n)) < density)
        result = tally(family)
        violations += not result.holds
        mismatches += result.slack != pointwise_accounting(family)
    return violations, mismatches


def verify_lemma_random(
    trials: int,
    n_max: int = 512,
    d_max: int = 32,
    seed: int = 0,
    threads: int = 1,
) -> VerificationReport:
    """Random families with per-batch seeds, so results do not depend on threads."""
    if trials < 1:
        raise ValueError("trials must be positive")
    if n_max < 1 or d_max < 1:
        raise ValueError("n_max and d_max must be positive")
    sizes = [RANDOM_BATCH] * (trials // RANDOM_BATCH)
    if trials % RANDOM_BATCH:
        sizes.append(trials % RANDOM_BATCH)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    results = ordered_map(
        lambda job: _random_batch(job[0], job[1], n_max, d_max),
        list(zip(seeds, sizes)),
        threads,
    )
    return VerificationReport(
        "sieve-random",
        {"trials": trials, "n_max": n_max, "d_max": d_max, "seed": seed},
        (
            InequalityCheck("families with lhs > rhs", sum(r[0] for r in results), 0, "=="),
            InequalityCheck("accounting mismatches", sum(r[1] for r in results), 0, "=="),
        ),
    )
