"""
Primes, modular arithmetic, Legendre symbols and least quadratic non-residues.
"""

import functools
import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import CapacityError
from .logger import get_logger
from .parallel import ordered_map, split_blocks

logger = get_logger("core_arith")

DEFAULT_SEGMENT_SIZE = 1 << 18
DEFAULT_SIEVE_BUDGET = 512 * 1024 * 1024
MAX_SIEVE_LIMIT = (1 << 63) - 1


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """All primes up to ``limit`` in increasing order."""

    limit: int
    primes: np.ndarray

    def __post_init__(self):
        self.primes.flags.writeable = False

    def __len__(self) -> int:
        return int(self.primes.size)

    def __iter__(self) -> Iterator[int]:
        return iter(self.primes.tolist())

    def __getitem__(self, index: int) -> int:
        return int(self.primes[index])

    def __contains__(self, n: object) -> bool:
        if not isinstance(n, (int, np.integer)) or n < 2 or n > self.limit:
            return False
        i = int(np.searchsorted(self.primes, n))
        return i < self.primes.size and int(self.primes[i]) == n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PrimeTable):
            return NotImplemented
        return self.limit == other.limit and np.array_equal(self.primes, other.primes)

    def __repr__(self) -> str:
        return f"PrimeTable(limit={self.limit}, count={len(self)})"

    def count_upto(self, x: int) -> int:
        """pi(x) for x <= limit."""
        if x > self.limit:
            raise ValueError(f"pi({x}) is beyond this table's limit {self.limit}")
        return int(np.searchsorted(self.primes, x, side="right"))

    def upto(self, x: int) -> np.ndarray:
        return self.primes[: self.count_upto(min(x, self.limit))]

    def between(self, lo: int, hi: int) -> np.ndarray:
        """Primes p with lo < p <= hi."""
        if hi > self.limit:
            raise ValueError(f"range ends at {hi}, beyond this table's limit {self.limit}")
        start = int(np.searchsorted(self.primes, lo, side="right"))
        stop = int(np.searchsorted(self.primes, hi, side="right"))
        return self.primes[start:stop]

    def odd(self) -> np.ndarray:
        return self.primes[1:] if self.primes.size and self.primes[0] == 2 else self.primes

    def tolist(self) -> List[int]:
        return self.primes.tolist()


@dataclass(frozen=True)
class LeastNonResidue:
    p: int
    n_p: int


@dataclass(frozen=True)
class ResidueCensus:
    """The primes p <= N whose least non-residue exceeds B."""

    N: int
    B: int
    members: Tuple[LeastNonResidue, ...]

    @property
    def d(self) -> int:
        return len(self.members)

    @property
    def primes(self) -> List[int]:
        return [member.p for member in self.members]

    def to_rows(self) -> List[dict]:
        return [
            {"N": self.N, "B": self.B, "p": m.p, "n_p": m.n_p, "d": self.d}
            for m in self.members
        ] or [{"N": self.N, "B": self.B, "p": None, "n_p": None, "d": 0}]


def estimated_prime_count(limit: int) -> int:
    """Upper estimate of pi(limit) (Rosser-Schoenfeld), used for budgeting."""
    if limit < 17:
        return 7
    return int(1.25506 * limit / math.log(limit)) + 1


def _simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def sieve_primes(
    limit: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    budget_bytes: int = DEFAULT_SIEVE_BUDGET,
) -> PrimeTable:
    """
    Segmented, odd-only sieve of Eratosthenes.

    The working set is one boolean segment of ``segment_size`` odd numbers
    plus the base primes up to sqrt(limit); only the output grows with
    ``limit``.
    """
    if limit < 0:
        raise ValueError("limit must be non-negative")
    if limit > MAX_SIEVE_LIMIT:
        raise ValueError(f"limit {limit} does not fit a signed 64-bit word")
    if segment_size < 1:
        raise ValueError("segment_size must be positive")

    needed = 8 * estimated_prime_count(limit) + segment_size
    if needed > budget_bytes:
        raise CapacityError(
            f"Sieving to {limit} needs about {needed:,} bytes, "
            f"over the budget of {budget_bytes:,} bytes"
        )
    logger.debug(f"Sieving primes up to {limit} (segment {segment_size})")

    if limit < 2:
        return PrimeTable(limit, np.array([], dtype=np.int64))

    base = _simple_sieve(math.isqrt(limit))
    odd_base = base[1:]
    chunks = [np.array([2], dtype=np.int64)]

    span = 2 * segment_size
    low = 3
    while low <= limit:
        high = min(low + span, limit + 1)  # exclusive
        odd_count = (high - low + 1) // 2
        mask = np.ones(odd_count, dtype=bool)
        for p in odd_base.tolist():
            p2 = p * p
            if p2 >= high:
                break
            start = max(p2, ((low + p - 1) // p) * p)
            if start % 2 == 0:
                start += p
            if start >= high:
                continue
            mask[(start - low) // 2 :: p] = False
        chunks.append(low + 2 * np.flatnonzero(mask).astype(np.int64))
        low += span

    return PrimeTable(limit, np.concatenate(chunks))


@functools.lru_cache(maxsize=32)
def _cached_table(limit: int) -> PrimeTable:
    return sieve_primes(limit)


def small_primes(bound: int) -> PrimeTable:
    """Cached table covering at least ``bound``, rounded up to a power of two."""
    return _cached_table(max(64, 1 << max(bound, 1).bit_length()))


def mod_pow(base: int, exponent: int, modulus: int) -> int:
    """base**exponent mod modulus by left-to-right square-and-multiply."""
    if modulus < 1:
        raise ValueError("modulus must be at least 1")
    if exponent < 0:
        raise ValueError("exponent must be non-negative")
    if base < 0:
        raise ValueError("base must be non-negative")
    result = 1 % modulus
    base %= modulus
    for bit in bin(exponent)[2:]:
        result = result * result % modulus
        if bit == "1":
            result = result * base % modulus
    return result


def _require_odd_prime_modulus(p: int) -> None:
    if p < 3 or p % 2 == 0:
        raise ValueError(f"Expected an odd prime modulus, got {p}")


def legendre_symbol(a: int, p: int) -> int:
    """Legendre symbol (a/p) by Euler's criterion."""
    _require_odd_prime_modulus(p)
    a %= p
    if a == 0:
        return 0
    r = mod_pow(a, (p - 1) // 2, p)
    if r == 1:
        return 1
    if r == p - 1:
        return -1
    raise ValueError(f"{p} is not prime: Euler's criterion gave {r}")


def legendre_reciprocity(a: int, p: int) -> int:
    """Legendre symbol (a/p) by quadratic reciprocity (Jacobi-style loop)."""
    _require_odd_prime_modulus(p)
    n = p
    a %= n
    negate = False
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                negate = not negate
        if a % 4 == 3 and n % 4 == 3:
            negate = not negate
        a, n = n % a, a
    if n != 1:
        return 0
    return -1 if negate else 1


def is_prime_checked(n: int) -> bool:
    """Trial division up to sqrt(n)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for f in range(3, math.isqrt(n) + 1, 2):
        if n % f == 0:
            return False
    return True


def least_nonresidue(p: int, exhaustive: bool = False) -> LeastNonResidue:
    """
    Least positive quadratic non-residue modulo an odd prime ``p``.

    Only primes are tried, since the least non-residue is always prime; it
    is also at most sqrt(p) + 1, which sizes the table of candidates.
    ``exhaustive=True`` tries every x = 2, 3, 4, ... instead.
    """
    _require_odd_prime_modulus(p)
    if not exhaustive:
        bound = math.isqrt(p) + 1
        for q in small_primes(bound).upto(bound).tolist():
            if legendre_symbol(q, p) == -1:
                return LeastNonResidue(p, q)
        logger.warning(f"No prime non-residue <= {bound} for {p}; searching exhaustively")
    for x in range(2, p):
        if legendre_symbol(x, p) == -1:
            return LeastNonResidue(p, x)
    raise ValueError(f"{p} has no quadratic non-residue; is it prime?")


def _census_block(block: Sequence[int], small: Sequence[int]) -> List[LeastNonResidue]:
    members = []
    for p in block:
        for q in small:
            # a non-residue q <= B, or q == p, rules p out
            if legendre_symbol(q, p) != 1:
                break
        else:
            members.append(least_nonresidue(p))
    return members


def nonresidue_census(
    N: int,
    B: int,
    primes: Optional[PrimeTable] = None,
    threads: int = 1,
) -> ResidueCensus:
    """
    Odd primes p <= N with n_p > B, each with its exact n_p.

    Membership only needs the primes q <= B: p is a member iff every one of
    them is a quadratic residue mod p.
    """
    if B < 2:
        raise ValueError(f"B must be at least 2, got {B}")
    if B >= N:
        raise ValueError(f"B must be smaller than N, got B={B}, N={N}")
    if primes is None or primes.limit < N:
        primes = sieve_primes(N)

    small = primes.upto(B).tolist()
    odd = primes.odd()[: primes.count_upto(N) - 1].tolist()
    blocks = split_blocks(odd, max(1, threads) * 4)
    found = ordered_map(lambda block: _census_block(block, small), blocks, threads)
    members = tuple(member for chunk in found for member in chunk)
    logger.debug(f"census N={N} B={B}: d={len(members)}")
    return ResidueCensus(N, B, members)


def least_nonresidue_table(
    limit: int, primes: Optional[PrimeTable] = None, threads: int = 1
) -> List[LeastNonResidue]:
    """n_p for every odd prime p <= limit, in increasing p."""
    if primes is None or primes.limit < limit:
        primes = sieve_primes(limit)
    odd = primes.odd()[: max(primes.count_upto(limit) - 1, 0)].tolist()
    blocks = split_blocks(odd, max(1, threads) * 4)
    found = ordered_map(
        lambda block: [least_nonresidue(p) for p in block], blocks, threads
    )
    return [entry for chunk in found for entry in chunk]
