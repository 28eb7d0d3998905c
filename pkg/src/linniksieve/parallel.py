"""Order-preserving parallel map used by sweeps and censuses."""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """
    Apply ``fn`` to every item and return the results in input order.

    With ``threads == 1`` everything runs inline; otherwise a thread pool is
    used. Either way the output is the same list.
    """
    if threads < 1:
        raise ValueError("threads must be at least 1")
    materialized = list(items)
    if threads == 1 or len(materialized) < 2:
        return [fn(item) for item in materialized]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, materialized))


def split_blocks(items: Sequence[T], blocks: int) -> List[Sequence[T]]:
    """Split a sequence into at most ``blocks`` contiguous, non-empty pieces."""
    if blocks < 1:
        raise ValueError("blocks must be at least 1")
    n = len(items)
    if n == 0:
        return []
    blocks = min(blocks, n)
    size, extra = divmod(n, blocks)
    pieces = []
    start = 0
    for i in range(blocks):
        stop = start + size + (1 if i < extra else 0)
        pieces.append(items[start:stop])
        start = stop
    return pieces
