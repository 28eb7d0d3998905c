import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import RunConfig
from .core_arith import (
    PrimeTable,
    is_prime_checked,
    least_nonresidue,
    least_nonresidue_table,
    nonresidue_census,
    sieve_primes,
)
from .estimates import check_reciprocal_shift, scan_windows
from .linnik import corollary_estimate, theorem_check, theorem_sweep
from .logger import setup_logging
from .reporting import merge_reports
from .sieve_core import verify_lemma_exhaustive, verify_lemma_random
from .smooth import (
    LargestPrimeFactorTable,
    SmoothCounter,
    empirical_smooth_constant,
    largest_prime_factor_table,
    psi_enumerate,
    psi_recursive,
)
from .utils import Number, as_fraction

PLOT_KINDS = ("defect", "c-const", "nqr-max")
PSI_METHODS = ("enumerative", "recursive", "both")


@dataclass
class CommandResult:
    command: str
    rows: List[Dict[str, Any]]
    passed: bool = True
    notes: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def failed(self) -> int:
        return sum(1 for row in self.rows if row.get("holds") is False or row.get("passed") is False)


class Workbench:
    """Runs one command under a RunConfig and shares prime and factor tables between steps."""

    def __init__(self, config: Optional[RunConfig] = None):
        self.config = config or RunConfig.from_env()
        self.budgets = self.config.budgets
        self.threads = self.config.thread_count
        self.logger = setup_logging(verbose=self.config.verbose, log_dir=self.config.log_dir)
        self._primes: Optional[PrimeTable] = None
        self._factors: Optional[LargestPrimeFactorTable] = None

    def prime_table(self, limit: int) -> PrimeTable:
        if self._primes is None or self._primes.limit < limit:
            self._primes = sieve_primes(
                max(limit, 2),
                segment_size=self.budgets.segment_size,
                budget_bytes=self.budgets.sieve_bytes,
            )
        return self._primes

    def factor_table(self, limit: int) -> LargestPrimeFactorTable:
        if self._factors is None or self._factors.limit < limit:
            self._factors = largest_prime_factor_table(
                max(limit, 2), self.prime_table(limit), self.budgets.sieve_bytes
            )
        return self._factors

    def primes(self, limit: int) -> CommandResult:
        if limit < 0:
            raise ValueError(f"limit must be non-negative, got {limit}")
        table = self.prime_table(limit)
        rows = [{"index": i + 1, "p": p} for i, p in enumerate(table.upto(limit).tolist())]
        self.logger.info(f"primes up to {limit}: {len(rows)}")
        return CommandResult("primes", rows)

    def nqr(self, p: int) -> CommandResult:
        if p < 3 or not is_prime_checked(p):
            raise ValueError(f"p must be an odd prime, got {p}")
        fast = least_nonresidue(p)
        slow = least_nonresidue(p, exhaustive=True)
        row = {
            "p": p,
            "n_p": fast.n_p,
            "n_p_prime": is_prime_checked(fast.n_p),
            "below_p": fast.n_p < p,
            "exhaustive_agrees": fast.n_p == slow.n_p,
        }
        row["holds"] = row["n_p_prime"] and row["below_p"] and row["exhaustive_agrees"]
        return CommandResult("nqr", [row], row["holds"])

    def census(self, N: int, B: int) -> CommandResult:
        census = nonresidue_census(N, B, self.prime_table(N), self.threads)
        return CommandResult("census", census.to_rows())

    def mertens(self, n: Number, eps: Number, grid: Optional[Sequence[Number]] = None) -> CommandResult:
        points = list(grid) if grid else [n]
        top = max(math.floor(as_fraction(x)) for x in points)
        primes = self.prime_table(top)
        windows = scan_windows(
            eps,
            points,
            primes,
            self.threads,
            exact_limit=self.budgets.exact_window_primes,
            budget_bytes=self.budgets.sieve_bytes,
        )
        rows = [window.to_row() for window in windows]
        shift = check_reciprocal_shift(points[0], eps, primes)
        return CommandResult("mertens", rows, shift.passed)

    def psi(self, n: Number, y: Number, method: str = "recursive") -> CommandResult:
        if method not in PSI_METHODS:
            raise ValueError(f"method must be one of {', '.join(PSI_METHODS)}, got {method!r}")
        n_q, y_q = as_fraction(n), as_fraction(y)
        if n_q < 1 or y_q < 1:
            raise ValueError(f"need n >= 1 and y >= 1, got n={n_q}, y={y_q}")
        m, y_int = math.floor(n_q), math.floor(y_q)
        counts = []
        if method in ("enumerative", "both"):
            table = self.factor_table(m) if m >= 2 else None
            counts.append(psi_enumerate(n_q, y_q, table, self.budgets.sieve_bytes))
        if method in ("recursive", "both"):
            counter = SmoothCounter(self.prime_table(max(2, min(m, y_int))), self.budgets.memo_cap)
            counts.append(psi_recursive(n_q, y_q, counter, self.budgets.memo_cap))
        rows = [count.to_row() for count in counts]
        passed = len({count.value for count in counts}) == 1
        return CommandResult("psi", rows, passed)

    def c_const(self, u: Number, n_max: int) -> CommandResult:
        table = self.factor_table(n_max) if n_max >= 2 else None
        constant = empirical_smooth_constant(u, n_max, table, self.budgets.sieve_bytes)
        return CommandResult("c-const", [constant.to_row()])

    def sieve_check(
        self,
        exhaustive: Optional[Tuple[int, int]] = None,
        trials: Optional[int] = None,
        seed: int = 0,
        n_max: int = 512,
        d_max: int = 32,
    ) -> CommandResult:
        exhaustive = tuple(exhaustive) if exhaustive else None
        if (exhaustive is None) == (trials is None):
            raise ValueError("give exactly one of --exhaustive n d or --random trials")
        if exhaustive is not None:
            report = verify_lemma_exhaustive(
                exhaustive[0], exhaustive[1], self.budgets.enumeration_cap, self.threads
            )
        else:
            report = verify_lemma_random(trials, n_max, d_max, seed, self.threads)
        return CommandResult("sieve-check", report.to_rows(), report.passed, report.notes)

    def linnik(self, N: int, B: Optional[int] = None, sweep: bool = False, steps: bool = False) -> CommandResult:
        if sweep:
            reports = theorem_sweep(
                N,
                threads=self.threads,
                memo_cap=self.budgets.memo_cap,
                cross_check_limit=self.budgets.cross_check_limit,
                budget_bytes=self.budgets.sieve_bytes,
            )
        else:
            if B is None:
                raise ValueError("--B is required unless --sweep is given")
            reports = [
                theorem_check(
                    N,
                    B,
                    self.prime_table(N),
                    self.threads,
                    self.budgets.memo_cap,
                    self.budgets.cross_check_limit,
                    self.budgets.replay_limit,
                    self.budgets.sieve_bytes,
                )
            ]
        passed = all(report.passed for report in reports)
        if steps:
            rows = merge_reports("linnik", [r.proof for r in reports]).to_rows()
        else:
            rows = [report.to_row() for report in reports]
        return CommandResult("linnik", rows, passed)

    def corollary(self, N: int, eps: Number, n_max_for_c: int) -> CommandResult:
        estimate = corollary_estimate(
            N,
            eps,
            n_max_for_c,
            self.prime_table(N),
            self.factor_table(n_max_for_c) if n_max_for_c >= 2 else None,
            self.threads,
            self.budgets.memo_cap,
            self.budgets.sieve_bytes,
        )
        return CommandResult("corollary", estimate.to_rows(), estimate.passed)

    def plot_data(
        self,
        what: str,
        eps: Number = "1/2",
        n_max: int = 10**6,
        points: int = 50,
        u_max: Number = 6,
        n_max_for_c: int = 10**5,
    ) -> CommandResult:
        """Two-column (x, y) series for plotting."""
        if what not in PLOT_KINDS:
            raise ValueError(f"--what must be one of {', '.join(PLOT_KINDS)}, got {what!r}")
        if points < 1:
            raise ValueError("points must be positive")
        if what == "defect":
            grid = sorted({int(x) for x in np.geomspace(10, max(n_max, 10), points)})
            windows = scan_windows(
                eps,
                grid,
                self.prime_table(grid[-1]),
                self.threads,
                exact_limit=self.budgets.exact_window_primes,
                budget_bytes=self.budgets.sieve_bytes,
            )
            rows = [{"x": int(w.n), "y": float(w.defect)} for w in windows]
        elif what == "c-const":
            table = self.factor_table(n_max_for_c)
            top = as_fraction(u_max)
            us = [1 + (top - 1) * i / max(points - 1, 1) for i in range(points)] if top > 1 else [top]
            rows = [
                {"x": float(u), "y": float(empirical_smooth_constant(u, n_max_for_c, table).c_empirical)}
                for u in us
            ]
        else:
            rows = []
            record = 0
            for entry in least_nonresidue_table(n_max, self.prime_table(n_max), self.threads):
                if entry.n_p > record:
                    record = entry.n_p
                    rows.append({"x": entry.p, "y": record})
        return CommandResult(f"plot-data {what}", rows)

