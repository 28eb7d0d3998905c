"""Tests for smooth-number counting."""

import math
from fractions import Fraction

import pytest

from linniksieve.core_arith import sieve_primes
from linniksieve.exceptions import CapacityError, RecursionBudgetError
from linniksieve.smooth import (
    SmoothCounter,
    SmoothMethod,
    cross_check_methods,
    decomposition_residual,
    empirical_smooth_constant,
    induction_step_check,
    largest_prime_factor_table,
    psi_enumerate,
    psi_recursive,
    verify_decomposition,
)

from .oracles import largest_prime_factor, psi


class TestLargestPrimeFactorTable:
    def setup_method(self):
        self.table = largest_prime_factor_table(1000)

    def test_matches_trial_division(self):
        """Test the table against trial division."""
        for m in range(0, 1001):
            assert self.table[m] == largest_prime_factor(m), m

    def test_small_entries(self):
        """Test entries 0, 1 and small primes."""
        assert self.table[0] == 0
        assert self.table[1] == 1
        assert self.table[12] == 3
        assert self.table[97] == 97
        assert len(self.table) == 1001

    def test_rejects_tiny_limit(self):
        """Test rejection of limits below 2."""
        with pytest.raises(ValueError):
            largest_prime_factor_table(1)

    def test_budget(self):
        """Test the table memory budget."""
        with pytest.raises(CapacityError):
            largest_prime_factor_table(10**6, budget_bytes=1024)

    def test_counts_by_bound(self):
        """Test counts for every y at once."""
        counts = self.table.smooth_counts_by_bound(100, 10)
        assert counts[0] == 0
        assert counts[1] == 1
        assert counts[2] == 7
        assert counts[3] == 20
        assert counts[10] == psi(100, 10)

    def test_prefix_counts(self):
        """Test counts for every n at once."""
        counts = self.table.smooth_prefix_counts(3, 100)
        assert counts[0] == 0
        assert counts[10] == psi(10, 3)
        assert counts[100] == 20

    def test_count_beyond_limit(self):
        """Test counting past the table limit."""
        with pytest.raises(ValueError):
            self.table.count_smooth(1001, 2)


class TestPsi:
    @pytest.mark.parametrize("n,y,expected", [(10, 2, 4), (100, 3, 20), (1, 1, 1), (7, 1, 1), (50, 50, 50)])
    def test_known_values(self, n, y, expected):
        """Test known Psi values both ways."""
        assert psi_enumerate(n, y).value == expected
        assert psi_recursive(n, y).value == expected

    def test_against_oracle(self):
        """Test against the brute-force oracle."""
        table = largest_prime_factor_table(200)
        counter = SmoothCounter(sieve_primes(200))
        for n in range(1, 200, 7):
            for y in range(1, 16):
                expected = psi(n, y)
                assert psi_enumerate(n, y, table).value == expected
                assert counter.psi(n, y) == expected

    def test_real_arguments_floor(self):
        """Test real n and y."""
        count = psi_recursive("201/2", "7/2")
        assert count.value == 20
        assert count.n == Fraction(201, 2)
        assert count.method is SmoothMethod.RECURSIVE
        assert psi_enumerate("3/2", 5).value == 1

    @pytest.mark.parametrize("n,y", [("1/2", 3), (10, "1/2"), (0, 2)])
    def test_invalid_arguments(self, n, y):
        """Test rejection of n or y below 1."""
        with pytest.raises(ValueError):
            psi_recursive(n, y)
        with pytest.raises(ValueError):
            psi_enumerate(n, y)

    def test_counter_below_one_counts_nothing(self):
        """Test that n < 1 counts nothing."""
        counter = SmoothCounter(sieve_primes(10))
        assert counter.psi("1/2", 3) == 0

    def test_methods_agree_at_a_million(self):
        """Test both methods at n = 10^6."""
        table = largest_prime_factor_table(10**6)
        counter = SmoothCounter(sieve_primes(1000))
        for y in (2, 7, 100, 997):
            assert counter.psi(10**6, y) == table.count_smooth(10**6, y)

    def test_memo_cap(self):
        """Test the memo cap."""
        counter = SmoothCounter(sieve_primes(100), memo_cap=1)
        with pytest.raises(RecursionBudgetError):
            counter.psi(10**6, 50)

    def test_memo_is_reused(self):
        """Test that a shared counter reuses its memo."""
        counter = SmoothCounter(sieve_primes(100))
        counter.psi(10**5, 30)
        size = len(counter)
        assert size > 0
        counter.psi(10**5, 30)
        assert len(counter) == size

    def test_count_rejects_missing_primes(self):
        """Test a prime index beyond the table."""
        counter = SmoothCounter(sieve_primes(10))
        with pytest.raises(ValueError):
            counter.count(100, 5)

    def test_row(self):
        """Test the count row."""
        row = psi_enumerate(10, 2).to_row()
        assert row == {"n": Fraction(10), "y": Fraction(2), "psi": 4, "method": "enumerative"}


class TestDecomposition:
    def test_residual_is_zero(self):
        """Test a zero residual term by term."""
        for n in (10, 100, 997, 5000):
            for y in (2, 3, 10, 31):
                assert decomposition_residual(n, y) == 0

    def test_verify_decomposition(self):
        """Test the identity for every n <= 500."""
        report = verify_decomposition(500)
        assert report.passed
        assert report.checks[0].lhs == 0

    def test_verify_decomposition_to_ten_thousand(self):
        """Every n <= 10^4 at every prime y."""
        report = verify_decomposition(10_000)
        assert report.passed
        assert report.checks[0].lhs == 0

    def test_verify_needs_range(self):
        """Test rejection of n_max < 2."""
        with pytest.raises(ValueError):
            verify_decomposition(1)

    def test_cross_check(self):
        """Test both methods on a grid."""
        table = largest_prime_factor_table(300)
        counter = SmoothCounter(sieve_primes(300))
        report = cross_check_methods(list(range(1, 301)), [1, 2, 3, 5, 7, 10, 50, 300], table, counter)
        assert report.passed
        assert report.params == {"n_count": 300, "y_count": 8}


class TestMethodsAgree:
    """Recursion against enumeration over the full range up to 10^5."""

    LIMIT = 100_000

    def setup_method(self):
        self.table = largest_prime_factor_table(self.LIMIT)
        self.primes = sieve_primes(self.LIMIT)

    def test_spot_values(self):
        """Psi(10, 2) = 4 and Psi(100, 3) = 20 both ways."""
        assert psi_enumerate(10, 2, self.table).value == psi_recursive(10, 2).value == 4
        assert psi_enumerate(100, 3, self.table).value == psi_recursive(100, 3).value == 20

    @pytest.mark.slow
    def test_every_n_for_small_y(self):
        """All n <= 10^5 for y up to 11, including the steps just below each prime."""
        n_values = list(range(1, self.LIMIT + 1))
        for y in (1, 2, 3, 4, 5, 6, 7, 10, 11):
            counter = SmoothCounter(self.primes)
            report = cross_check_methods(n_values, [y], self.table, counter)
            assert report.passed, y

    @pytest.mark.slow
    def test_every_prime_boundary(self):
        """At each y = p and y = p - 1 for every prime p <= n."""
        counter = SmoothCounter(self.primes)
        for n in (10, 97, 100, 1000, 9973, 10_000, 31_622, 65_536, 99_991, self.LIMIT):
            by_bound = self.table.smooth_counts_by_bound(n, n)
            for p in self.primes.upto(n).tolist():
                assert counter.psi(n, p) == int(by_bound[p]), (n, p)
                assert counter.psi(n, p - 1) == int(by_bound[p - 1]), (n, p - 1)


class TestSmoothConstant:
    def test_u_one_is_trivial(self):
        """Test the constant for u = 1."""
        constant = empirical_smooth_constant(1, 100)
        assert constant.c_empirical == 1
        assert constant.argmin_n == 1
        assert constant.c_real_lower == Fraction(1, 2)

    def test_u_two_against_oracle(self):
        """Test u = 2 against the oracle."""
        expected = min(Fraction(psi(n, math.isqrt(n)), n) for n in range(1, 201))
        constant = empirical_smooth_constant(2, 200)
        assert constant.c_empirical == expected
        n = constant.argmin_n
        assert Fraction(psi(n, math.isqrt(n)), n) == expected
        assert constant.c_real_lower <= constant.c_empirical

    def test_larger_u_gives_smaller_constant(self):
        """Test that the constant decreases in u."""
        table = largest_prime_factor_table(10**4)
        values = [empirical_smooth_constant(u, 10**4, table).c_empirical for u in (1, 2, 3, 4)]
        assert values == sorted(values, reverse=True)
        assert all(0 < value <= 1 for value in values)

    def test_single_point(self):
        """Test n_max = 1."""
        constant = empirical_smooth_constant(3, 1)
        assert constant.c_empirical == 1
        assert constant.n_max == 1

    def test_invalid(self):
        """Test rejection of bad u and n_max."""
        with pytest.raises(ValueError):
            empirical_smooth_constant(0, 100)
        with pytest.raises(ValueError):
            empirical_smooth_constant(2, 0)

    def test_row_has_adjustment(self):
        """Test the adjustment factor in the row."""
        row = empirical_smooth_constant(2, 100).to_row()
        assert set(row) >= {"u", "n_max", "c_empirical", "argmin_n", "adjustment", "c_real_lower"}


class TestInductionStep:
    def test_step_holds(self):
        """Test the induction step at n = 10^4, u = 2."""
        report = induction_step_check(10**4, 2)
        assert report.passed
        assert report.params["window"] == "(39,100]"

    @pytest.mark.parametrize("n,u", [(10**5, 3), (12345, "5/2"), (10**6, 4)])
    def test_step_holds_elsewhere(self, n, u):
        """Test the induction step on other (n, u)."""
        assert induction_step_check(n, u).passed

    def test_requires_u_above_one(self):
        """Test rejection of u <= 1."""
        with pytest.raises(ValueError):
            induction_step_check(100, 1)
