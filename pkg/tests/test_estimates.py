"""Tests for the Mertens windows and the prime-valuation bounds."""

import math
from fractions import Fraction

import pytest

from linniksieve.core_arith import sieve_primes
from linniksieve.estimates import (
    MultinomialSpec,
    check_multinomial_mass,
    check_reciprocal_shift,
    check_valuation_bounds,
    exact_reciprocal_sum,
    factorial_prime_valuation,
    first_stable_nonnegative,
    mertens_defect_scan,
    multinomial_prime_valuation,
    prime_reciprocal_sum,
    scan_windows,
)

from .oracles import primes_upto


class TestValuations:
    @pytest.mark.parametrize("n,p,expected", [(10, 2, 8), (100, 5, 24), (0, 3, 0), (6, 7, 0), (25, 5, 6)])
    def test_factorial_valuation(self, n, p, expected):
        """Test Legendre's formula on small factorials."""
        assert factorial_prime_valuation(n, p) == expected

    def test_factorial_valuation_matches_direct_count(self):
        """Test the valuation against factoring each term."""
        for n in range(0, 60):
            value = math.factorial(n)
            for p in primes_upto(60):
                count = 0
                while value % p == 0:
                    value //= p
                    count += 1
                value = math.factorial(n)
                assert factorial_prime_valuation(n, p) == count

    def test_multinomial_valuation(self):
        """Test valuations of 4!/(2!2!)."""
        # C(4, 2) = 6
        assert multinomial_prime_valuation(MultinomialSpec((2, 2)), 2) == 1
        assert multinomial_prime_valuation(MultinomialSpec((2, 2)), 3) == 1
        assert multinomial_prime_valuation(MultinomialSpec((2, 2)), 5) == 0

    def test_parts_validation(self):
        """Test part validation and derived n and t."""
        with pytest.raises(ValueError):
            MultinomialSpec(())
        with pytest.raises(ValueError):
            MultinomialSpec((3, -1))
        spec = MultinomialSpec([3, 4, 5])
        assert spec.parts == (3, 4, 5)
        assert spec.n == 12
        assert spec.t == 3

    def test_rejects_non_prime_base(self):
        """Test rejection of a composite base."""
        with pytest.raises(ValueError):
            factorial_prime_valuation(10, 1)
        with pytest.raises(ValueError):
            factorial_prime_valuation(-1, 2)

    def test_bounds_hold_on_many_compositions(self):
        """Test the valuation bounds over many compositions."""
        for parts in [(1,), (5, 5), (3, 4, 5), (10, 0, 7), (50, 25, 25), (7, 7, 7, 7)]:
            spec = MultinomialSpec(parts)
            for p in primes_upto(60):
                report = check_valuation_bounds(spec, p)
                assert report.passed, report.failures
                assert len(report.checks) == 4

    def test_multinomial_mass(self):
        """Test the multinomial mass identity."""
        for n in range(0, 30):
            for t in range(1, 6):
                assert check_multinomial_mass(n, t).passed

    def test_multinomial_mass_rejects_bad_input(self):
        """Test rejection of bad n or t."""
        with pytest.raises(ValueError):
            check_multinomial_mass(5, 0)


class TestReciprocalSums:
    def test_exact_sum(self):
        """Test an exact reciprocal sum."""
        assert exact_reciprocal_sum([2, 3, 6]) == 1
        assert exact_reciprocal_sum([]) == 0
        assert exact_reciprocal_sum([7]) == Fraction(1, 7)

    def test_window_to_a_hundred(self):
        """Test the window (10, 100]."""
        window = prime_reciprocal_sum(100, "1/2")
        assert window.lo == 10
        assert window.hi == 100
        assert window.prime_count == 21
        assert window.exact
        assert window.total == sum(Fraction(1, p) for p in primes_upto(100) if p > 10)
        assert window.value == pytest.approx(0.6266, abs=1e-3)
        assert window.defect == window.total - Fraction(1, 2)

    def test_float_path_has_a_valid_error_bound(self, primes_10k):
        """Test the float path against the exact sum."""
        exact = prime_reciprocal_sum(10_000, "1/2", primes_10k)
        approx = prime_reciprocal_sum(10_000, "1/2", primes_10k, exact_limit=0)
        assert exact.exact and not approx.exact
        assert approx.error_bound > 0
        assert abs(Fraction(approx.total) - exact.total) <= Fraction(approx.error_bound)

    def test_rational_n_and_float_eps(self):
        """Test rational n with a decimal eps."""
        window = prime_reciprocal_sum("201/2", 0.5)
        assert window.hi == 100
        assert window.eps == Fraction(1, 2)
        # sqrt(100.5) is just above 10
        assert window.lo == 10

    @pytest.mark.parametrize("n,eps", [(1, "1/2"), (100, 0), (100, 1), (100, "3/2")])
    def test_invalid_windows(self, n, eps):
        """Test rejection of n < 2 and eps outside (0, 1)."""
        with pytest.raises(ValueError):
            prime_reciprocal_sum(n, eps)

    @pytest.mark.parametrize("n", [10**4, 10**5, 10**6])
    def test_defect_is_nonnegative_at_half(self, n):
        """Test a non-negative defect at eps = 1/2."""
        window = prime_reciprocal_sum(n, "1/2")
        assert window.defect >= 0

    def test_row_shape(self):
        """Test the window row."""
        row = prime_reciprocal_sum(100, "1/2").to_row()
        assert list(row) == ["n", "eps", "lo", "hi", "primes", "sum", "defect", "exact", "error_bound"]
        assert row["primes"] == 21
        assert isinstance(row["sum"], Fraction)

    def test_reciprocal_shift(self):
        """Test the telescoping step."""
        for n in (30, 100, 1000):
            for eps in ("1/3", "1/2", "2/3"):
                report = check_reciprocal_shift(n, eps)
                assert report.passed, report.failures


class TestScans:
    def test_scan_matches_single_windows(self):
        """Test that a scan matches single windows."""
        primes = sieve_primes(2000)
        grid = [100, 500, 2000]
        windows = scan_windows("1/2", grid, primes)
        assert [w.hi for w in windows] == grid
        for n, window in zip(grid, windows):
            assert window == prime_reciprocal_sum(n, "1/2", primes)

    def test_scan_is_thread_independent(self):
        """Test a scan for one and several threads."""
        grid = list(range(50, 1000, 37))
        assert scan_windows("1/3", grid, threads=1) == scan_windows("1/3", grid, threads=3)

    def test_empty_and_invalid_grids(self):
        """Test empty and invalid grids."""
        assert scan_windows("1/2", []) == []
        with pytest.raises(ValueError):
            scan_windows("1/2", [1, 100])

    def test_defect_scan_pairs(self):
        """Test (n, defect) pairs."""
        points = mertens_defect_scan("1/2", [100, 1000])
        assert [n for n, _ in points] == [100, 1000]
        assert points[0][1] == prime_reciprocal_sum(100, "1/2").defect

    def test_first_stable_nonnegative(self):
        """Test the first stable non-negative point."""
        points = [(1, -1), (2, 1), (3, -0.5), (4, 0), (5, 2)]
        assert first_stable_nonnegative(points) == 4
        assert first_stable_nonnegative([(1, 0.1), (2, 0.2)]) == 1
        assert first_stable_nonnegative([(1, 0.1), (2, -0.2)]) is None
        assert first_stable_nonnegative([]) is None
