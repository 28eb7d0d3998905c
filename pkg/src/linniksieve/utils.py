"""Exact arithmetic helpers shared by the number-theory modules."""

import math
import sys
from contextlib import contextmanager
from fractions import Fraction
from numbers import Rational
from typing import Iterator, Union

Number = Union[int, float, str, Fraction]

# Beyond this many bits in x**a the exact root path is abandoned for the
# guarded floating point one.
MAX_EXACT_BITS = 1 << 20


def as_fraction(value: Number) -> Fraction:
    """
    Convert user input to an exact rational.

    Floats go through their shortest repr, so ``0.5`` becomes ``1/2`` and
    ``0.37`` becomes ``37/100`` rather than the binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"Expected a finite number, got {value}")
        return Fraction(repr(value))
    return Fraction(str(value).strip())


def iroot(n: int, k: int) -> int:
    """Largest integer r with r**k <= n."""
    if n < 0:
        raise ValueError("iroot is defined for non-negative integers")
    if k < 1:
        raise ValueError("root index must be positive")
    if n < 2 or k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def floor_power(x: Number, exponent: Number) -> int:
    """Exact floor of x**exponent for x >= 1 and exponent >= 0."""
    base = as_fraction(x)
    e = as_fraction(exponent)
    if base < 1 or e < 0:
        raise ValueError("floor_power needs x >= 1 and a non-negative exponent")
    a, b = e.numerator, e.denominator
    if a * base.numerator.bit_length() > MAX_EXACT_BITS:
        return _guarded_floor_power(base, e)
    return iroot(base.numerator**a // base.denominator**a, b)


def ceil_power(x: Number, exponent: Number) -> int:
    """Exact ceiling of x**exponent for x >= 1 and exponent >= 0."""
    base = as_fraction(x)
    e = as_fraction(exponent)
    r = floor_power(base, e)
    a, b = e.numerator, e.denominator
    if a * base.numerator.bit_length() > MAX_EXACT_BITS:
        return r if math.isclose(r, float(base) ** float(e), rel_tol=0) else r + 1
    if Fraction(r) ** b == base**a:
        return r
    return r + 1


def compare_power(value: Number, base: Number, exponent: Number) -> int:
    """
    Sign of ``value - base**exponent`` computed exactly.

    ``value`` must be non-negative and ``base`` positive; the exponent may be
    any rational, including negative ones.
    """
    v = as_fraction(value)
    x = as_fraction(base)
    e = as_fraction(exponent)
    if v < 0 or x <= 0:
        raise ValueError("compare_power needs value >= 0 and base > 0")
    lhs = v**e.denominator
    rhs = x**e.numerator
    return (lhs > rhs) - (lhs < rhs)


def _guarded_floor_power(base: Fraction, e: Fraction) -> int:
    estimate = math.floor(math.exp(float(e) * math.log(base)))
    log_target = float(e) * math.log(base)
    # Test the neighbours on both sides of the float estimate.
    for candidate in (estimate + 1, estimate, estimate - 1):
        if candidate >= 1 and math.log(candidate) <= log_target:
            return candidate
    return max(estimate - 1, 0)


def integer_log(n: int, p: int) -> int:
    """Number of k >= 1 with p**k <= n."""
    if p < 2:
        raise ValueError("integer_log needs a base of at least 2")
    k = 0
    power = p
    while power <= n:
        k += 1
        power *= p
    return k


@contextmanager
def unlimited_int_digits() -> Iterator[None]:
    """Lift the interpreter's cap on int-to-str conversion for the block."""
    get_limit = getattr(sys, "get_int_max_str_digits", None)
    if get_limit is None:
        yield
        return
    previous = get_limit()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(previous)


def fraction_text(value: Union[int, Fraction]) -> str:
    """
    Render a rational as ``num/den`` (integers get ``/1``).

    Exact Mertens sums carry tens of thousands of digits, past the default
    conversion limit.
    """
    q = Fraction(value)
    with unlimited_int_digits():
        return f"{q.numerator}/{q.denominator}"


def fraction_approx(value: Union[int, float, Fraction]) -> str:
    """Float approximation with 12 significant digits, locale independent."""
    return f"{float(value):.12g}"

