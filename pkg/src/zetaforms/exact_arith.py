"""Exact integer and rational arithmetic helpers.

Everything in this module is exact: big rationals are ``fractions.Fraction``
(always normalized to lowest terms), polynomials and truncated power series
are plain coefficient lists ``list[Fraction]`` indexed by power.  A list of
length ``m + 1`` represents either a polynomial of degree <= m or a series
truncated after t^m; which one is meant is documented at each call site.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction

__all__ = [
    "PolySeries",
    "bernoulli",
    "divisors",
    "iroot",
    "lcm_upto",
    "padic_valuation",
    "parse_rational",
    "poly_mul",
    "primes_upto",
    "primorial_below",
    "rational_str",
    "series_inv",
    "series_mul",
    "series_shift",
]

PolySeries = list[Fraction]

_cache_lock = threading.Lock()
_prime_cache: tuple[int, list[int]] = (1, [])
_bernoulli_cache: list[Fraction] = []
_bernoulli_row: list[Fraction] = []


def lcm_upto(n: int) -> int:
    """lcm(1, 2, ..., n); returns 1 for n <= 1."""
    if n <= 1:
        return 1
    return math.lcm(*range(2, n + 1))


def primes_upto(limit: int) -> list[int]:
    """All primes <= limit, by sieve.  The sieve is cached and only grows."""
    global _prime_cache
    if limit < 2:
        return []
    with _cache_lock:
        cached_limit, cached = _prime_cache
        if limit <= cached_limit:
            return [p for p in cached if p <= limit]
        size = max(limit, 2 * cached_limit, 64)
        mask = bytearray([1]) * (size + 1)
        mask[0] = mask[1] = 0
        for p in range(2, math.isqrt(size) + 1):
            if mask[p]:
                mask[p * p :: p] = bytearray(len(mask[p * p :: p]))
        primes = [i for i, flag in enumerate(mask) if flag]
        _prime_cache = (size, primes)
        return [p for p in primes if p <= limit]


def primorial_below(x: Fraction | int) -> int:
    """Product of all primes p <= x (empty product 1 for x < 2).

    The threshold may be rational; callers that need an irrational threshold
    resolve the comparison on their side and pass a rational bound.
    """
    bound = math.floor(x)
    result = 1
    for p in primes_upto(bound):
        if p <= x:
            result *= p
    return result


def divisors(m: int) -> list[int]:
    """Sorted positive divisors of m >= 1."""
    if m < 1:
        raise ValueError(f"divisors: need m >= 1, got {m}")
    small, large = [], []
    for d in range(1, math.isqrt(m) + 1):
        if m % d == 0:
            small.append(d)
            if d * d != m:
                large.append(m // d)
    return small + large[::-1]


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    for q in range(2, math.isqrt(p) + 1):
        if p % q == 0:
            return False
    return True


def padic_valuation(p: int, q: Fraction | int) -> int:
    """v_p(q) for a prime p and nonzero rational q (negative for denominators)."""
    if not _is_prime(p):
        raise ValueError(f"padic_valuation: {p} is not prime")
    q = Fraction(q)
    if q == 0:
        raise ValueError("padic_valuation: undefined at 0")

    def _val(n: int) -> int:
        v = 0
        while n % p == 0:
            n //= p
            v += 1
        return v

    return _val(abs(q.numerator)) - _val(q.denominator)


def bernoulli(k: int) -> Fraction:
    """Bernoulli number B_k by the Akiyama-Tanigawa recurrence, memoized.

    Convention B_1 = +1/2; only even indices matter downstream, where the two
    conventions agree.
    """
    if k < 0:
        raise ValueError(f"bernoulli: need k >= 0, got {k}")
    with _cache_lock:
        while len(_bernoulli_cache) <= k:
            m = len(_bernoulli_cache)
            _bernoulli_row.append(Fraction(1, m + 1))
            for j in range(m, 0, -1):
                _bernoulli_row[j - 1] = j * (_bernoulli_row[j - 1] - _bernoulli_row[j])
            _bernoulli_cache.append(_bernoulli_row[0])
        return _bernoulli_cache[k]


def iroot(n: int, k: int) -> int:
    """Floor of the k-th root of n >= 0 (exact, Newton iteration on integers)."""
    if n < 0 or k < 1:
        raise ValueError(f"iroot: need n >= 0 and k >= 1, got n={n}, k={k}")
    if n < 2 or k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    x = 1 << (n.bit_length() // k + 1)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    return x


# -- polynomial / series helpers ---------------------------------------------


def poly_mul(a: PolySeries, b: PolySeries) -> PolySeries:
    """Exact polynomial product (no truncation)."""
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def series_mul(a: PolySeries, b: PolySeries, order: int) -> PolySeries:
    """Product truncated after t^order."""
    out = [Fraction(0)] * (order + 1)
    for i, ai in enumerate(a[: order + 1]):
        if ai:
            for j in range(min(len(b), order + 1 - i)):
                out[i + j] += ai * b[j]
    return out


def series_inv(a: PolySeries, order: int) -> PolySeries:
    """Series inverse of a with a[0] != 0, truncated after t^order."""
    if not a or a[0] == 0:
        raise ValueError("series_inv: constant term must be nonzero")
    inv0 = 1 / Fraction(a[0])
    out = [inv0] + [Fraction(0)] * order
    for m in range(1, order + 1):
        acc = Fraction(0)
        for i in range(1, min(m, len(a) - 1) + 1):
            acc += a[i] * out[m - i]
        out[m] = -inv0 * acc
    return out


def series_shift(a: PolySeries, c: Fraction) -> PolySeries:
    """Recenter a polynomial: coefficients of p(t + c) given those of p(t)."""
    n = len(a)
    out = [Fraction(0)] * n
    for m, am in enumerate(a):
        if am:
            pw = Fraction(1)
            for i in range(m, -1, -1):
                out[i] += am * math.comb(m, i) * pw
                pw *= c
    return out


# -- serialization of rationals ----------------------------------------------


def rational_str(q: Fraction | int) -> str:
    """Lowest-terms "p/q" form; integers render without the "/1"."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    """Inverse of rational_str; also accepts plain integer strings."""
    return Fraction(text.strip())
