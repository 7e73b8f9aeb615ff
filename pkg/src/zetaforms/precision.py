"""Certified fixed-point reals.

A PrecReal represents a real number by an integer mantissa at a binary scale
together with an error radius counted in units of the last place:

    |true - mantissa * 2^-prec| <= err_ulps * 2^-prec.

The invariant is maintained conservatively: every operation widens the radius
enough to cover both the operands' uncertainty and its own rounding.  Exact
rationals enter with radius 0 or 1; arithmetic combines interval endpoints
(dyadic rationals, so Fraction arithmetic on them is exact and cheap) and
re-rounds.  Transcendental kernels (ln, e, 2^x, n-th roots) run on plain
integers with explicit ulp ledgers; their stated radii are proved by the
comments next to the loops, and the test suite additionally checks the
recompute-at-higher-precision soundness property for all of them.

Nothing here depends on floats or on any external numeric library.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

from .exact_arith import iroot

__all__ = [
    "PrecReal",
    "PrecisionError",
    "decimal_str",
    "e_constant",
    "exp2",
    "ln2",
    "ln_fraction",
    "ln_interval",
    "nth_root",
    "try_compare",
]

MAX_PRECISION_BITS = 1 << 20


class PrecisionError(ValueError):
    """Requested precision is unusable (non-positive or absurdly large)."""


def _check_prec(prec: int) -> None:
    if prec < 4 or prec > MAX_PRECISION_BITS:
        raise PrecisionError(f"precision {prec} outside [4, {MAX_PRECISION_BITS}]")


@dataclass(frozen=True)
class PrecReal:
    mantissa: int
    prec: int
    err_ulps: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.mantissa, 1 << self.prec)

    @property
    def error(self) -> Fraction:
        return Fraction(self.err_ulps, 1 << self.prec)

    @property
    def lo(self) -> Fraction:
        return Fraction(self.mantissa - self.err_ulps, 1 << self.prec)

    @property
    def hi(self) -> Fraction:
        return Fraction(self.mantissa + self.err_ulps, 1 << self.prec)

    @classmethod
    def from_fraction(cls, q: Fraction | int, prec: int) -> "PrecReal":
        _check_prec(prec)
        q = Fraction(q)
        num, den = q.numerator << prec, q.denominator
        m, rem = divmod(num, den)
        return cls(m, prec, 0 if rem == 0 else 1)

    @classmethod
    def from_interval(cls, lo: Fraction, hi: Fraction, prec: int) -> "PrecReal":
        _check_prec(prec)
        if lo > hi:
            raise ValueError("from_interval: lo > hi")
        scale = 1 << prec
        mlo = math.floor(lo * scale)
        mhi = math.ceil(hi * scale)
        mid = (mlo + mhi) // 2
        return cls(mid, prec, max(mid - mlo, mhi - mid))

    # interval arithmetic via exact dyadic endpoints

    def _coerce(self, other) -> "PrecReal | None":
        if isinstance(other, PrecReal):
            return other
        if isinstance(other, (int, Fraction)):
            return PrecReal.from_fraction(other, self.prec)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = max(self.prec, o.prec)
        return PrecReal.from_interval(self.lo + o.lo, self.hi + o.hi, p)

    __radd__ = __add__

    def __neg__(self):
        return PrecReal(-self.mantissa, self.prec, self.err_ulps)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        p = max(self.prec, o.prec)
        prods = [a * b for a in (self.lo, self.hi) for b in (o.lo, o.hi)]
        return PrecReal.from_interval(min(prods), max(prods), p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("divisor interval contains 0")
        p = max(self.prec, o.prec)
        quots = [a / b for a in (self.lo, self.hi) for b in (o.lo, o.hi)]
        return PrecReal.from_interval(min(quots), max(quots), p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        lo, hi = self.lo**e, self.hi**e
        if e % 2 == 0 and self.lo < 0 < self.hi:
            lo, hi = Fraction(0), max(lo, hi)
        elif lo > hi:
            lo, hi = hi, lo
        return PrecReal.from_interval(lo, hi, self.prec)

    def round_to(self, prec: int) -> "PrecReal":
        return PrecReal.from_interval(self.lo, self.hi, prec)


def try_compare(x: PrecReal | Fraction | int, y: PrecReal | Fraction | int) -> int | None:
    """-1 / +1 when the certified intervals separate, None when they overlap."""

    def ends(v):
        if isinstance(v, PrecReal):
            return v.lo, v.hi
        return Fraction(v), Fraction(v)

    xlo, xhi = ends(x)
    ylo, yhi = ends(y)
    if xhi < ylo:
        return -1
    if yhi < xlo:
        return 1
    return None


# -- ln ----------------------------------------------------------------------

_ln2_lock = threading.Lock()
_ln2_cache: dict[int, tuple[int, int]] = {}


def _atanh_series(Z: int, p: int, z_err: int) -> tuple[int, int]:
    """(acc, err_ulps) with acc*2^-p ~ atanh(Z*2^-p); needs |Z*2^-p| <= 0.34.

    Per step the power picks up a factor z^2 <= 1/8, so the inherited error
    shrinks by >= 8 while rounding adds O(1) ulps; the ledger below majorizes
    that.  Truncation stops once the power (plus its ledger) is below 1 ulp,
    and the remaining tail is dominated by the last power's bound.
    """
    W = (Z * Z) >> p  # z^2 at scale p, error <= 2|Z|/2^p + 1 + 2*z_err <= 2*z_err + 2
    w_err = 2 * z_err + 2
    acc, acc_err = 0, 0
    pw, pw_err = Z, z_err
    k = 0
    while True:
        term = pw // (2 * k + 1) if pw >= 0 else -((-pw) // (2 * k + 1))
        acc += term
        acc_err += pw_err // (2 * k + 1) + 2
        if abs(pw) <= pw_err + 1:
            # tail <= sum |z|^(2m+1) <= 2|z^(2k+3)| plus uncertainty already in pw
            acc_err += abs(pw) + pw_err + 2
            return acc, acc_err
        pw = (pw * W) >> p
        pw_err = (pw_err >> 3) + ((abs(pw) * w_err) >> p) + 3
        k += 1
        if k > p:
            raise AssertionError("atanh series failed to converge")


def ln2(prec: int) -> PrecReal:
    """ln 2 = 2*atanh(1/3), cached per scale."""
    _check_prec(prec)
    p = prec + 24
    with _ln2_lock:
        if p not in _ln2_cache:
            Z = (1 << p) // 3
            acc, err = _atanh_series(Z, p, 1)
            _ln2_cache[p] = (2 * acc, 2 * err)
        m, e = _ln2_cache[p]
    return PrecReal(m, p, e)


def ln_fraction(q: Fraction | int, prec: int) -> PrecReal:
    """Certified ln q for rational q > 0; radius well below 2^-prec."""
    _check_prec(prec)
    q = Fraction(q)
    if q <= 0:
        raise ValueError(f"ln_fraction: need q > 0, got {q}")
    p = prec + 24
    e = q.numerator.bit_length() - q.denominator.bit_length()
    m = q / Fraction(2) ** e
    if m >= Fraction(3, 2):
        m /= 2
        e += 1
    elif m < Fraction(3, 4):
        m *= 2
        e -= 1
    # m in [3/4, 3/2) so z = (m-1)/(m+1) in (-1/7, 1/5]
    z = (m - 1) / (m + 1)
    Z_num = z.numerator << p
    Z = Z_num // z.denominator if Z_num >= 0 else -((-Z_num) // z.denominator)
    acc, err = _atanh_series(Z, p, 1)
    total = 2 * acc
    total_err = 2 * err
    if e:
        l2 = ln2(prec)
        total += e * l2.mantissa
        total_err += abs(e) * l2.err_ulps
    return PrecReal(total, p, total_err + 1)


def ln_interval(x: PrecReal, prec: int) -> PrecReal:
    """ln over a certified interval (monotone hull of the endpoint lns)."""
    if x.lo <= 0:
        raise ValueError("ln_interval: interval must be strictly positive")
    lo = ln_fraction(x.lo, prec)
    hi = ln_fraction(x.hi, prec)
    return PrecReal.from_interval(lo.lo, hi.hi, prec + 8)


# -- e, roots, powers of two -------------------------------------------------


def e_constant(prec: int) -> PrecReal:
    """sum 1/k! with the first omitted term bounding the tail."""
    _check_prec(prec)
    p = prec + 16
    acc, acc_err = 0, 0
    term = 1 << p
    k = 0
    while term:
        acc += term
        acc_err += 2  # truncation drift of term plus the running sum's rounding
        k += 1
        term //= k
    # tail of sum 1/m! past k terms is < 2/k!; the loop exits with 1/k! < 2^-p
    return PrecReal(acc, p, acc_err + 2)


def nth_root(x: PrecReal | Fraction | int, k: int, prec: int) -> PrecReal:
    """Certified x^(1/k) for x >= 0."""
    _check_prec(prec)
    if k < 1:
        raise ValueError(f"nth_root: need k >= 1, got {k}")
    if isinstance(x, PrecReal):
        lo, hi = x.lo, x.hi
    else:
        lo = hi = Fraction(x)
    if lo < 0:
        raise ValueError("nth_root: negative radicand")

    def root_floor(q: Fraction) -> Fraction:
        v = (q.numerator << (k * prec)) // q.denominator
        return Fraction(iroot(v, k), 1 << prec)

    r_lo = root_floor(lo)
    r_hi = root_floor(hi) + Fraction(2, 1 << prec)
    return PrecReal.from_interval(r_lo, r_hi, prec)


_sqrt2_lock = threading.Lock()
_sqrt2_chain: dict[int, list[tuple[int, int]]] = {}


def _chain_27(p: int, depth: int) -> list[tuple[int, int]]:
    """(mantissa, err) for 2^(2^-i), i = 1..depth, at scale p, by repeated sqrt.

    Each entry sqrt halves the inherited relative error and adds one floor
    rounding, so a ledger of 2 ulps is stationary.
    """
    with _sqrt2_lock:
        chain = _sqrt2_chain.setdefault(p, [])
        while len(chain) < depth:
            base = chain[-1][0] if chain else (2 << p)
            chain.append((math.isqrt(base << p), 2))
        return list(chain[:depth])


def _exp2_dyadic(num: int, scale_bits: int, prec: int) -> tuple[Fraction, Fraction]:
    """Certified enclosure of 2^(num * 2^-scale_bits) as (lo, hi) Fractions."""
    q, f = divmod(num, 1 << scale_bits) if scale_bits else (num, 0)
    p = prec + 32
    depth = min(scale_bits, p)
    f >>= scale_bits - depth  # dropping low bits only lowers the exponent...
    chain = _chain_27(p, depth) if depth else []
    res, res_err = 1 << p, 0
    for i in range(1, depth + 1):
        if (f >> (depth - i)) & 1:
            c, c_err = chain[i - 1]
            res_err = ((res_err * (c + c_err)) >> p) + ((res * c_err) >> p) + 2
            res = (res * c) >> p
    # ...by less than 2^(2^-depth) - 1 < 2^(1-depth), absorbed into the radius
    if depth < scale_bits:
        res_err += (res >> (depth - 1)) + 1
    lo = Fraction(res - res_err, 1 << p)
    hi = Fraction(res + res_err + 1, 1 << p)
    two_q = Fraction(2) ** q
    return lo * two_q, hi * two_q


def _scale_pow2(x: PrecReal, z: int) -> PrecReal:
    """Exact multiplication by 2^z: only the scale field moves."""
    if x.prec - z < 4:
        pad = 4 + z - x.prec
        return PrecReal(x.mantissa << pad, 4, x.err_ulps << pad)
    return PrecReal(x.mantissa, x.prec - z, x.err_ulps)


def exp2(x: PrecReal | Fraction | int, prec: int) -> PrecReal:
    """Certified 2^x (monotone hull over the argument's interval).

    Rational exponents go through an integer root of a power of two; PrecReal
    exponents have dyadic endpoints and use the repeated-sqrt bit chain.
    """
    _check_prec(prec)
    if not isinstance(x, PrecReal):
        q = Fraction(x)
        z = math.floor(q)
        frac = q - z
        if frac == 0:
            return _scale_pow2(PrecReal(1 << prec, prec, 0), z)
        root = nth_root(Fraction(2) ** frac.numerator, frac.denominator, prec + 4)
        return _scale_pow2(root, z)
    los, his = [], []
    for q in (x.lo, x.hi):
        scale = q.denominator.bit_length() - 1  # dyadic by construction
        if (1 << scale) != q.denominator:
            raise ValueError("exp2: endpoint denominators must be powers of two")
        lo, hi = _exp2_dyadic(q.numerator, scale, prec)
        los.append(lo)
        his.append(hi)
    return PrecReal.from_interval(min(los), max(his), prec)


# -- decimal rendering -------------------------------------------------------


def _floor_log10(num: int, p: int) -> int:
    """floor(log10(num * 2^-p)) for num > 0, exactly."""
    e = ((num.bit_length() - 1 - p) * 30103) // 100000

    def at_least(exp10: int) -> bool:
        if exp10 >= 0:
            return num >= 10**exp10 << p
        return num * 10**-exp10 >= 1 << p

    while not at_least(e):
        e -= 1
    while at_least(e + 1):
        e += 1
    return e


def decimal_str(x: PrecReal) -> str:
    """Decimal rendering truncated at the certified digit, with error suffix.

    Only digits the radius cannot touch are printed; the suffix states the
    certified bound as a power of two, e.g. "1.2020569e0 ± 2^-120".
    """
    b = x.err_ulps.bit_length()
    k = x.prec - b
    m = abs(x.mantissa)
    sign = "-" if x.mantissa < 0 else ""
    if m == 0 or m <= x.err_ulps:
        return f"0 ± 2^-{k}"
    digits = max(1, ((m.bit_length() - b - 1) * 30103) // 100000)
    e10 = _floor_log10(m, x.prec)
    a = digits - 1 - e10
    if a >= 0:
        N = (m * 10**a) >> x.prec
    else:
        N = m // (10**-a << x.prec)
    text = str(N)
    if len(text) != digits:
        raise AssertionError(f"digit extraction drifted: {text} vs {digits} digits")
    body = text if digits == 1 else f"{text[0]}.{text[1:]}"
    return f"{sign}{body}e{e10} ± 2^-{k}"
