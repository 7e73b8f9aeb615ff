"""Certified numerics: Hurwitz zeta, series values, and asymptotic rates.

Three independent evaluation routes live here.

sum_series adds the values R(m + j/D) for m >= n directly (the terms below n
vanish at the numerator roots), advancing one term to the next by the exact
rational ratio and bounding the tail by a decreasing majorant: each term is
at most C * (k+3n+1)^(3Dn+1) / (k+n)^((n+1)(s+1)), whose tail is an explicit
binomial integral.  The term ratio creeps up toward 1 from below, so no
geometric cutoff exists; the majorant closes the sum instead.

reconstruct_form evaluates the same number through the partial-fraction
route, constant plus sum of zeta coefficients times hurwitz_zeta values, and
is used to cross-certify sum_series (and vice versa).

The asymptotic rate machinery works with the limiting term ratio

    f(x) = ((x+3)/x)^D * ((x+1)/(x+2))^(s+1)

and the per-n growth factor

    g(x) = D^(3D) * (x+3)^(3D) * (x+1)^(s+1) / (x+2)^(2(s+1)).

Both derivatives share the quadratic q(x) = a x^2 + 3a x - 6D, a = s+1-3D:
f'/f = q/(x(x+1)(x+2)(x+3)) and g'/g = -q/((x+1)(x+2)(x+3)).  Hence f falls
to a minimum at the positive root x1 of q and rises back toward 1, g rises to
its maximum at the same x1; the unique crossover f(x) = 1 sits in (0, x1) and
is located by exact-sign bisection on integers, never on floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .construction import Params, ParamsError, evaluate_rational, make_params, rational_function
from .exact_arith import bernoulli
from .forms import LinearFormCoefficients
from .precision import (
    PrecReal,
    PrecisionError,
    e_constant,
    exp2,
    ln_fraction,
    ln_interval,
    nth_root,
    try_compare,
)

__all__ = [
    "RateReport",
    "SweepReport",
    "SweepRow",
    "default_series_precision",
    "empirical_limits",
    "hurwitz_zeta",
    "rate_function",
    "rate_function_interval",
    "rate_report",
    "reconstruct_form",
    "sum_series",
]

_LOG2_3_UPPER = Fraction(1585, 1000)  # log2(3) = 1.58496...


def default_series_precision(s: int, n: int) -> int:
    return math.ceil((s + 1) * n * _LOG2_3_UPPER) + 64


# -- Hurwitz zeta ------------------------------------------------------------


def _pochhammer(i: int, m: int) -> int:
    out = 1
    for t in range(m):
        out *= i + t
    return out


def _em_correction(i: int, base: Fraction, target: Fraction) -> tuple[Fraction, Fraction] | None:
    """Euler-Maclaurin correction past the cut, or None if it cannot reach target.

    base = N + alpha.  Returns (correction, |remainder| bound) once the first
    omitted term drops below target; gives up at the divergence onset.  The
    remainder bound is the first omitted term, valid because every even
    derivative of (x + alpha)^-i is positive on x > 0.
    """
    corr = base ** (1 - i) / (i - 1) + base**-i / 2
    inv2 = base**-2
    # term(r) = B_2r/(2r)! * (i)_(2r-1) * base^(1-i-2r), built incrementally
    poch = i
    power = base ** (-1 - i)
    prev_abs = None
    for r in range(1, 8 * base.__ceil__()):
        term = bernoulli(2 * r) / math.factorial(2 * r) * poch * power
        rem = (
            abs(bernoulli(2 * r + 2))
            / math.factorial(2 * r + 2)
            * (poch * (i + 2 * r - 1) * (i + 2 * r))
            * power
            * inv2
        )
        corr += term
        if rem <= target:
            return corr, rem
        if prev_abs is not None and rem >= prev_abs:
            return None  # asymptotic series turned; need a larger cut
        prev_abs = rem
        poch *= (i + 2 * r - 1) * (i + 2 * r)
        power *= inv2
    return None


def hurwitz_zeta(i: int, alpha: Fraction, prec: int) -> PrecReal:
    """Certified zeta(i, alpha) = sum_{k>=0} (k + alpha)^-i, radius <= 2^-prec.

    Euler-Maclaurin with adaptive cut N and correction depth; the direct part
    runs in fixed point, the corrections are exact rationals.
    """
    if not isinstance(i, int) or i < 2:
        raise ValueError(f"hurwitz_zeta: need integer i >= 2, got {i}")
    alpha = Fraction(alpha)
    if not 0 < alpha <= 1:
        raise ValueError(f"hurwitz_zeta: need 0 < alpha <= 1, got {alpha}")
    if prec > 1 << 20:
        raise PrecisionError(f"precision {prec} too large")
    target = Fraction(1, 1 << (prec + 4))
    N = max(8, i // 2, (prec * 12) // 100)
    while True:
        got = _em_correction(i, N + alpha, target)
        if got is not None:
            corr, rem = got
            break
        N *= 2
    guard = N.bit_length() + 8
    p = prec + guard
    anum, aden = alpha.numerator, alpha.denominator
    scale_num = aden**i << p
    acc = 0
    for k in range(N):
        acc += scale_num // (k * aden + anum) ** i
    err = N  # one floor per direct term
    cnum = corr.numerator << p
    acc += cnum // corr.denominator if cnum >= 0 else -((-cnum) // corr.denominator)
    err += 1
    err += math.ceil(rem * (1 << p)) + 1
    return PrecReal(acc, p, err)


# -- direct series summation -------------------------------------------------


def _tail_majorant(params: Params, K: int) -> Fraction:
    """Upper bound for sum_{k>=K} c_k via the decreasing envelope c_hat."""
    s, D, n = params.s, params.D, params.n
    C = D ** (3 * D * n) * math.factorial(n) ** (s + 1 - 3 * D)
    M = 3 * D * n + 1
    Q = (n + 1) * (s + 1)
    Y = K + n
    c = 2 * n + 1

    def c_hat(k: int) -> Fraction:
        return Fraction(C * (k + 3 * n + 1) ** M, (k + n) ** Q)

    integral = Fraction(0)
    for r in range(M + 1):
        integral += Fraction(math.comb(M, r) * c ** (M - r), (Q - r - 1) * Y ** (Q - r - 1))
    return c_hat(K) + C * integral


MAX_SERIES_TERMS = 30_000_000


def _terms_needed(params: Params, target: Fraction) -> int:
    """Smallest cut K with tail majorant <= target (doubling plus bisection)."""
    hi = 1
    while _tail_majorant(params, hi) > target:
        hi *= 2
        if hi > 4 * MAX_SERIES_TERMS:
            raise PrecisionError(
                f"series for {params} needs more than {hi} terms at this precision; "
                "the decay exponent (n+1)(s+1)-(3Dn+1) is too small for the target"
            )
    lo = hi // 2
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if _tail_majorant(params, mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


def sum_series(params: Params, j: int, prec: int | None = None) -> PrecReal:
    """Certified r_j = sum_{m>=n} R(m + j/D) by exact term ratios.

    The ratio c_{k+1}/c_k is a product of D+1 explicit rational factors; each
    step multiplies the fixed-point term by it with an exact ulp ledger.  The
    cut is fixed up front from the tail majorant, which also guards against
    infeasible precision/decay combinations.
    """
    s, D, n = params.s, params.D, params.n
    if not 1 <= j <= D:
        raise ValueError(f"sum_series: offset j must be in [1, {D}], got {j}")
    if prec is None:
        prec = default_series_precision(s, n)
    if prec > 1 << 20:
        raise PrecisionError(f"precision {prec} too large")
    p = prec + 64
    target = Fraction(1, 1 << (prec + 2))
    cut = _terms_needed(params, target)
    if cut > MAX_SERIES_TERMS:
        raise PrecisionError(
            f"series for {params} at {prec} bits needs {cut} terms "
            f"(limit {MAX_SERIES_TERMS}); lower the precision or raise n"
        )
    spec = rational_function(params)
    c0 = evaluate_rational(spec, n + Fraction(j, D))
    if c0 <= 0:
        raise AssertionError("first term must be positive")
    mant = (c0.numerator << p) // c0.denominator
    err = 1
    acc, acc_err = mant, err
    for k in range(cut - 1):
        rnum = (D * (k + n) + j) ** (s + 1)
        rden = (D * (k + 2 * n + 1) + j) ** (s + 1)
        for ell in range(1, D + 1):
            rnum *= D * (k + 3 * n) + j + ell
            rden *= D * k + j + ell - 1
        mant = mant * rnum // rden
        err = (err * rnum + rden - 1) // rden + 1
        acc += mant
        acc_err += err
    tail = _tail_majorant(params, cut)
    acc_err += math.ceil(tail * (1 << p)) + 1
    if Fraction(acc_err, 1 << p) > Fraction(1, 1 << prec):
        raise PrecisionError("series error budget exceeded; raise the precision")
    return PrecReal(acc, p, acc_err)


def reconstruct_form(lf: LinearFormCoefficients, j: int, prec: int) -> PrecReal:
    """The same number through the zeta route: c_j + sum_i z_i zeta(i, j/D)."""
    D = lf.params.D
    if not 1 <= j <= D:
        raise ValueError(f"reconstruct_form: offset j must be in [1, {D}], got {j}")
    size = sum(abs(z) for z in lf.zeta_coeffs.values()) + 1
    pz = prec + max(8, size.numerator.bit_length() - size.denominator.bit_length() + 1) + 8
    acc = PrecReal.from_fraction(lf.constant_term[j], pz)
    for i, z in sorted(lf.zeta_coeffs.items()):
        if z:
            acc = acc + hurwitz_zeta(i, Fraction(j, D), pz) * z
    if acc.error > Fraction(1, 1 << prec):
        raise PrecisionError("reconstruction error budget exceeded")
    return acc


# -- asymptotic rate ---------------------------------------------------------


def rate_function(x: Fraction, s: int, D: int) -> Fraction:
    """Exact g(x) = D^(3D) (x+3)^(3D) (x+1)^(s+1) / (x+2)^(2(s+1))."""
    x = Fraction(x)
    return (
        Fraction(D) ** (3 * D)
        * (x + 3) ** (3 * D)
        * (x + 1) ** (s + 1)
        / (x + 2) ** (2 * (s + 1))
    )


def _ratio_quadratic(x: Fraction, s: int, D: int) -> Fraction:
    a = s + 1 - 3 * D
    return a * x * x + 3 * a * x - 6 * D


def rate_function_interval(x: PrecReal, s: int, D: int, prec: int) -> PrecReal:
    """Certified g over an interval.

    On a monotone stretch (q keeps its sign) the endpoint hull is exact; if
    the interval straddles the stationary point, the upper end is padded by
    exp(|g'/g|_max * width) <= 1/(1 - t), which needs the interval narrow
    enough that t < 1.
    """
    lo, hi = x.lo, x.hi
    if lo <= -1:
        raise ValueError("rate_function_interval: need x > -1")
    glo, ghi = rate_function(lo, s, D), rate_function(hi, s, D)
    qlo, qhi = _ratio_quadratic(lo, s, D), _ratio_quadratic(hi, s, D)
    if qlo * qhi >= 0:
        return PrecReal.from_interval(min(glo, ghi), max(glo, ghi), prec)
    slope = max(abs(qlo), abs(qhi)) / ((lo + 1) * (lo + 2) * (lo + 3))
    t = slope * (hi - lo)
    if t >= 1:
        raise ValueError("rate_function_interval: interval too wide across the peak")
    return PrecReal.from_interval(min(glo, ghi), max(glo, ghi) / (1 - t), prec)


@dataclass(frozen=True)
class RateReport:
    s: int
    D: int
    crossover: PrecReal  # unique positive x with f(x) = 1
    stationary: PrecReal  # positive root of q: f minimal, g maximal
    ratio_at_crossover: PrecReal  # f over the final bracket; contains 1
    rate: PrecReal  # g at the crossover
    log_rate: PrecReal
    crossover_bound: PrecReal  # 4 * 2^(-(s+1)/D)
    smallness_threshold: PrecReal  # 3^(-(s+1))
    crossover_below_bound: bool | None
    rate_below_threshold: bool
    e_scaled_rate_below_one: bool | None
    bisections: int


def _f_sign(x: Fraction, s: int, D: int) -> int:
    """Exact sign of f(x) - 1 for x > 0, via one integer subtraction."""
    num, den = x.numerator, x.denominator
    lhs = (num + 3 * den) ** D * (num + den) ** (s + 1)
    rhs = num**D * (num + 2 * den) ** (s + 1)
    return (lhs > rhs) - (lhs < rhs)


def _f_value(x: Fraction, s: int, D: int) -> Fraction:
    return ((x + 3) / x) ** D * ((x + 1) / (x + 2)) ** (s + 1)


def rate_report(s: int, D: int, prec: int) -> RateReport:
    """Locate the crossover by exact bisection and certify everything at it."""
    if s < 1 or D < 1:
        raise ParamsError("nonpositive", f"need positive s, D, got s={s}, D={D}")
    if s % 2 == 0:
        raise ParamsError("s_even", f"s must be odd, got {s}")
    if s < 3 * D:
        raise ParamsError("s_lt_3D", f"need s >= 3D, got s={s}, D={D}")
    if prec > 1 << 16:
        raise PrecisionError(f"rate_report precision {prec} too large")
    steps = 0

    # stationary point: q(0) < 0 and q eventually positive
    qlo, qhi = Fraction(0), Fraction(1)
    while _ratio_quadratic(qhi, s, D) <= 0:
        qhi *= 2
    for _ in range(64):
        mid = (qlo + qhi) / 2
        if _ratio_quadratic(mid, s, D) <= 0:
            qlo = mid
        else:
            qhi = mid
        steps += 1
    stationary = PrecReal.from_interval(qlo, qhi, 60)

    # crossover bracket: f > 1 near 0, f < 1 at the stationary point's right end
    hi = qhi
    if _f_sign(hi, s, D) >= 0:
        raise AssertionError("ratio must be below 1 at the stationary point")
    lo = hi / 2
    while _f_sign(lo, s, D) <= 0:
        lo /= 2
        steps += 1
    width_target = Fraction(1, 1 << (prec + 2))
    exact_hit = None
    while True:
        if hi - lo <= width_target:
            flo, fhi = _f_value(hi, s, D), _f_value(lo, s, D)  # f decreasing here
            if fhi - flo <= width_target:
                break
        mid = (lo + hi) / 2
        sgn = _f_sign(mid, s, D)
        steps += 1
        if sgn == 0:
            exact_hit = mid
            break
        if sgn > 0:
            lo = mid
        else:
            hi = mid
    if exact_hit is not None:
        lo = hi = exact_hit
        flo = fhi = Fraction(1)
    if _ratio_quadratic(hi, s, D) >= 0:
        raise AssertionError("crossover bracket leaked past the stationary point")
    x_prec = prec + 8
    crossover = PrecReal.from_interval(lo, hi, x_prec)
    ratio_at_crossover = PrecReal.from_interval(flo, fhi, x_prec)
    # g increases left of the stationary point, so the endpoint hull is exact
    g_lo, g_hi = rate_function(lo, s, D), rate_function(hi, s, D)
    rate = PrecReal.from_interval(g_lo, g_hi, prec)
    log_lo = ln_fraction(g_lo, prec)
    log_hi = ln_fraction(g_hi, prec)
    log_rate = PrecReal.from_interval(log_lo.lo, log_hi.hi, prec)
    bound = 4 * exp2(Fraction(-(s + 1), D), prec)
    threshold = PrecReal.from_fraction(Fraction(1, 3 ** (s + 1)), prec)
    cmp_bound = try_compare(crossover, bound)
    e_margin = try_compare(e_constant(prec + 8) * nth_root(rate, s + 1, prec + 8), 1)
    return RateReport(
        s=s,
        D=D,
        crossover=crossover,
        stationary=stationary,
        ratio_at_crossover=ratio_at_crossover,
        rate=rate,
        log_rate=log_rate,
        crossover_bound=bound,
        smallness_threshold=threshold,
        crossover_below_bound=None if cmp_bound is None else cmp_bound == -1,
        rate_below_threshold=g_hi < Fraction(1, 3 ** (s + 1)),
        e_scaled_rate_below_one=None if e_margin is None else e_margin == -1,
        bisections=steps,
    )


# -- sweeps ------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    n: int
    j: int
    value: PrecReal
    root: PrecReal  # value^(1/n)
    ratio_to_first: PrecReal  # value / (same n, j = 1)


@dataclass(frozen=True)
class SweepReport:
    s: int
    D: int
    js: tuple[int, ...]
    rows: tuple[SweepRow, ...]
    log_steps: tuple[tuple[int, int, PrecReal], ...]  # (n_from, n_to, step)
    log_rate: PrecReal  # ln g at the crossover
    ratio_deviation: dict[int, tuple[tuple[int, Fraction], ...]]  # j -> (n, bound)


def empirical_limits(
    s: int,
    D: int,
    n_values: list[int],
    js: list[int] | None = None,
    prec: int | None = None,
) -> SweepReport:
    """Sweep n, certify r values, and compare growth against the rate report."""
    if js is None:
        js = list(range(1, D + 1))
    if not n_values:
        raise ValueError("empirical_limits: need at least one n")
    if 1 not in js:
        js = [1] + list(js)
    n_values = sorted(set(n_values))
    ln_prec = 160
    rows: list[SweepRow] = []
    lns: dict[int, PrecReal] = {}
    for n in n_values:
        params = make_params(s, D, n)
        p_n = prec if prec is not None else default_series_precision(s, n)
        values = {j: sum_series(params, j, p_n) for j in js}
        lns[n] = ln_interval(values[1], ln_prec)
        for j in js:
            rows.append(
                SweepRow(
                    n=n,
                    j=j,
                    value=values[j],
                    root=nth_root(values[j], n, ln_prec),
                    ratio_to_first=values[j] / values[1],
                )
            )
    log_steps = []
    for n_from, n_to in zip(n_values, n_values[1:]):
        step = (lns[n_to] - lns[n_from]) / (n_to - n_from)
        log_steps.append((n_from, n_to, step))
    report = rate_report(s, D, 96)
    deviation: dict[int, tuple[tuple[int, Fraction], ...]] = {}
    for j in js:
        if j == 1:
            continue
        devs = []
        for row in rows:
            if row.j == j:
                r = row.ratio_to_first
                devs.append((row.n, max(abs(r.lo - 1), abs(r.hi - 1))))
        deviation[j] = tuple(devs)
    return SweepReport(
        s=s,
        D=D,
        js=tuple(js),
        rows=tuple(rows),
        log_steps=tuple(log_steps),
        log_rate=report.log_rate,
        ratio_deviation=deviation,
    )
