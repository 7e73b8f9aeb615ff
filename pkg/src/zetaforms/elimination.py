"""Eliminating chosen zeta values across divisor-folded forms.

For each divisor d of D, folding the offsets j, D/d steps apart, turns the
Hurwitz values into plain zeta values by the multiplication theorem:

    rhat_d = sum_{j=1..d} r_{jD/d} = const_d + sum_i z_i d^i zeta(i).

A weight vector (w_d) over the divisors then kills any chosen set of zeta
indices: with exponents (1, i_1, ..., i_{delta-1}) and the matrix
M[r][c] = d_r^(e_c), the first-column cofactors w satisfy

    sum_d w_d d^(i_c) = 0  exactly,  sum_d w_d d = det M != 0,

and det M is positive because it is a generalized Vandermonde determinant at
increasing positive nodes, equivalently det M = schur * vandermonde with both
factors positive.  Everything in this module is exact except the final
numeric values, which carry certified radii from the analysis layer.

The planner picks D as the product of the primes up to (1 - 2*eps) * ln s,
resolving each prime-versus-threshold comparison with certified logarithms at
escalating precision (the threshold is irrational, so every comparison is
decidable), and certifies the smallness of the growth rate at the planned
parameters through the bound abar >= 4 * 2^(-(s+1)/D) without ever locating
the crossover: q(abar) < 0 exactly, ln f(abar) < 0 and
ln g(abar) < -(s+1) ln 3 with certified logarithms, which suffices since g
increases left of the stationary point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .analysis import hurwitz_zeta, rate_report, reconstruct_form, sum_series
from .construction import Params
from .exact_arith import divisors, lcm_upto, primes_upto
from .forms import LinearFormCoefficients
from .precision import PrecReal, PrecisionError, exp2, ln_fraction, ln_interval, try_compare

__all__ = [
    "CombinedForm",
    "EliminatedForm",
    "EliminationPlan",
    "PlanError",
    "PlanReport",
    "combined_form",
    "eliminated_form",
    "generalized_vandermonde_det",
    "plan_parameters",
    "schur_value",
    "solve_weights",
]


class PlanError(ValueError):
    """Bad elimination or planner input; .code names the violated constraint."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


# -- exact determinants ------------------------------------------------------


def _bareiss_det(m: list[list[int]]) -> int:
    """Fraction-free determinant of an integer matrix."""
    n = len(m)
    if n == 0:
        return 1
    m = [row[:] for row in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[-1][-1]


def _validate_nodes(xs: list[Fraction], exponents: list[int]) -> None:
    if len(xs) != len(exponents) or not xs:
        raise ValueError("need equally many nodes and exponents, at least one each")
    if any(x <= 0 for x in xs) or any(xs[i] >= xs[i + 1] for i in range(len(xs) - 1)):
        raise ValueError("nodes must be positive and strictly increasing")
    if any(e < 0 for e in exponents) or any(
        exponents[i] >= exponents[i + 1] for i in range(len(exponents) - 1)
    ):
        raise ValueError("exponents must be nonnegative and strictly increasing")


def generalized_vandermonde_det(xs: list[Fraction], exponents: list[int]) -> Fraction:
    """det[x_j^(e_i)] for positive increasing nodes; provably positive.

    Rational nodes are cleared to integers first so the whole determinant runs
    fraction-free; the common scale divides back out at the end.
    """
    xs = [Fraction(x) for x in xs]
    _validate_nodes(xs, exponents)
    L = math.lcm(*[x.denominator for x in xs])
    scaled = [int(x * L) for x in xs]
    mat = [[x**e for x in scaled] for e in exponents]
    det = Fraction(_bareiss_det(mat), L ** sum(exponents))
    if det <= 0:
        raise AssertionError("generalized Vandermonde determinant must be positive")
    return det


def schur_value(xs: list[Fraction], exponents: list[int]) -> Fraction:
    """Schur polynomial value det[x^e] / vandermonde(x); positive, exact.

    The partition is lambda_r = e[t-1-r] - (t-1-r) for r = 0..t-1.
    """
    xs = [Fraction(x) for x in xs]
    _validate_nodes(xs, exponents)
    det = generalized_vandermonde_det(xs, exponents)
    van = Fraction(1)
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            van *= xs[j] - xs[i]
    value = det / van
    if value <= 0:
        raise AssertionError("Schur value must be positive")
    return value


# -- weights -----------------------------------------------------------------


@dataclass(frozen=True)
class EliminationPlan:
    D: int
    s: int
    divisors: tuple[int, ...]
    indices: tuple[int, ...]  # zeta indices eliminated, ascending
    weights: dict[int, int]  # divisor -> integer weight, gcd-reduced
    weighted_sum: int  # sum_d weights[d] * d, nonzero


def solve_weights(D: int, s: int, indices: list[int]) -> EliminationPlan:
    """First-column cofactor weights for the divisor/exponent matrix."""
    if D < 1 or s < 3:
        raise PlanError("nonpositive", f"need D >= 1 and s >= 3, got D={D}, s={s}")
    ds = divisors(D)
    delta = len(ds)
    idx = sorted(indices)
    if len(idx) != delta - 1:
        raise PlanError(
            "count", f"need exactly {delta - 1} indices for {delta} divisors, got {len(idx)}"
        )
    if len(set(idx)) != len(idx):
        raise PlanError("duplicate_index", f"indices must be distinct: {idx}")
    for i in idx:
        if i % 2 == 0:
            raise PlanError("even_index", f"index {i} is even")
        if not 3 <= i <= s:
            raise PlanError("index_range", f"index {i} outside [3, {s}]")
    exps = [1] + idx
    mat = [[d**e for e in exps] for d in ds]
    weights: dict[int, int] = {}
    for r, d in enumerate(ds):
        minor = [
            [mat[rr][cc] for cc in range(1, delta)] for rr in range(delta) if rr != r
        ]
        weights[d] = (-1) ** r * _bareiss_det(minor)
    det = _bareiss_det(mat)
    if det <= 0:
        raise AssertionError("divisor matrix determinant must be positive")
    if sum(w * d for d, w in weights.items()) != det:
        raise AssertionError("cofactor expansion disagrees with the determinant")
    for e in exps[1:]:
        if sum(w * d**e for d, w in weights.items()) != 0:
            raise AssertionError(f"weights fail to annihilate exponent {e}")
    g = math.gcd(*weights.values())
    if g > 1:
        weights = {d: w // g for d, w in weights.items()}
        det //= g
    return EliminationPlan(
        D=D, s=s, divisors=tuple(ds), indices=tuple(idx), weights=weights, weighted_sum=det
    )


# -- folded and eliminated forms ---------------------------------------------


@dataclass(frozen=True)
class CombinedForm:
    d: int
    constant: Fraction
    zeta_coeffs: dict[int, Fraction]  # i -> z_i * d^i
    value: PrecReal
    folded_value: PrecReal  # sum of the unfolded reconstructions; must agree


def combined_form(lf: LinearFormCoefficients, d: int, prec: int) -> CombinedForm:
    """Fold offsets a divisor apart: rhat_d = const + sum_i z_i d^i zeta(i)."""
    D = lf.params.D
    if D % d != 0:
        raise PlanError("divisor", f"{d} does not divide D={D}")
    step = D // d
    constant = sum(lf.constant_term[j * step] for j in range(1, d + 1))
    coeffs = {i: z * d**i for i, z in sorted(lf.zeta_coeffs.items())}
    value = PrecReal.from_fraction(constant, prec + 16)
    for i, c in coeffs.items():
        if c:
            value = value + hurwitz_zeta(i, Fraction(1), prec + 16) * c
    folded = reconstruct_form(lf, step, prec + 16)
    for j in range(2, d + 1):
        folded = folded + reconstruct_form(lf, j * step, prec + 16)
    if try_compare(value, folded) is not None:
        raise AssertionError(
            f"multiplication-theorem route and folded route disagree at d={d}"
        )
    return CombinedForm(
        d=d, constant=constant, zeta_coeffs=coeffs, value=value, folded_value=folded
    )


@dataclass(frozen=True)
class EliminatedForm:
    params: Params
    plan: EliminationPlan
    constant: Fraction
    zero_indices: tuple[int, ...]  # verified exactly zero
    surviving: dict[int, Fraction]  # i -> rho_i * sum_d w_d d^i
    scaled_surviving: dict[int, Fraction]  # d_{n+1}^(s+1-i) times the above
    surviving_integral: bool
    value: PrecReal
    ratio_to_scaled_direct: PrecReal


def eliminated_form(
    lf: LinearFormCoefficients, plan: EliminationPlan, prec: int
) -> EliminatedForm:
    """Weighted combination across divisors with the planned zeta values gone."""
    params = lf.params
    if plan.D != params.D:
        raise PlanError("divisor", f"plan is for D={plan.D}, form has D={params.D}")
    if plan.s != params.s:
        raise PlanError("count", f"plan is for s={plan.s}, form has s={params.s}")
    combined = {d: combined_form(lf, d, prec) for d in plan.divisors}
    constant = sum(plan.weights[d] * combined[d].constant for d in plan.divisors)
    coeffs: dict[int, Fraction] = {}
    for i, z in sorted(lf.zeta_coeffs.items()):
        coeffs[i] = z * sum(plan.weights[d] * d**i for d in plan.divisors)
    for i in plan.indices:
        if coeffs.get(i, Fraction(0)) != 0:
            raise AssertionError(f"eliminated index {i} has nonzero coefficient")
    surviving = {i: c for i, c in coeffs.items() if i not in plan.indices}
    value = PrecReal.from_fraction(constant, prec + 16)
    for i, c in surviving.items():
        if c:
            value = value + hurwitz_zeta(i, Fraction(1), prec + 16) * c
    direct = sum_series(params, 1, prec) * plan.weighted_sum
    dn1 = lcm_upto(params.n + 1)
    scaled = {i: dn1 ** (params.s + 1 - i) * c for i, c in surviving.items()}
    return EliminatedForm(
        params=params,
        plan=plan,
        constant=constant,
        zero_indices=plan.indices,
        surviving=surviving,
        scaled_surviving=scaled,
        surviving_integral=all(v.denominator == 1 for v in scaled.values()),
        value=value,
        ratio_to_scaled_direct=value / direct,
    )


# -- parameter planning ------------------------------------------------------


@dataclass(frozen=True)
class PlanReport:
    epsilon: Fraction
    s: int
    threshold: PrecReal  # (1 - 2 eps) ln s
    primes: tuple[int, ...]
    D: int
    delta: int
    s_ge_3D: bool
    log_D: PrecReal
    log_D_within: bool  # log D <= (1 - eps) ln s
    weighted_growth_ok: bool  # D log D <= s^(1 - eps) log s
    count_exponent: PrecReal  # (1 - eps) ln s / ln ln s
    count_bound: PrecReal  # 2^count_exponent
    rate_certified: bool | None  # g at the crossover below 3^-(s+1)
    rate_route: str


def _decide(make, limit: int = 4096) -> int:
    prec = 96
    while prec <= limit:
        got = try_compare(*make(prec))
        if got is not None:
            return got
        prec *= 2
    raise PrecisionError("comparison not decidable below the precision limit")


def _rate_certificate(s: int, D: int) -> tuple[bool | None, str]:
    """Certify g(crossover) < 3^-(s+1) via abar >= 4*2^(-(s+1)/D), if possible."""
    abar = 4 * exp2(Fraction(-(s + 1), D), 96).hi
    a_coeff = s + 1 - 3 * D
    if a_coeff * abar * abar + 3 * a_coeff * abar - 6 * D >= 0:
        return _rate_fallback(s, D, "stationary point too close")
    prec = 96
    while prec <= 4096:
        ln_f = (
            ln_fraction(abar + 3, prec)
            - ln_fraction(abar, prec)
            + Fraction(s + 1, D) * (ln_fraction(abar + 1, prec) - ln_fraction(abar + 2, prec))
        ) * D
        ln_g = (
            ln_fraction(Fraction(D), prec) * (3 * D)
            + ln_fraction(abar + 3, prec) * (3 * D)
            + ln_fraction(abar + 1, prec) * (s + 1)
            - ln_fraction(abar + 2, prec) * (2 * (s + 1))
        )
        margin = ln_g + ln_fraction(3, prec) * (s + 1)
        f_ok = try_compare(ln_f, 0)
        g_ok = try_compare(margin, 0)
        if f_ok is not None and g_ok is not None:
            if f_ok == -1 and g_ok == -1:
                return True, "direct-bound"
            if f_ok == 1 or g_ok == 1:
                return _rate_fallback(s, D, "direct bound failed")
        prec *= 2
    return _rate_fallback(s, D, "direct bound undecidable")


def _rate_fallback(s: int, D: int, why: str) -> tuple[bool | None, str]:
    if s <= 2001:
        return rate_report(s, D, 96).rate_below_threshold, f"bisection ({why})"
    return None, f"undetermined ({why})"


def plan_parameters(epsilon: Fraction, s: int) -> PlanReport:
    """Choose D as the primorial under (1 - 2 eps) ln s and certify the sizes."""
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < Fraction(1, 2):
        raise PlanError("epsilon_range", f"need 0 < epsilon < 1/2, got {epsilon}")
    if s < 3:
        raise PlanError("nonpositive", f"need s >= 3, got {s}")
    if s % 2 == 0:
        raise PlanError("s_even", f"s must be odd, got {s}")
    shrink = 1 - 2 * epsilon
    threshold = ln_fraction(s, 128) * shrink
    candidates = primes_upto(math.floor(threshold.hi) + 1)
    chosen = []
    for p in candidates:
        c = _decide(lambda pr, p=p: (Fraction(p), ln_fraction(s, pr) * shrink))
        if c == -1:
            chosen.append(p)
    D = math.prod(chosen) if chosen else 1
    delta = len(divisors(D))
    if D == 1:
        log_D = PrecReal.from_fraction(0, 96)
        log_D_within = True
        growth_ok = True
    else:
        log_D = ln_fraction(D, 128)
        log_D_within = (
            _decide(lambda pr: (ln_fraction(D, pr), ln_fraction(s, pr) * (1 - epsilon))) == -1
        )
        # compare via logs: ln D + ln ln D <= (1 - eps) ln s + ln ln s
        def growth(pr):
            lhs = ln_fraction(D, pr) + ln_interval(ln_fraction(D, pr), pr)
            rhs = ln_fraction(s, pr) * (1 - epsilon) + ln_interval(ln_fraction(s, pr), pr)
            return lhs, rhs

        growth_ok = _decide(growth) == -1
    count_exp = ln_fraction(s, 128) * (1 - epsilon) / ln_interval(ln_fraction(s, 128), 128)
    count_bound = exp2(count_exp, 96)
    if s >= 3 * D:
        rate_flag, route = _rate_certificate(s, D)
    else:
        rate_flag, route = None, "inadmissible (s < 3D)"
    return PlanReport(
        epsilon=epsilon,
        s=s,
        threshold=threshold,
        primes=tuple(chosen),
        D=D,
        delta=delta,
        s_ge_3D=s >= 3 * D,
        log_D=log_D,
        log_D_within=log_D_within,
        weighted_growth_ok=growth_ok,
        count_exponent=count_exp,
        count_bound=count_bound,
        rate_certified=rate_flag,
        rate_route=route,
    )
