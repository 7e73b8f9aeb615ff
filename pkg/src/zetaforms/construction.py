"""Construction of the rational functions behind the linear forms.

For parameters (s, D, n) with s odd, s >= 3D and Dn even, the central object
is the rational function

    R(t) = D^(3Dn) * n!^(s+1-3D) * prod_{j=0..3Dn} (t - n + j/D)
                                  / prod_{k=0..n} (t + k)^(s+1),

a quotient with simple numerator roots at t = n - j/D and poles of order
s + 1 at t = 0, -1, ..., -n.  The denominator degree exceeds the numerator
degree by at least 2 whenever the parameters are admissible, which is what
makes the partial-fraction coefficient sums telescope later.

The partial-fraction table a[i][k] (1 <= i <= s, 0 <= k <= n) with

    R(t) = sum_{i,k} a[i][k] / (t + k)^i

is computed pole by pole: substituting t = u - k turns coefficient extraction
at pole k into a truncated Taylor expansion at u = 0, done with integer
polynomial products plus one series inversion per pole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exact_arith import parse_rational, rational_str, series_inv, series_mul

__all__ = [
    "Params",
    "ParamsError",
    "PartialFractionExpansion",
    "PoleError",
    "RationalFunctionSpec",
    "evaluate_rational",
    "expansion_from_json",
    "expansion_to_json",
    "expansion_value",
    "factor_coeffs",
    "make_params",
    "partial_fractions",
    "rational_function",
]

SCHEMA = "zeta-forms/1"


class ParamsError(ValueError):
    """Invalid (s, D, n) combination; .code identifies which constraint failed."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class PoleError(ValueError):
    """Evaluation was requested at a pole."""


@dataclass(frozen=True)
class Params:
    s: int
    D: int
    n: int


def make_params(s: int, D: int, n: int) -> Params:
    if s < 1 or D < 1 or n < 1:
        raise ParamsError("nonpositive", f"parameters must be positive, got s={s}, D={D}, n={n}")
    if s % 2 == 0:
        raise ParamsError("s_even", f"s must be odd, got s={s}")
    if s < 3 * D:
        raise ParamsError("s_lt_3D", f"need s >= 3D, got s={s}, D={D}")
    if (D * n) % 2 == 1:
        raise ParamsError("Dn_odd", f"need D*n even, got D={D}, n={n}")
    return Params(s, D, n)


@dataclass(frozen=True)
class RationalFunctionSpec:
    """R(t) in factored form: scalar, numerator roots, and pole data."""

    params: Params
    scalar: int
    numerator_roots: tuple[Fraction, ...]  # t = n - j/D for j = 0..3Dn, descending
    pole_order: int

    @property
    def degree_gap(self) -> int:
        """deg denominator - deg numerator; >= 2 for admissible parameters."""
        n = self.params.n
        return (n + 1) * self.pole_order - len(self.numerator_roots)


def rational_function(params: Params) -> RationalFunctionSpec:
    s, D, n = params.s, params.D, params.n
    roots = tuple(Fraction(D * n - j, D) for j in range(3 * D * n + 1))
    spec = RationalFunctionSpec(
        params=params,
        scalar=D ** (3 * D * n) * math.factorial(n) ** (s + 1 - 3 * D),
        numerator_roots=roots,
        pole_order=s + 1,
    )
    if spec.degree_gap < 2:
        raise ParamsError("degree_gap", f"degree gap {spec.degree_gap} < 2 for {params}")
    return spec


def evaluate_rational(spec: RationalFunctionSpec, t: Fraction) -> Fraction:
    """Exact value R(t); raises PoleError at t in {0, -1, ..., -n}."""
    t = Fraction(t)
    n = spec.params.n
    if t.denominator == 1 and -n <= t <= 0:
        raise PoleError(f"t={t} is a pole")
    num = Fraction(spec.scalar)
    for r in spec.numerator_roots:
        num *= t - r
    den = Fraction(1)
    for k in range(n + 1):
        den *= (t + k) ** spec.pole_order
    return num / den


@dataclass(frozen=True)
class PartialFractionExpansion:
    """Coefficient table a[i][k] stored as rows[i-1][k], exact rationals."""

    params: Params
    rows: tuple[tuple[Fraction, ...], ...]

    def coeff(self, i: int, k: int) -> Fraction:
        return self.rows[i - 1][k]


def _int_series_mul(a: list[int], b: list[int], order: int) -> list[int]:
    out = [0] * (order + 1)
    for i, ai in enumerate(a[: order + 1]):
        if ai:
            for j in range(min(len(b), order + 1 - i)):
                out[i + j] += ai * b[j]
    return out


def _int_series_pow(p: list[int], e: int, order: int) -> list[int]:
    result, sq = [1], p
    while e:
        if e & 1:
            result = _int_series_mul(result, sq, order)
        e >>= 1
        if e:
            sq = _int_series_mul(sq, sq, order)
    return result


def partial_fractions(spec: RationalFunctionSpec) -> PartialFractionExpansion:
    """Full coefficient table, one truncated Taylor expansion per pole."""
    s, D, n = spec.params.s, spec.params.D, spec.params.n
    lead = Fraction(math.factorial(n) ** (s + 1 - 3 * D), D)
    columns: list[list[Fraction]] = []
    for k in range(n + 1):
        shift = D * (k + n)
        # numerator of R(u - k) rescaled to integers: prod_j (D*u + (j - shift)),
        # truncated at u^s; the factor at j = shift is exactly D*u
        num = [0] * (s + 1)
        num[0] = 1
        for j in range(3 * D * n + 1):
            c = j - shift
            for i in range(s, 0, -1):
                num[i] = c * num[i] + D * num[i - 1]
            num[0] = c * num[0]
        # denominator with the pole factor removed: prod_{m != k} (u + (m - k)),
        # raised to s+1 and truncated; exact degree-n base first
        base = [1]
        for m in range(n + 1):
            if m != k:
                c = m - k
                out = [0] * (len(base) + 1)
                for i, v in enumerate(base):
                    out[i] += c * v
                    out[i + 1] += v
                base = out
        den = _int_series_pow(base, s + 1, s)
        inv = series_inv([Fraction(v) for v in den], s)
        series = series_mul([lead * v for v in num], inv, s)
        if series[0] != 0:
            raise AssertionError(f"pole {k}: order-(s+1) coefficient must vanish")
        columns.append(series)
    rows = tuple(
        tuple(columns[k][s + 1 - i] for k in range(n + 1)) for i in range(1, s + 1)
    )
    return PartialFractionExpansion(params=spec.params, rows=rows)


def expansion_value(pf: PartialFractionExpansion, t: Fraction) -> Fraction:
    """Evaluate sum a[i][k]/(t+k)^i exactly (away from the poles)."""
    t = Fraction(t)
    n = pf.params.n
    if t.denominator == 1 and -n <= t <= 0:
        raise PoleError(f"t={t} is a pole")
    total = Fraction(0)
    for k in range(n + 1):
        inv = 1 / (t + k)
        pw = Fraction(1)
        for i in range(1, pf.params.s + 1):
            pw *= inv
            total += pf.rows[i - 1][k] * pw
    return total


def factor_coeffs(alpha: Fraction, params: Params) -> list[int]:
    """Simple-fraction coefficients of the degree-balanced building block.

    F(t) = D^n * prod_{j=1..n} (t + alpha + j/D) / prod_{j=0..n} (t + j)
    decomposes as sum_k A[k]/(t+k); for alpha in (1/D)Z all A[k] are integers,
    given in closed form by three cases on m = D*(alpha - k):

        m >= 0:   (-1)^k A[k] = C(n,k) * C(m+n, n)
        -n<=m<0:  A[k] = 0
        m < -n:   (-1)^k A[k] = (-1)^n * C(n,k) * C(-m-1, n)
    """
    alpha = Fraction(alpha)
    D, n = params.D, params.n
    if (alpha * D).denominator != 1:
        raise ValueError(f"factor_coeffs: alpha={alpha} is not a multiple of 1/{D}")
    out = []
    for k in range(n + 1):
        m = int(alpha * D) - D * k
        if m >= 0:
            val = math.comb(n, k) * math.comb(m + n, n)
        elif m >= -n:
            val = 0
        else:
            val = (-1) ** n * math.comb(n, k) * math.comb(-m - 1, n)
        out.append((-1) ** k * val)
    return out


def expansion_to_json(pf: PartialFractionExpansion) -> dict:
    return {
        "schema": SCHEMA,
        "s": pf.params.s,
        "D": pf.params.D,
        "n": pf.params.n,
        "a": [[rational_str(v) for v in row] for row in pf.rows],
    }


def expansion_from_json(doc: dict) -> PartialFractionExpansion:
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"unsupported schema: {doc.get('schema')!r}")
    params = make_params(int(doc["s"]), int(doc["D"]), int(doc["n"]))
    rows = doc["a"]
    if len(rows) != params.s or any(len(r) != params.n + 1 for r in rows):
        raise ValueError("coefficient table has wrong shape")
    return PartialFractionExpansion(
        params=params,
        rows=tuple(tuple(parse_rational(v) for v in row) for row in rows),
    )
