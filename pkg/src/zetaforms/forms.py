"""From partial fractions to linear forms in Hurwitz zeta values.

Summing R(m + j/D) over m >= 1 against the expansion a[i][k]/(t+k)^i yields,
for each offset j in 1..D, a number

    r_j = c_j + sum_{odd i, 3 <= i <= s} z_i * hurwitzzeta(i, j/D)

whose zeta coefficients z_i = sum_k a[i][k] do not depend on j, and whose
rational constant is

    c_j = - sum_{k=0..n} sum_{l=0..k} sum_{i=1..s} a[i][k] / (l + j/D)^i.

Two structural facts make the form finite and purely odd: the i = 1 column
sums to zero (degree gap at least 2), and every even-i column sums to zero
(the reflection symmetry of R).  Both are enforced as hard errors here.

The arithmetic content is the certificate: with d_n = lcm(1..n),

    d_n^(s+1-i) * z_i          is an integer for every odd i >= 3,
    d_{n+1}^(s+1) * c_j        is an integer for every j,

and, stronger, d_n^(s+1-i) * a[i][k] is an integer for all i, k.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .construction import Params, PartialFractionExpansion
from .exact_arith import lcm_upto

__all__ = [
    "CoefficientSumError",
    "IntegralityCertificate",
    "LinearFormCoefficients",
    "linear_form_coeffs",
    "verify_integrality",
]


class CoefficientSumError(ArithmeticError):
    """A column sum that must vanish did not (broken expansion table)."""


@dataclass(frozen=True)
class LinearFormCoefficients:
    """Exact coefficients of r_j = constant_term[j] + sum_i zeta_coeffs[i]*zeta(i, j/D)."""

    params: Params
    zeta_coeffs: dict[int, Fraction]  # odd i in [3, s]
    constant_term: dict[int, Fraction]  # j in [1, D]


def _column_sums(pf: PartialFractionExpansion) -> list[Fraction]:
    return [sum(row, Fraction(0)) for row in pf.rows]


def _constants(pf: PartialFractionExpansion) -> dict[int, Fraction]:
    s, D, n = pf.params.s, pf.params.D, pf.params.n
    # suffix sums over k turn the triple sum into O(n*s) work per offset
    suffix = [list(row) for row in pf.rows]
    for row in suffix:
        for k in range(n - 1, -1, -1):
            row[k] += row[k + 1]
    out: dict[int, Fraction] = {}
    for j in range(1, D + 1):
        total = Fraction(0)
        for ell in range(n + 1):
            inv = 1 / (ell + Fraction(j, D))
            pw = Fraction(1)
            for i in range(1, s + 1):
                pw *= inv
                if suffix[i - 1][ell]:
                    total += suffix[i - 1][ell] * pw
        out[j] = -total
    return out


def linear_form_coeffs(pf: PartialFractionExpansion) -> LinearFormCoefficients:
    """Column sums and constants; raises CoefficientSumError on a broken table."""
    sums = _column_sums(pf)
    if sums[0] != 0:
        raise CoefficientSumError(f"sum of order-1 coefficients is {sums[0]}, not 0")
    for i in range(2, pf.params.s + 1, 2):
        if sums[i - 1] != 0:
            raise CoefficientSumError(f"even-order sum at i={i} is {sums[i - 1]}, not 0")
    zeta_coeffs = {i: sums[i - 1] for i in range(3, pf.params.s + 1, 2)}
    return LinearFormCoefficients(
        params=pf.params,
        zeta_coeffs=zeta_coeffs,
        constant_term=_constants(pf),
    )


@dataclass(frozen=True)
class IntegralityCertificate:
    params: Params
    dn: int
    dn1: int
    structure: dict[str, bool]
    scaled_zeta: dict[int, Fraction]  # d_n^(s+1-i) * z_i
    scaled_const: dict[int, Fraction]  # d_{n+1}^(s+1) * c_j
    zeta_integral: dict[int, bool]
    const_integral: dict[int, bool]
    coeff_level_integral: bool
    passed: bool


def verify_integrality(
    pf: PartialFractionExpansion | LinearFormCoefficients,
) -> IntegralityCertificate:
    """Full certificate; never raises on failed checks, records them instead.

    Accepts either an expansion table (structural checks included, the path
    behind untrusted input) or already-extracted form coefficients.
    """
    if isinstance(pf, LinearFormCoefficients):
        return _certify(pf.params, None, pf.zeta_coeffs, pf.constant_term)
    params = pf.params
    sums = _column_sums(pf)
    n = params.n
    symmetric = all(
        pf.rows[i - 1][n - k] == (-1) ** (i + 1) * pf.rows[i - 1][k]
        for i in range(1, params.s + 1)
        for k in range(n + 1)
    )
    structure = {
        "first_order_sum_zero": sums[0] == 0,
        "even_order_sums_zero": all(sums[i - 1] == 0 for i in range(2, params.s + 1, 2)),
        "reflection_symmetry": symmetric,
    }
    zeta_coeffs = {i: sums[i - 1] for i in range(3, params.s + 1, 2)}
    dn = lcm_upto(n)
    coeff_level = all(
        (dn ** (params.s + 1 - i) * pf.rows[i - 1][k]).denominator == 1
        for i in range(1, params.s + 1)
        for k in range(n + 1)
    )
    return _certify(params, structure, zeta_coeffs, _constants(pf), coeff_level)


def _certify(
    params: Params,
    structure: dict[str, bool] | None,
    zeta_coeffs: dict[int, Fraction],
    constants: dict[int, Fraction],
    coeff_level: bool = True,
) -> IntegralityCertificate:
    s, n = params.s, params.n
    dn, dn1 = lcm_upto(n), lcm_upto(n + 1)
    scaled_zeta = {i: dn ** (s + 1 - i) * z for i, z in sorted(zeta_coeffs.items())}
    scaled_const = {j: dn1 ** (s + 1) * c for j, c in sorted(constants.items())}
    zeta_integral = {i: v.denominator == 1 for i, v in scaled_zeta.items()}
    const_integral = {j: v.denominator == 1 for j, v in scaled_const.items()}
    if structure is None:
        structure = {
            "first_order_sum_zero": True,
            "even_order_sums_zero": True,
            "reflection_symmetry": True,
        }
    passed = (
        all(structure.values())
        and all(zeta_integral.values())
        and all(const_integral.values())
        and coeff_level
    )
    return IntegralityCertificate(
        params=params,
        dn=dn,
        dn1=dn1,
        structure=structure,
        scaled_zeta=scaled_zeta,
        scaled_const=scaled_const,
        zeta_integral=zeta_integral,
        const_integral=const_integral,
        coeff_level_integral=coeff_level,
        passed=passed,
    )
