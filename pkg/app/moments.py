"""
Characteristic-function coefficients and symmetrically ordered moments of
Gaussian states.

Symmetric (Weyl) ordered expectations are averages over the Wigner function,
which for a Gaussian state is a normal distribution with the covariance
matrix and first moments of the state. They are evaluated with the Isserlis
recursion over the complex linear forms z_k = (q_k + i p_k)/sqrt(2), whose
bilinear covariances are L_i^T sigma L_j.
"""

import math
from functools import lru_cache
from itertools import product
from typing import Dict, Sequence, Tuple

import numpy as np

from app.config import get_settings
from app.exceptions import InvalidParameterError, NumericalFailure
from app.schemas import ChiCoefficients, CovarianceMatrix, FirstMoments, SymmetricMoments

MAX_DERIVATIVE_ORDER = 8
MAX_SYMMETRIC_TOTAL = 4

# <N^k> in terms of S_j = <[(a^+)^j a^j]_s>, coefficients indexed by j
NUMBER_POWER_COEFFICIENTS: Dict[int, Tuple[float, ...]] = {
    0: (1.0,),
    1: (-0.5, 1.0),
    2: (0.0, -1.0, 1.0),
    3: (0.25, -0.5, -1.5, 1.0),
    4: (0.0, 2.0, -2.0, -2.0, 1.0),
}


def _check_dimensions(cm: CovarianceMatrix, x: FirstMoments) -> None:
    if cm.dim != x.dim:
        raise InvalidParameterError(
            f"covariance matrix has dimension {cm.dim} but first moments have {x.dim}"
        )


def real_part(value: complex, what: str) -> float:
    """
    Real part of an expectation that must be real, failing loudly on an
    imaginary residue above IMAG_RESIDUE_TOL relative to its magnitude.
    """
    value = complex(value)
    scale = max(1.0, abs(value))
    if abs(value.imag) > get_settings().IMAG_RESIDUE_TOL * scale:
        raise NumericalFailure(
            f"{what} has imaginary residue {value.imag:.3e} (value {value.real:.6g})"
        )
    return value.real


def chi_coefficients(cm: CovarianceMatrix, x: FirstMoments) -> ChiCoefficients:
    _check_dimensions(cm, x)
    sigma, mean = cm.entries, x.entries
    a, b, c = sigma[0, 0], sigma[1, 1], sigma[0, 1]
    coefficients = {
        "A_coef": (a + b) / 2,
        "C_coef": complex(a - b, -2 * c) / 4,
        "U_coef": complex(mean[0], mean[1]) / math.sqrt(2),
    }
    if cm.modes == 2:
        d_a, d_b, d_c = sigma[2, 2], sigma[3, 3], sigma[2, 3]
        e, f = sigma[0, 2], sigma[0, 3]
        g, h = sigma[1, 2], sigma[1, 3]
        coefficients.update(
            B_coef=(d_a + d_b) / 2,
            D_coef=complex(d_a - d_b, -2 * d_c) / 4,
            V_coef=complex(mean[2], mean[3]) / math.sqrt(2),
            E_coef=complex(e - h, -(f + g)) / 2,
            F_coef=complex(e + h, f - g) / 2,
        )
    return ChiCoefficients(**coefficients)


def symmetric_moments_order2_single(
    chi: ChiCoefficients, mode: int = 1
) -> Tuple[float, float]:
    """
    (<[a^+ a]_s>, <[(a^+)^2 a^2]_s>) of one mode.

    C is the conjugate of half the squared-fluctuation moment, so the mean
    amplitude enters the second-order term conjugated.
    """
    if mode == 1:
        spread, squeeze, mean = chi.A_coef, chi.C_coef, chi.U_coef
    elif mode == 2:
        if chi.modes != 2:
            raise InvalidParameterError("mode 2 requested from single-mode coefficients")
        spread, squeeze, mean = chi.B_coef, chi.D_coef, chi.V_coef
    else:
        raise InvalidParameterError(f"mode must be 1 or 2, got {mode}")
    intensity = abs(mean) ** 2
    m1 = spread + intensity
    m2 = 2 * spread**2 + 4 * spread * intensity + abs(2 * squeeze + mean.conjugate() ** 2) ** 2
    return m1, m2


def cross_moment(chi: ChiCoefficients) -> float:
    """
    <[a^+ a]_s [b^+ b]_s> of a two-mode Gaussian state.
    """
    if chi.modes != 2:
        raise InvalidParameterError("cross_moment needs two-mode coefficients")
    A, B = chi.A_coef, chi.B_coef
    E, F = chi.E_coef, chi.F_coef
    U, V = chi.U_coef, chi.V_coef
    value = (
        abs(E) ** 2
        + abs(F) ** 2
        + abs(U) ** 2 * abs(V) ** 2
        + A * abs(V) ** 2
        + B * abs(U) ** 2
        + A * B
        + U.conjugate() * V.conjugate() * E.conjugate()
        + U * V * E
        + V.conjugate() * U * F
        + F.conjugate() * U.conjugate() * V
    )
    return real_part(value, "cross moment")


def _linear_forms(modes: int) -> np.ndarray:
    """
    Rows are z_1*, z_1[, z_2*, z_2] as coefficient vectors over (q1, p1, ...).
    """
    forms = np.zeros((2 * modes, 2 * modes), dtype=complex)
    for k in range(modes):
        forms[2 * k, 2 * k : 2 * k + 2] = (1 / math.sqrt(2), -1j / math.sqrt(2))
        forms[2 * k + 1, 2 * k : 2 * k + 2] = (1 / math.sqrt(2), 1j / math.sqrt(2))
    return forms


def _isserlis_expectation(
    means: np.ndarray, covariances: np.ndarray, counts: Tuple[int, ...]
) -> complex:
    """
    E[prod_t Y_t^{counts[t]}] for jointly Gaussian (complex-linear) Y_t.
    """

    @lru_cache(maxsize=None)
    def expectation(remaining: Tuple[int, ...]) -> complex:
        if not any(remaining):
            return 1.0 + 0j
        first = next(index for index, count in enumerate(remaining) if count)
        reduced = list(remaining)
        reduced[first] -= 1
        total = means[first] * expectation(tuple(reduced))
        for partner, count in enumerate(reduced):
            if count == 0:
                continue
            paired = list(reduced)
            paired[partner] -= 1
            total += count * covariances[first, partner] * expectation(tuple(paired))
        return total

    return expectation(tuple(counts))


def symmetric_expectation(
    cm: CovarianceMatrix, x: FirstMoments, orders: Sequence[Tuple[int, int]]
) -> complex:
    """
    <prod_k [(a_k^+)^{j_k} a_k^{l_k}]_s> for per-mode exponent pairs (j_k, l_k).
    """
    _check_dimensions(cm, x)
    if len(orders) != cm.modes:
        raise InvalidParameterError(
            f"expected {cm.modes} exponent pairs, got {len(orders)}"
        )
    counts = tuple(int(exponent) for pair in orders for exponent in pair)
    if any(count < 0 for count in counts):
        raise InvalidParameterError("exponents must be non-negative")
    if sum(counts) > MAX_DERIVATIVE_ORDER:
        raise InvalidParameterError(
            f"total order {sum(counts)} exceeds the supported {MAX_DERIVATIVE_ORDER}"
        )
    forms = _linear_forms(cm.modes)
    means = forms @ x.entries
    covariances = forms @ cm.entries @ forms.T
    return complex(_isserlis_expectation(means, covariances, counts))


def gaussian_symmetric_moment(
    cm: CovarianceMatrix, x: FirstMoments, orders: Sequence[int]
) -> float:
    """
    <prod_k [(a_k^+)^{n_k} a_k^{n_k}]_s>, the Wigner average of prod |z_k|^{2 n_k}.
    """
    value = symmetric_expectation(cm, x, [(order, order) for order in orders])
    return real_part(value, f"symmetric moment {tuple(orders)}")


def symmetric_moments(
    cm: CovarianceMatrix, x: FirstMoments, max_total: int = MAX_SYMMETRIC_TOTAL
) -> SymmetricMoments:
    if not 0 <= max_total <= MAX_SYMMETRIC_TOTAL:
        raise InvalidParameterError(
            f"max_total must be between 0 and {MAX_SYMMETRIC_TOTAL}"
        )
    _check_dimensions(cm, x)
    values = {
        orders: gaussian_symmetric_moment(cm, x, orders)
        for orders in product(range(max_total + 1), repeat=cm.modes)
        if sum(orders) <= max_total
    }
    return SymmetricMoments(modes=cm.modes, values=values)


def _required(sym: SymmetricMoments, orders: Tuple[int, ...]) -> float:
    try:
        return sym.values[orders]
    except KeyError:
        raise InvalidParameterError(
            f"symmetric moment of order {orders} is missing"
        ) from None


def number_powers_from_symmetric(
    sym: SymmetricMoments, max_total: int | None = None
) -> Dict[Tuple[int, ...], float]:
    """
    <N^n> (or <N_1^n N_2^m>) up to total power max_total, expanded from the
    symmetric moments. Defaults to the highest total available.
    """
    if max_total is None:
        max_total = max(sum(orders) for orders in sym.values)
    if not 0 <= max_total <= MAX_SYMMETRIC_TOTAL:
        raise InvalidParameterError(
            f"number powers are available up to order {MAX_SYMMETRIC_TOTAL}"
        )
    powers: Dict[Tuple[int, ...], float] = {}
    for orders in product(range(max_total + 1), repeat=sym.modes):
        if sum(orders) > max_total:
            continue
        total = 0.0
        for symmetric_orders in product(*(range(order + 1) for order in orders)):
            weight = math.prod(
                NUMBER_POWER_COEFFICIENTS[order][j]
                for order, j in zip(orders, symmetric_orders)
            )
            if weight:
                total += weight * _required(sym, symmetric_orders)
        powers[orders] = total
    return powers


def photon_number_moments(
    cm: CovarianceMatrix, x: FirstMoments, max_total: int = MAX_SYMMETRIC_TOTAL
) -> Dict[Tuple[int, ...], float]:
    return number_powers_from_symmetric(symmetric_moments(cm, x, max_total), max_total)
