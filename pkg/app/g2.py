"""
Zero-delay second-order correlation g2(0) and the coherent-amplitude
thresholds below which it stays at or above 1.
"""

import logging
import math
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from app.config import get_settings
from app.enums import G2Method, ThresholdMethod
from app.exceptions import InvalidParameterError, NumericalFailure, UndefinedG2Error
from app.gaussian import cm_two_mode, nonclassical_depth, reduced_cm, reduced_moments
from app.moments import chi_coefficients, cross_moment, symmetric_moments_order2_single
from app.schemas import (
    CovarianceMatrix,
    FirstMoments,
    G2Result,
    SingleModeState,
    ThresholdResult,
    TwoModeState,
)

logger = logging.getLogger(__name__)


def exact_result(value: float, method: G2Method) -> G2Result:
    """
    Wraps an exactly computed g2, clamping round-off negatives to zero.
    """
    tolerance = get_settings().G2_NEGATIVE_TOL
    if value < -tolerance:
        raise NumericalFailure(f"g2 evaluated to {value:.3e}, below zero")
    if value < 0:
        logger.warning("clamping g2 = %.3e to zero", value)
        value = 0.0
    return G2Result(value=value, method=method)


def single_mode_g2_value(m1: float, m2: float) -> float:
    """
    g2 = 2(2 m2 - 4 m1 + 1) / (2 m1 - 1)^2 from the first two symmetric moments.
    """
    if m1 - 0.5 < get_settings().VACUUM_EPS:
        raise UndefinedG2Error()
    return 2 * (2 * m2 - 4 * m1 + 1) / (2 * m1 - 1) ** 2


def g2_single_from_moments(m1: float, m2: float) -> G2Result:
    return exact_result(single_mode_g2_value(m1, m2), G2Method.MOMENT_PIPELINE)


def g2_single_from_cm(cm: CovarianceMatrix, x: FirstMoments) -> G2Result:
    if cm.modes != 1:
        raise InvalidParameterError("g2_single_from_cm needs a single-mode state")
    return g2_single_from_moments(*symmetric_moments_order2_single(chi_coefficients(cm, x)))


def _real_amplitude(alpha: complex) -> float:
    alpha = complex(alpha)
    if alpha.imag != 0:
        raise InvalidParameterError(
            "closed-form expressions need a real displacement, "
            f"got alpha = {alpha}"
        )
    return alpha.real


def _thermal_factors(r: float, n_th: float) -> tuple[float, float]:
    scale = 1.0 + 2.0 * n_th
    return scale * math.cosh(2 * r), scale * math.sinh(2 * r)


def g2_single_closed_form(state: SingleModeState) -> G2Result:
    alpha = _real_amplitude(state.alpha)
    cosh_term, sinh_term = _thermal_factors(state.xi.r, state.n_th)
    twice_mean = cosh_term - 1 + 2 * alpha**2
    if twice_mean / 2 < get_settings().VACUUM_EPS:
        raise UndefinedG2Error()
    numerator = (
        sinh_term * (sinh_term + 4 * alpha**2 * math.cos(state.xi.psi)) - 4 * alpha**4
    )
    return exact_result(2 + numerator / twice_mean**2, G2Method.CLOSED_FORM)


def _validate_threshold_inputs(r: float, n_th: float) -> None:
    if not math.isfinite(r) or not math.isfinite(n_th):
        raise InvalidParameterError("threshold parameters must be finite")
    if r <= 0:
        raise InvalidParameterError("no squeezing: threshold undefined")
    if n_th < 0:
        raise InvalidParameterError("thermal photon number must be non-negative")


def _threshold(numerator: float, denominator: float) -> ThresholdResult:
    if denominator > get_settings().DENOMINATOR_EPS:
        return ThresholdResult(
            exists=True,
            alpha_th=0.5 * math.sqrt(numerator / denominator),
            denominator=denominator,
        )
    return ThresholdResult(exists=False, denominator=denominator)


def alpha_threshold(r: float, psi: float, n_th: float) -> ThresholdResult:
    _validate_threshold_inputs(r, n_th)
    cosh_term, sinh_term = _thermal_factors(r, n_th)
    numerator = sinh_term**2 + (cosh_term - 1) ** 2
    denominator = nonclassical_depth(r, n_th) - sinh_term * (1 + math.cos(psi))
    return _threshold(numerator, denominator)


def alpha_threshold_pi(r: float, n_th: float) -> ThresholdResult:
    """
    Amplitude-squeezing threshold; it exists exactly when the state is
    nonclassical.
    """
    _validate_threshold_inputs(r, n_th)
    cosh_term, sinh_term = _thermal_factors(r, n_th)
    numerator = sinh_term**2 + (cosh_term - 1) ** 2
    return _threshold(numerator, nonclassical_depth(r, n_th))


def alpha_min_pi(r: float, n_th: float) -> float | None:
    """
    Amplitude at which g2 is minimal along psi = pi, or None when g2 has no
    interior minimum. The point is checked to be a local minimum.
    """
    _validate_threshold_inputs(r, n_th)
    depth = nonclassical_depth(r, n_th)
    if depth <= get_settings().DENOMINATOR_EPS:
        return None
    _, sinh_term = _thermal_factors(r, n_th)
    radicand = sinh_term / depth - 0.5
    if radicand < 0:
        return None
    alpha_min = math.sqrt(sinh_term) * math.sqrt(radicand)

    def g2_at(alpha: float) -> float:
        state = SingleModeState.from_params(alpha=alpha, r=r, psi=math.pi, n_th=n_th)
        return g2_single_closed_form(state).value

    step = max(1e-4 * alpha_min, 1e-7)
    centre = g2_at(alpha_min)
    if not (g2_at(alpha_min - step) > centre and g2_at(alpha_min + step) > centre):
        raise NumericalFailure(
            f"alpha = {alpha_min:.6g} is not a local minimum of g2 "
            f"for r = {r}, n_th = {n_th}"
        )
    return alpha_min


def g2_two_mode(cm: CovarianceMatrix, x: FirstMoments) -> G2Result:
    """
    g2 of the total photon number of two modes, from the symmetric moments
    of each mode and their cross moment.
    """
    if cm.modes != 2:
        raise InvalidParameterError("g2_two_mode needs a two-mode state")
    chi = chi_coefficients(cm, x)
    m1_a, m2_a = symmetric_moments_order2_single(chi, mode=1)
    m1_b, m2_b = symmetric_moments_order2_single(chi, mode=2)
    total_photons = m1_a + m1_b - 1
    if total_photons < get_settings().VACUUM_EPS:
        raise UndefinedG2Error()
    numerator = m2_a + m2_b - 3 * (m1_a + m1_b - 0.5) + 2 * cross_moment(chi)
    return exact_result(numerator / total_photons**2, G2Method.MOMENT_PIPELINE)


def g2_two_mode_state(state: TwoModeState) -> G2Result:
    return g2_two_mode(*cm_two_mode(state))


def g2_reduced_mode(cm: CovarianceMatrix, x: FirstMoments, mode: int) -> G2Result:
    """
    g2 of one mode of a two-mode state, from its reduced covariance block
    and first moments.
    """
    return g2_single_from_cm(reduced_cm(cm, mode), reduced_moments(x, mode))


def alpha_threshold_two_mode_symmetric(
    r: float, psi: float, n_th: float
) -> ThresholdResult:
    """
    Threshold for alpha = beta and equal thermal populations in both modes.
    """
    _validate_threshold_inputs(r, n_th)
    cosh_term, sinh_term = _thermal_factors(r, n_th)
    numerator = sinh_term**2 + (cosh_term - 1) ** 2
    mean_depth = 0.5 * (nonclassical_depth(r, n_th) + nonclassical_depth(-r, n_th))
    return _threshold(numerator, mean_depth - sinh_term * math.cos(psi))


def solve_two_mode_threshold(
    r: float,
    psi: float,
    n_th1: float,
    n_th2: float,
    beta_ratio: float = 1.0,
    alpha_max: float = 20.0,
    grid_points: int = 4000,
) -> ThresholdResult:
    """
    Smallest alpha, with beta = beta_ratio * alpha, at which the two-mode g2
    drops below 1. The crossing is bracketed on a grid and refined with
    Brent's method.
    """
    _validate_threshold_inputs(r, min(n_th1, n_th2))
    if not math.isfinite(beta_ratio) or beta_ratio < 0:
        raise InvalidParameterError("beta_ratio must be a finite non-negative number")
    if alpha_max <= 0 or grid_points < 2:
        raise InvalidParameterError("alpha_max must be positive and grid_points >= 2")

    def excess(alpha: float) -> float:
        state = TwoModeState.from_params(
            alpha=alpha, beta=beta_ratio * alpha, r=r, psi=psi, n_th1=n_th1, n_th2=n_th2
        )
        return g2_two_mode_state(state).value - 1.0

    return _first_downward_crossing(excess, alpha_max, grid_points)


def _first_downward_crossing(
    excess: Callable[[float], float], alpha_max: float, grid_points: int
) -> ThresholdResult:
    grid = np.linspace(alpha_max / grid_points, alpha_max, grid_points)
    previous = grid[0]
    if excess(previous) < 0:
        logger.warning("g2 is already below 1 at alpha = %.3g", previous)
        return ThresholdResult(
            exists=True, alpha_th=float(previous), method=ThresholdMethod.ROOT_FINDING
        )
    for alpha in grid[1:]:
        if excess(alpha) < 0:
            root = brentq(excess, previous, alpha, xtol=1e-14, rtol=4 * np.finfo(float).eps)
            return ThresholdResult(
                exists=True, alpha_th=float(root), method=ThresholdMethod.ROOT_FINDING
            )
        previous = alpha
    return ThresholdResult(exists=False, method=ThresholdMethod.ROOT_FINDING)


def two_mode_threshold(
    r: float, psi: float, n_th1: float, n_th2: float, beta_ratio: float = 1.0
) -> ThresholdResult:
    """
    Closed form for equal displacements and equal thermal noise, root
    finding otherwise.
    """
    if n_th1 == n_th2 and beta_ratio == 1.0:
        return alpha_threshold_two_mode_symmetric(r, psi, n_th1)
    return solve_two_mode_threshold(r, psi, n_th1, n_th2, beta_ratio)
