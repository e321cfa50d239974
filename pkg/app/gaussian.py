"""
Covariance-matrix representation of single- and two-mode Gaussian states.

Quadratures are q = (a + a^+)/sqrt(2) and p = i(a^+ - a)/sqrt(2), so the
vacuum covariance matrix is I/2 and x_theta = cos(theta) q + sin(theta) p.
The squeezer is S(xi) = exp[xi (a^+)^2 / 2 - xi* a^2 / 2] with xi = r e^{i psi};
psi = pi squeezes the q quadrature.
"""

import math
from typing import List, Tuple

import numpy as np

from app.config import get_settings
from app.exceptions import InvalidParameterError
from app.schemas import (
    CovarianceMatrix,
    FirstMoments,
    PhysicalityReport,
    SingleModeState,
    TwoModeState,
)


def _amplitude_vector(*amplitudes: complex) -> np.ndarray:
    return math.sqrt(2.0) * np.array(
        [part for z in amplitudes for part in (z.real, z.imag)], dtype=float
    )


def cm_single(state: SingleModeState) -> Tuple[CovarianceMatrix, FirstMoments]:
    r, psi = state.xi.r, state.xi.psi
    scale = (1.0 + 2.0 * state.n_th) / 2.0
    cosh2r, sinh2r = math.cosh(2 * r), math.sinh(2 * r)
    sigma_qq = scale * (cosh2r + sinh2r * math.cos(psi))
    sigma_pp = scale * (cosh2r - sinh2r * math.cos(psi))
    sigma_qp = scale * sinh2r * math.sin(psi)
    cm = CovarianceMatrix(entries=[[sigma_qq, sigma_qp], [sigma_qp, sigma_pp]])
    return cm, FirstMoments(entries=_amplitude_vector(state.alpha))


def cm_two_mode(state: TwoModeState) -> Tuple[CovarianceMatrix, FirstMoments]:
    r, psi = state.xi.r, state.xi.psi
    n1, n2 = state.n_th1, state.n_th2
    cosh_sq, sinh_sq = math.cosh(r) ** 2, math.sinh(r) ** 2
    a_coef = math.cosh(2 * r) + 2 * (n1 * cosh_sq + n2 * sinh_sq)
    b_coef = math.cosh(2 * r) + 2 * (n1 * sinh_sq + n2 * cosh_sq)
    c_coef = (1 + n1 + n2) * math.sinh(2 * r)
    rotation = np.array(
        [[math.cos(psi), math.sin(psi)], [math.sin(psi), -math.cos(psi)]]
    )
    identity = np.eye(2)
    entries = 0.5 * np.block(
        [
            [a_coef * identity, c_coef * rotation],
            [c_coef * rotation, b_coef * identity],
        ]
    )
    moments = FirstMoments(entries=_amplitude_vector(state.alpha, state.beta))
    return CovarianceMatrix(entries=entries), moments


def purity(state: SingleModeState | TwoModeState) -> float:
    if isinstance(state, TwoModeState):
        return 1.0 / ((1 + 2 * state.n_th1) * (1 + 2 * state.n_th2))
    return 1.0 / (1 + 2 * state.n_th)


def nonclassical_depth(r: float, n_th: float) -> float:
    """
    T(r, N) = 1 - (1 + 2N) e^{-2r}. Positive for nonclassical single-mode
    squeezed thermal states; r may be negative.
    """
    return 1.0 - (1.0 + 2.0 * n_th) * math.exp(-2.0 * r)


def threshold_squeezing(n_th: float) -> float:
    if n_th < 0:
        raise InvalidParameterError("thermal photon number must be non-negative")
    return 0.5 * math.log1p(2.0 * n_th)


def _symplectic_form(modes: int) -> np.ndarray:
    return np.kron(np.eye(modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(cm: CovarianceMatrix) -> List[float]:
    omega = _symplectic_form(cm.modes)
    moduli = np.sort(np.abs(np.linalg.eigvals(1j * omega @ cm.entries)))
    # each symplectic eigenvalue appears as a +/- pair
    return moduli[::2].tolist()


def check_physical(cm: CovarianceMatrix) -> PhysicalityReport:
    eigenvalues = symplectic_eigenvalues(cm)
    tol = get_settings().PHYSICALITY_TOL
    positive = bool(np.min(np.linalg.eigvalsh(cm.entries)) > 0)
    physical = positive and all(nu >= 0.5 - tol for nu in eigenvalues)
    return PhysicalityReport(physical=physical, symplectic_eigenvalues=eigenvalues)


def reduced_cm(cm: CovarianceMatrix, mode: int) -> CovarianceMatrix:
    if cm.modes != 2:
        raise InvalidParameterError("reduced_cm needs a two-mode covariance matrix")
    if mode not in (0, 1):
        raise InvalidParameterError(f"mode must be 0 or 1, got {mode}")
    block = slice(2 * mode, 2 * mode + 2)
    return CovarianceMatrix(entries=cm.entries[block, block])


def reduced_moments(x: FirstMoments, mode: int) -> FirstMoments:
    if x.dim != 4:
        raise InvalidParameterError("reduced_moments needs two-mode first moments")
    if mode not in (0, 1):
        raise InvalidParameterError(f"mode must be 0 or 1, got {mode}")
    return FirstMoments(entries=x.entries[2 * mode : 2 * mode + 2])
