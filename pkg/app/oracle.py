"""
Truncated number-basis reference for the closed forms.

States are prepared by exponentiating the ladder-operator generators in a
working space padded beyond the retained truncation, then restricted to the
first `dim` levels. Whatever probability leaks past the truncation shows up
as tail mass.
"""

import logging
from typing import Any, Dict, Tuple

import numpy as np
from scipy.linalg import expm
from scipy.special import comb

from app.config import get_settings
from app.enums import G2Method, TruncationStatus
from app.exceptions import InvalidParameterError, TruncationError, UndefinedG2Error
from app.g2 import g2_single_closed_form, g2_two_mode_state
from app.moments import real_part
from app.schemas import G2Result, SingleModeState, TruncatedState, TwoModeState

logger = logging.getLogger(__name__)

WEIGHT_FLOOR = 1e-20
# largest mixture we are willing to hold, in complex amplitudes
MAX_MIXTURE_AMPLITUDES = 50_000_000


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def displacement(alpha: complex, dim: int) -> np.ndarray:
    a = annihilation(dim)
    return expm(alpha * a.conj().T - np.conj(alpha) * a)


def squeezer(xi: complex, dim: int) -> np.ndarray:
    a = annihilation(dim)
    a_dag = a.conj().T
    return expm(0.5 * xi * a_dag @ a_dag - 0.5 * np.conj(xi) * a @ a)


def thermal_weights(n_th: float, dim: int) -> np.ndarray:
    if n_th == 0:
        weights = np.zeros(dim)
        weights[0] = 1.0
        return weights
    ratio = n_th / (1.0 + n_th)
    return ratio ** np.arange(dim) / (1.0 + n_th)


def _padded(dim: int, minimum: int) -> int:
    return dim + max(minimum, dim // 4)


def _check_dim(dim: int, cap: int) -> None:
    if dim < 2:
        raise InvalidParameterError("truncation dimension must be at least 2")
    if dim > cap:
        raise TruncationError(f"truncation dimension {dim} exceeds the cap of {cap}")


def _truncated(
    dims: Tuple[int, ...],
    full_components: np.ndarray,
    retained: np.ndarray,
    weights: np.ndarray,
    working_dim: int,
) -> TruncatedState:
    trace = float(np.dot(weights, np.sum(np.abs(retained) ** 2, axis=1)))
    defect = float(np.max(np.abs(1.0 - np.sum(np.abs(full_components) ** 2, axis=1))))
    return TruncatedState(
        dims=dims,
        components=retained,
        weights=weights,
        working_dim=working_dim,
        tail_mass=max(0.0, 1.0 - trace),
        unitarity_defect=defect,
    )


def _flag_tail(ts: TruncatedState) -> TruncatedState:
    if ts.tail_mass > get_settings().ORACLE_TAIL_ESCALATE:
        logger.warning(
            "truncation at dim %d leaves tail mass %.3e", ts.dim, ts.tail_mass
        )
        return ts.model_copy(update={"status": TruncationStatus.WARNING})
    return ts


def _build_single_at(state: SingleModeState, dim: int) -> TruncatedState:
    working = _padded(dim, 16)
    unitary = displacement(state.alpha, working) @ squeezer(state.xi.xi, working)
    weights = thermal_weights(state.n_th, working)
    occupied = np.flatnonzero(weights > WEIGHT_FLOOR)
    columns = unitary[:, occupied].T
    return _truncated(
        (dim,), columns, np.ascontiguousarray(columns[:, :dim]), weights[occupied], working
    )


def build_single(state: SingleModeState, dim: int | None = None) -> TruncatedState:
    """
    rho = D(alpha) S(xi) nu(n_th) S(xi)^+ D(alpha)^+ truncated to `dim` levels.
    Without an explicit dim the truncation doubles until the tail mass is
    below ORACLE_TAIL_ESCALATE or the cap is reached.
    """
    settings = get_settings()
    cap = settings.ORACLE_DIM_SINGLE_CAP
    if dim is not None:
        _check_dim(dim, cap)
        return _flag_tail(_build_single_at(state, dim))
    current = min(settings.ORACLE_DIM_SINGLE, cap)
    ts = _build_single_at(state, current)
    while ts.tail_mass > settings.ORACLE_TAIL_ESCALATE and current < cap:
        current = min(2 * current, cap)
        logger.info(
            "tail mass %.3e, escalating truncation to %d", ts.tail_mass, current
        )
        ts = _build_single_at(state, current)
    return _flag_tail(ts)


def _two_mode_squeezer_columns(
    xi: complex, working: int, occupied: np.ndarray
) -> np.ndarray:
    """
    S_2(xi)|i, j> for each occupied (i, j), as working x working amplitude
    arrays. S_2 conserves i - j, so it is exponentiated one sector at a time.
    """
    columns = np.zeros((len(occupied), working, working), dtype=complex)
    by_sector: Dict[int, list] = {}
    for index, (i, j) in enumerate(occupied):
        by_sector.setdefault(int(i - j), []).append((index, int(min(i, j))))
    for sector, members in by_sector.items():
        offset_a, offset_b = max(sector, 0), max(-sector, 0)
        length = working - abs(sector)
        steps = np.arange(length - 1)
        couplings = np.sqrt((steps + offset_a + 1.0) * (steps + offset_b + 1.0))
        generator = np.zeros((length, length), dtype=complex)
        generator[steps + 1, steps] = xi * couplings
        generator[steps, steps + 1] = -np.conj(xi) * couplings
        block = expm(generator)
        ladder = np.arange(length)
        for index, start in members:
            columns[index, ladder + offset_a, ladder + offset_b] = block[:, start]
    return columns


def _build_two_mode_at(state: TwoModeState, dim: int) -> TruncatedState:
    working = _padded(dim, 8)
    weights = np.outer(
        thermal_weights(state.n_th1, working), thermal_weights(state.n_th2, working)
    )
    occupied = np.argwhere(weights > WEIGHT_FLOOR)
    if len(occupied) * working * working > MAX_MIXTURE_AMPLITUDES:
        raise TruncationError(
            f"{len(occupied)} mixture components at dim {dim} exceed the memory cap"
        )
    columns = _two_mode_squeezer_columns(state.xi.xi, working, occupied)
    shift_a = displacement(state.alpha, working)
    shift_b = displacement(state.beta, working)
    columns = shift_a @ columns @ shift_b.T
    retained = columns[:, :dim, :dim].reshape(len(occupied), dim * dim)
    return _truncated(
        (dim, dim),
        columns.reshape(len(occupied), -1),
        np.ascontiguousarray(retained),
        weights[occupied[:, 0], occupied[:, 1]],
        working,
    )


def build_two_mode(state: TwoModeState, dim: int | None = None) -> TruncatedState:
    settings = get_settings()
    cap = settings.ORACLE_DIM_TWO_MODE_CAP
    if dim is not None:
        _check_dim(dim, cap)
        return _flag_tail(_build_two_mode_at(state, dim))
    current = min(settings.ORACLE_DIM_TWO_MODE, cap)
    ts = _build_two_mode_at(state, current)
    if ts.tail_mass > settings.ORACLE_TAIL_ESCALATE and current < cap:
        logger.info("tail mass %.3e, escalating truncation to %d", ts.tail_mass, cap)
        ts = _build_two_mode_at(state, cap)
    return _flag_tail(ts)


def populations(ts: TruncatedState) -> np.ndarray:
    """
    Number distribution: length dim for one mode, dim x dim for two.
    """
    probabilities = ts.weights @ (np.abs(ts.components) ** 2)
    return probabilities.reshape(ts.dims)


def _check_tail(ts: TruncatedState) -> None:
    if ts.tail_mass >= get_settings().ORACLE_TAIL_MAX:
        raise TruncationError(
            f"tail mass {ts.tail_mass:.3e} at dim {ts.dim} is too large for a reference value"
        )


def _normalized_populations(ts: TruncatedState) -> np.ndarray:
    _check_tail(ts)
    distribution = populations(ts)
    return distribution / distribution.sum()


def _single_mode_g2(distribution: np.ndarray) -> float:
    n = np.arange(distribution.shape[0], dtype=float)
    mean = float(np.dot(n, distribution))
    if mean < get_settings().VACUUM_EPS:
        raise UndefinedG2Error()
    return float(np.dot(n * (n - 1), distribution)) / mean**2


def g2_oracle(ts: TruncatedState, mode: int | None = None) -> G2Result:
    """
    g2 from photon-number statistics. For two modes, mode=None gives the g2
    of the total photon number and mode=0/1 that of one reduced mode.
    """
    distribution = _normalized_populations(ts)
    if ts.modes == 1:
        if mode not in (None, 0):
            raise InvalidParameterError("a single-mode state only has mode 0")
        return G2Result(value=_single_mode_g2(distribution), method=G2Method.ORACLE)
    if mode in (0, 1):
        marginal = distribution.sum(axis=1 - mode)
        return G2Result(value=_single_mode_g2(marginal), method=G2Method.ORACLE)
    if mode is not None:
        raise InvalidParameterError(f"mode must be None, 0 or 1, got {mode}")
    n = np.arange(ts.dim, dtype=float)
    marginal_a, marginal_b = distribution.sum(axis=1), distribution.sum(axis=0)
    mean_a, mean_b = float(n @ marginal_a), float(n @ marginal_b)
    if mean_a + mean_b < get_settings().VACUUM_EPS:
        raise UndefinedG2Error()
    pairs_a = float((n * (n - 1)) @ marginal_a)
    pairs_b = float((n * (n - 1)) @ marginal_b)
    cross = float(n @ distribution @ n)
    value = (pairs_a + pairs_b + 2 * cross) / (mean_a + mean_b) ** 2
    return G2Result(value=value, method=G2Method.ORACLE)


def number_moments_oracle(
    ts: TruncatedState, max_power: int = 4
) -> Dict[Tuple[int, ...], float]:
    if max_power < 0:
        raise InvalidParameterError("max_power must be non-negative")
    distribution = _normalized_populations(ts)
    n = np.arange(ts.dim, dtype=float)
    if ts.modes == 1:
        return {(k,): float(n**k @ distribution) for k in range(max_power + 1)}
    return {
        (k, l): float(n**k @ distribution @ n**l)
        for k in range(max_power + 1)
        for l in range(max_power + 1 - k)
    }


def symmetrized_product(creations: int, annihilations: int, dim: int) -> np.ndarray:
    """
    [(a^+)^j a^l]_s restricted to `dim` levels: the average of all orderings,
    summed with W(j, l) = a^+ W(j-1, l) + a W(j, l-1).
    """
    working = dim + creations + annihilations
    a = annihilation(working)
    a_dag = a.conj().T
    words: Dict[Tuple[int, int], np.ndarray] = {(0, 0): np.eye(working, dtype=complex)}
    for total in range(1, creations + annihilations + 1):
        for j in range(max(0, total - annihilations), min(creations, total) + 1):
            l = total - j
            word = np.zeros((working, working), dtype=complex)
            if j:
                word += a_dag @ words[(j - 1, l)]
            if l:
                word += a @ words[(j, l - 1)]
            words[(j, l)] = word
    average = words[(creations, annihilations)] / comb(
        creations + annihilations, creations, exact=True
    )
    return average[:dim, :dim]


def symmetric_moment_oracle(ts: TruncatedState, orders: Tuple[int, ...]) -> float:
    """
    <prod_k [(a_k^+)^{n_k} a_k^{n_k}]_s> traced against the truncated state.
    """
    if len(orders) != ts.modes or any(order < 0 for order in orders):
        raise InvalidParameterError(
            f"expected {ts.modes} non-negative orders, got {tuple(orders)}"
        )
    _check_tail(ts)
    if ts.modes == 1:
        operator = symmetrized_product(orders[0], orders[0], ts.dim)
        values = np.einsum(
            "ki,ij,kj->k", ts.components.conj(), operator, ts.components
        )
    else:
        first = symmetrized_product(orders[0], orders[0], ts.dim)
        second = symmetrized_product(orders[1], orders[1], ts.dim)
        amplitudes = ts.components.reshape(-1, ts.dim, ts.dim)
        values = np.einsum(
            "kij,kij->k", amplitudes.conj(), first @ amplitudes @ second.T
        )
    expectation = complex(np.dot(ts.weights, values)) / ts.trace
    return real_part(expectation, f"oracle symmetric moment {tuple(orders)}")


def mean_photon_number(ts: TruncatedState) -> float:
    n = np.arange(ts.dim, dtype=float)
    distribution = _normalized_populations(ts)
    if ts.modes == 1:
        return float(n @ distribution)
    return float(n @ distribution.sum(axis=1) + n @ distribution.sum(axis=0))


def convergence_gap(state: SingleModeState, dim: int) -> float:
    """
    Change of the oracle g2 when the truncation is doubled.
    """
    coarse = g2_oracle(build_single(state, dim)).value
    fine = g2_oracle(build_single(state, 2 * dim)).value
    return abs(fine - coarse) / max(1.0, abs(coarse))


def compare_with_closed_form(
    state: SingleModeState | TwoModeState,
    dim: int | None = None,
    convergence: bool = False,
) -> Dict[str, Any]:
    """
    One benchmark row: the oracle g2 next to the closed form (single mode) or
    the moment pipeline (two modes), with the truncation diagnostics. With
    `convergence` a single-mode row also reports the change of the oracle
    value when the truncation is doubled.
    """
    if isinstance(state, TwoModeState):
        ts = build_two_mode(state, dim)
        reference = g2_two_mode_state(state).value
        row: Dict[str, Any] = {
            "alpha": state.alpha.real,
            "beta": state.beta.real,
            "r": state.xi.r,
            "psi": state.xi.psi,
            "n_th1": state.n_th1,
            "n_th2": state.n_th2,
            "dim": ts.dim,
            "pipeline": reference,
        }
    else:
        ts = build_single(state, dim)
        reference = g2_single_closed_form(state).value
        row = {
            "alpha": state.alpha.real,
            "r": state.xi.r,
            "psi": state.xi.psi,
            "n_th": state.n_th,
            "dim": ts.dim,
            "closed_form": reference,
        }
    oracle = g2_oracle(ts).value
    row.update(
        oracle=oracle,
        relative_difference=abs(oracle - reference) / max(1.0, abs(reference)),
        mean_photon_number=mean_photon_number(ts),
        tail_mass=ts.tail_mass,
        status=ts.status.value,
    )
    if convergence:
        if ts.modes != 1:
            raise InvalidParameterError("convergence gaps are computed for one mode only")
        row["convergence_gap"] = convergence_gap(state, ts.dim)
    return row
