"""
Reconstruction of the covariance matrix, first moments and g2 of a
single-mode Gaussian state from homodyne samples at four fixed phases.

<q> and sigma_qq come from theta = 0, <p> and sigma_pp from theta = pi/2,
and the symmetrized <qp + pq> from the difference of the second moments at
theta = pi/4 and theta = -pi/4.
"""

import logging
import math
import warnings
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy import stats

from app.config import get_settings
from app.enums import G2Method, ReconstructionStatus
from app.exceptions import InvalidParameterError, UndefinedG2Error, UnphysicalStateError
from app.g2 import single_mode_g2_value
from app.gaussian import check_physical
from app.homodyne import BOOTSTRAP_STREAM, phase_generators
from app.moments import chi_coefficients, symmetric_moments_order2_single
from app.schemas import (
    BootstrapInterval,
    CovarianceMatrix,
    FirstMoments,
    G2Result,
    GaussianityReport,
    HomodyneTrace,
    PhaseDiagnostics,
    ReconstructionResult,
    SingleModeState,
    StateFit,
    same_phase,
)

logger = logging.getLogger(__name__)

Statistic = Callable[[Sequence[float], Sequence[np.ndarray]], float]

REQUIRED_PHASES = {
    "0": 0.0,
    "pi/2": math.pi / 2,
    "pi/4": math.pi / 4,
    "-pi/4": -math.pi / 4,
}
DEGENERATE_SQUEEZING = 1e-12


def _pick(
    thetas: Sequence[float], samples: Sequence[np.ndarray], minimum: int = 1
) -> List[np.ndarray]:
    """
    Samples at 0, pi/2, pi/4 and -pi/4, in that order.
    """
    picked = []
    for name, target in REQUIRED_PHASES.items():
        match = next(
            (values for theta, values in zip(thetas, samples) if same_phase(theta, target)),
            None,
        )
        if match is None or match.size == 0:
            raise InvalidParameterError(f"trace has no samples at phase {name}")
        if match.size < minimum:
            raise InvalidParameterError(
                f"phase {name} has {match.size} samples, at least {minimum} are needed"
            )
        picked.append(match)
    return picked


def quadrature_moments(
    thetas: Sequence[float], samples: Sequence[np.ndarray]
) -> Tuple[CovarianceMatrix, FirstMoments]:
    q, p, plus, minus = _pick(thetas, samples, minimum=2)
    mean_q, mean_p = float(q.mean()), float(p.mean())
    sigma_qq, sigma_pp = float(q.var(ddof=1)), float(p.var(ddof=1))
    sigma_qp = (float(np.mean(plus**2)) - float(np.mean(minus**2))) / 2 - mean_q * mean_p
    cm = CovarianceMatrix(entries=[[sigma_qq, sigma_qp], [sigma_qp, sigma_pp]])
    return cm, FirstMoments(entries=[mean_q, mean_p])


def _g2_value(cm: CovarianceMatrix, x: FirstMoments) -> float:
    return single_mode_g2_value(*symmetric_moments_order2_single(chi_coefficients(cm, x)))


def g2_statistic(thetas: Sequence[float], samples: Sequence[np.ndarray]) -> float:
    return _g2_value(*quadrature_moments(thetas, samples))


def fit_state_params(cm: CovarianceMatrix, x: FirstMoments) -> StateFit:
    """
    Inverts the squeezed-thermal covariance matrix: 1 + 2N = 2 sqrt(det sigma),
    sinh 2r from the anisotropy and psi from its orientation.
    """
    if cm.modes != 1 or x.dim != 2:
        raise InvalidParameterError("fit_state_params needs a single-mode state")
    sigma = cm.entries
    determinant = float(np.linalg.det(sigma))
    if determinant < 0.25 - get_settings().PHYSICALITY_TOL:
        raise UnphysicalStateError(
            f"det sigma = {determinant:.6g} is below the vacuum bound 1/4"
        )
    scale = 2 * math.sqrt(max(determinant, 0.25))
    anisotropy = math.hypot(sigma[0, 0] - sigma[1, 1], 2 * sigma[0, 1])
    r = 0.5 * math.asinh(anisotropy / scale)
    degenerate = r < DEGENERATE_SQUEEZING
    psi = 0.0 if degenerate else math.atan2(2 * sigma[0, 1], sigma[0, 0] - sigma[1, 1])
    state = SingleModeState.from_params(
        alpha=complex(x.entries[0], x.entries[1]) / math.sqrt(2),
        r=0.0 if degenerate else r,
        psi=psi,
        n_th=(scale - 1) / 2,
    )
    return StateFit(state=state, psi_degenerate=degenerate)


def bootstrap_ci(
    trace: HomodyneTrace,
    statistic: Statistic = g2_statistic,
    resamples: int | None = None,
    seed: int | None = 0,
    confidence_level: float | None = None,
) -> BootstrapInterval:
    """
    Percentile interval from resampling every phase with replacement. Each
    resample draws from its own Philox stream, so the result depends only on
    the seed. The streams come from a spawn tree separate from the one
    simulate_trace uses.

    Resamples where g2 is undefined are dropped and counted in `degenerate`.
    When more than BOOTSTRAP_MAX_DEGENERATE_FRACTION of them are undefined the
    interval is meaningless and UndefinedG2Error is raised.
    """
    settings = get_settings()
    if resamples is None:
        resamples = settings.BOOTSTRAP_RESAMPLES
    if confidence_level is None:
        confidence_level = settings.CONFIDENCE_LEVEL
    if resamples < settings.MIN_BOOTSTRAP_RESAMPLES:
        raise InvalidParameterError(
            f"at least {settings.MIN_BOOTSTRAP_RESAMPLES} bootstrap resamples are needed"
        )
    grouped = trace.phase_samples()
    thetas = [theta for theta, _ in grouped]
    samples = [values for _, values in grouped]
    used_seed, generators = phase_generators(seed, resamples, stream=BOOTSTRAP_STREAM)
    estimates = np.full(resamples, np.nan)
    for index, generator in enumerate(generators):
        drawn = [
            values[generator.integers(0, values.size, size=values.size)]
            for values in samples
        ]
        try:
            estimates[index] = statistic(thetas, drawn)
        except UndefinedG2Error:
            continue

    finite = estimates[np.isfinite(estimates)]
    degenerate = resamples - finite.size
    allowed = settings.BOOTSTRAP_MAX_DEGENERATE_FRACTION * resamples
    if degenerate > allowed or finite.size < 2:
        raise UndefinedG2Error(
            f"g2 undefined in {degenerate} of {resamples} bootstrap resamples"
        )
    if degenerate:
        logger.warning(
            "g2 undefined in %d of %d bootstrap resamples, interval uses the rest",
            degenerate,
            resamples,
        )
    tail = 100 * (1 - confidence_level) / 2
    low, high = np.percentile(finite, [tail, 100 - tail])
    return BootstrapInterval(
        low=float(low),
        high=float(high),
        std_error=float(np.std(finite, ddof=1)),
        resamples=resamples,
        confidence_level=confidence_level,
        seed=used_seed,
        degenerate=degenerate,
    )


def gaussianity_check(
    trace: HomodyneTrace,
    kurtosis_tol: float | None = None,
    skew_tol: float | None = None,
) -> GaussianityReport:
    """
    Bias-corrected skewness and excess kurtosis per phase, compared with
    tol * sqrt(6/N) and tol * sqrt(24/N). A tolerance of 0 is honored and
    fails every phase with nonzero sample skewness or excess kurtosis.
    """
    settings = get_settings()
    if kurtosis_tol is None:
        kurtosis_tol = settings.GAUSSIANITY_SIGMAS
    if skew_tol is None:
        skew_tol = settings.GAUSSIANITY_SIGMAS
    if kurtosis_tol < 0 or skew_tol < 0:
        raise InvalidParameterError("Gaussianity tolerances must be non-negative")
    grouped = trace.phase_samples()
    for theta, values in grouped:
        if values.size < settings.MIN_SAMPLES_PER_PHASE:
            raise InvalidParameterError(
                f"phase {theta:.6g} has {values.size} samples, at least "
                f"{settings.MIN_SAMPLES_PER_PHASE} are needed for the Gaussianity check"
            )
    phases = []
    for theta, values in grouped:
        count = values.size
        with warnings.catch_warnings():
            # constant samples give nan, which then fails the check
            warnings.simplefilter("ignore", RuntimeWarning)
            skewness = float(stats.skew(values, bias=False))
            excess = float(stats.kurtosis(values, fisher=True, bias=False))
        skew_threshold = skew_tol * math.sqrt(6 / count)
        kurtosis_threshold = kurtosis_tol * math.sqrt(24 / count)
        phases.append(
            PhaseDiagnostics(
                theta=theta,
                n_samples=count,
                skewness=skewness,
                excess_kurtosis=excess,
                skew_threshold=skew_threshold,
                kurtosis_threshold=kurtosis_threshold,
                passed=abs(skewness) <= skew_threshold
                and abs(excess) <= kurtosis_threshold,
            )
        )
    return GaussianityReport(
        phases=phases, kurtosis_sigmas=kurtosis_tol, skew_sigmas=skew_tol
    )


def reconstruct(
    trace: HomodyneTrace,
    resamples: int | None = None,
    seed: int | None = 0,
    kurtosis_tol: float | None = None,
    skew_tol: float | None = None,
    confidence_level: float | None = None,
) -> ReconstructionResult:
    settings = get_settings()
    if confidence_level is None:
        confidence_level = settings.CONFIDENCE_LEVEL
    grouped = trace.phase_samples()
    thetas = [theta for theta, _ in grouped]
    samples = [values for _, values in grouped]
    _pick(thetas, samples, minimum=settings.MIN_SAMPLES_PER_PHASE)

    cm, x = quadrature_moments(thetas, samples)
    physicality = check_physical(cm)
    notes: List[str] = []
    status = ReconstructionStatus.OK
    fitted = None
    if physicality.physical:
        fitted = fit_state_params(cm, x)
    else:
        status = ReconstructionStatus.UNPHYSICAL
        notes.append(
            "reconstructed covariance matrix is unphysical, symplectic eigenvalues "
            f"{physicality.symplectic_eigenvalues}"
        )
        logger.warning(notes[-1])

    diagnostics = gaussianity_check(trace, kurtosis_tol, skew_tol)
    if not diagnostics.passed:
        failed = [phase.theta for phase in diagnostics.phases if not phase.passed]
        notes.append(f"Gaussianity check failed at phases {failed}")
        logger.warning(notes[-1])

    value: float | None = None
    interval: BootstrapInterval | None = None
    try:
        value = _g2_value(cm, x)
    except UndefinedG2Error:
        status = ReconstructionStatus.UNDEFINED
        photons = (np.trace(cm.entries) + x.entries @ x.entries - 1) / 2
        notes.append(
            f"g2 undefined, reconstructed mean photon number {photons:.4g} is not above zero"
        )
        logger.warning(notes[-1])
    if value is not None:
        if value < 0:
            notes.append(f"estimated g2 is negative ({value:.4g})")
            logger.warning(notes[-1])
        try:
            interval = bootstrap_ci(trace, g2_statistic, resamples, seed, confidence_level)
        except UndefinedG2Error as error:
            status = ReconstructionStatus.UNDEFINED
            notes.append(f"{error}, point estimate {value:.4g} discarded")
            logger.warning(notes[-1])
            value = None
    if interval is not None and interval.degenerate:
        notes.append(
            f"{interval.degenerate} of {interval.resamples} bootstrap resamples "
            "had undefined g2"
        )

    g2 = None
    if value is not None and interval is not None:
        g2 = G2Result(
            value=value,
            method=G2Method.ESTIMATED,
            uncertainty=interval.std_error,
            ci_low=interval.low,
            ci_high=interval.high,
            confidence_level=confidence_level,
        )
    return ReconstructionResult(
        cm=cm,
        x=x,
        fitted_params=fitted,
        g2=g2,
        bootstrap=interval,
        diagnostics=diagnostics,
        physicality=physicality,
        status=status,
        warnings=notes,
    )
