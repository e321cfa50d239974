import cmath
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Annotated, Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    WithJsonSchema,
    computed_field,
    field_serializer,
    field_validator,
    model_validator,
)

from app.config import get_settings
from app.enums import (
    G2Method,
    ReconstructionStatus,
    ScanMode,
    ScanParameter,
    ThresholdMethod,
    TruncationStatus,
)

TWO_PI = 2.0 * math.pi
VACUUM_CONVENTION = "vacuum-variance = 1/2"
PHASE_MATCH_TOL = 1e-9

NumberArray = {"type": "array", "items": {"type": "number"}}
Vector = Annotated[np.ndarray, WithJsonSchema(NumberArray)]
Matrix = Annotated[np.ndarray, WithJsonSchema({"type": "array", "items": NumberArray})]


def as_complex(value: Any) -> complex:
    """
    Accepts complex numbers as numbers, "1+2j" strings, [re, im] pairs or
    {"re": .., "im": ..} mappings.
    """
    if isinstance(value, dict):
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    return complex(value)


def same_phase(first: float, second: float, tol: float = PHASE_MATCH_TOL) -> bool:
    difference = (first - second + math.pi) % TWO_PI - math.pi
    return abs(difference) <= tol


def _complex_json(value: complex | None) -> Dict[str, float] | None:
    if value is None:
        return None
    return {"re": value.real, "im": value.imag}


class SqueezingParam(BaseModel):
    """
    Complex squeezing parameter xi = r * exp(i psi).
    """

    r: float = Field(default=0.0, ge=0, allow_inf_nan=False)
    psi: float = Field(default=0.0, allow_inf_nan=False)
    model_config = ConfigDict(frozen=True)

    @field_validator("psi")
    @classmethod
    def normalize_phase(cls, value: float) -> float:
        return value % TWO_PI

    @property
    def xi(self) -> complex:
        return self.r * cmath.exp(1j * self.psi)


class SingleModeState(BaseModel):
    """
    Displaced squeezed thermal state D(alpha) S(xi) nu(n_th) S(xi)^+ D(alpha)^+.
    """

    alpha: complex = 0j
    xi: SqueezingParam = Field(default_factory=SqueezingParam)
    n_th: float = Field(default=0.0, ge=0, allow_inf_nan=False)
    model_config = ConfigDict(frozen=True)

    @field_validator("alpha", mode="before")
    @classmethod
    def parse_alpha(cls, value: Any) -> complex:
        alpha = as_complex(value)
        if not cmath.isfinite(alpha):
            raise ValueError("alpha must be finite")
        return alpha

    @field_serializer("alpha", when_used="json")
    def serialize_alpha(self, alpha: complex) -> Dict[str, float] | None:
        return _complex_json(alpha)

    @classmethod
    def from_params(
        cls,
        alpha: complex = 0.0,
        r: float = 0.0,
        psi: float = 0.0,
        n_th: float = 0.0,
    ) -> "SingleModeState":
        return cls(alpha=alpha, xi=SqueezingParam(r=r, psi=psi), n_th=n_th)


class TwoModeState(BaseModel):
    """
    Two-mode squeezed thermal state, displaced by alpha on mode a and beta on
    mode b.
    """

    alpha: complex = 0j
    beta: complex = 0j
    xi: SqueezingParam = Field(default_factory=SqueezingParam)
    n_th1: float = Field(default=0.0, ge=0, allow_inf_nan=False)
    n_th2: float = Field(default=0.0, ge=0, allow_inf_nan=False)
    model_config = ConfigDict(frozen=True)

    @field_validator("alpha", "beta", mode="before")
    @classmethod
    def parse_amplitude(cls, value: Any) -> complex:
        amplitude = as_complex(value)
        if not cmath.isfinite(amplitude):
            raise ValueError("displacement amplitudes must be finite")
        return amplitude

    @field_serializer("alpha", "beta", when_used="json")
    def serialize_amplitude(self, amplitude: complex) -> Dict[str, float] | None:
        return _complex_json(amplitude)

    @classmethod
    def from_params(
        cls,
        alpha: complex = 0.0,
        beta: complex = 0.0,
        r: float = 0.0,
        psi: float = 0.0,
        n_th1: float = 0.0,
        n_th2: float = 0.0,
    ) -> "TwoModeState":
        return cls(
            alpha=alpha,
            beta=beta,
            xi=SqueezingParam(r=r, psi=psi),
            n_th1=n_th1,
            n_th2=n_th2,
        )


class CovarianceMatrix(BaseModel):
    """
    Symmetric quadrature covariance matrix in (q1, p1[, q2, p2]) order.
    """

    entries: Matrix
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("entries", mode="before")
    @classmethod
    def validate_entries(cls, value: Any) -> np.ndarray:
        matrix = np.array(value, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("covariance matrix must be square")
        if matrix.shape[0] not in (2, 4):
            raise ValueError("covariance matrix must be 2x2 or 4x4")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("covariance matrix entries must be finite")
        scale = max(1.0, float(np.max(np.abs(matrix))))
        if np.max(np.abs(matrix - matrix.T)) > get_settings().SYMMETRY_TOL * scale:
            raise ValueError("covariance matrix must be symmetric")
        matrix = 0.5 * (matrix + matrix.T)
        matrix.setflags(write=False)
        return matrix

    @field_serializer("entries")
    def serialize_entries(self, entries: np.ndarray) -> List[List[float]]:
        return entries.tolist()

    @computed_field
    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @property
    def modes(self) -> int:
        return self.dim // 2

    @classmethod
    def vacuum(cls, modes: int = 1) -> "CovarianceMatrix":
        return cls(entries=0.5 * np.eye(2 * modes))


class FirstMoments(BaseModel):
    """
    Quadrature means (<q1>, <p1>[, <q2>, <p2>]).
    """

    entries: Vector
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("entries", mode="before")
    @classmethod
    def validate_entries(cls, value: Any) -> np.ndarray:
        vector = np.array(value, dtype=float)
        if vector.ndim != 1 or vector.shape[0] not in (2, 4):
            raise ValueError("first moments must have 2 or 4 entries")
        if not np.all(np.isfinite(vector)):
            raise ValueError("first moments must be finite")
        vector.setflags(write=False)
        return vector

    @field_serializer("entries")
    def serialize_entries(self, entries: np.ndarray) -> List[float]:
        return entries.tolist()

    @computed_field
    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @classmethod
    def zero(cls, modes: int = 1) -> "FirstMoments":
        return cls(entries=np.zeros(2 * modes))


class PhysicalityReport(BaseModel):
    physical: bool
    symplectic_eigenvalues: List[float]


class ChiCoefficients(BaseModel):
    """
    Coefficients of the Gaussian characteristic function in complex notation.
    Mode-2 and cross-mode coefficients are absent for single-mode states.
    """

    A_coef: float
    C_coef: complex
    U_coef: complex
    B_coef: float | None = None
    D_coef: complex | None = None
    E_coef: complex | None = None
    F_coef: complex | None = None
    V_coef: complex | None = None
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_coefficients(self) -> "ChiCoefficients":
        second_mode = (self.B_coef, self.D_coef, self.E_coef, self.F_coef, self.V_coef)
        given = [value is not None for value in second_mode]
        if any(given) and not all(given):
            raise ValueError("two-mode coefficients must be given together")
        if self.A_coef < 0 or (self.B_coef is not None and self.B_coef < 0):
            raise ValueError("A and B coefficients must be non-negative")
        return self

    @property
    def modes(self) -> int:
        return 1 if self.B_coef is None else 2


class SymmetricMoments(BaseModel):
    """
    Expectations of products of symmetrically ordered [(a^+)^h a^h]_s, keyed
    by the per-mode order tuple.
    """

    modes: int = Field(ge=1, le=2)
    values: Dict[Tuple[int, ...], float]
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_orders(self) -> "SymmetricMoments":
        for orders, value in self.values.items():
            if len(orders) != self.modes or any(order < 0 for order in orders):
                raise ValueError(f"invalid order tuple {orders}")
            if sum(orders) > 4:
                raise ValueError("symmetric moments are tracked up to total order 4")
            if not math.isfinite(value):
                raise ValueError(f"moment {orders} is not finite")
        zero = (0,) * self.modes
        if abs(self.values.get(zero, math.nan) - 1.0) > 1e-12:
            raise ValueError("the order-zero moment must equal 1")
        return self


class G2Result(BaseModel):
    """
    Zero-delay second-order correlation value and where it came from.
    """

    value: float
    method: G2Method
    uncertainty: float | None = Field(default=None, ge=0)
    ci_low: float | None = None
    ci_high: float | None = None
    confidence_level: float | None = Field(default=None, gt=0, lt=1)
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_uncertainty(self) -> "G2Result":
        statistics = (self.uncertainty, self.ci_low, self.ci_high, self.confidence_level)
        if self.method == G2Method.ESTIMATED:
            if any(field is None for field in statistics):
                raise ValueError(
                    "estimated g2 requires an uncertainty and a confidence interval"
                )
            if self.ci_low > self.ci_high:  # type: ignore[operator]
                raise ValueError("confidence interval bounds are out of order")
        elif any(field is not None for field in statistics):
            raise ValueError("uncertainties are only reported for estimated g2")
        return self


class ThresholdResult(BaseModel):
    """
    Coherent amplitude above which g2 < 1, when it exists.
    """

    exists: bool
    alpha_th: float | None = Field(default=None, gt=0)
    denominator: float | None = None
    method: ThresholdMethod = ThresholdMethod.CLOSED_FORM
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_existence(self) -> "ThresholdResult":
        if self.exists != (self.alpha_th is not None):
            raise ValueError("alpha_th must be present exactly when the threshold exists")
        if self.method == ThresholdMethod.CLOSED_FORM:
            if self.denominator is None:
                raise ValueError("closed-form thresholds report their denominator")
            positive = self.denominator > get_settings().DENOMINATOR_EPS
            if positive != self.exists:
                raise ValueError("threshold exists only for a positive denominator")
        return self


class PhaseSetting(BaseModel):
    theta: float = Field(allow_inf_nan=False)
    n_samples: int = Field(ge=1)
    model_config = ConfigDict(frozen=True)


class PhaseSchedule(BaseModel):
    """
    Ordered local-oscillator phases and the number of samples taken at each.
    """

    phases: List[PhaseSetting] = Field(min_length=1)
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_distinct(self) -> "PhaseSchedule":
        thetas = [phase.theta for phase in self.phases]
        for index, theta in enumerate(thetas):
            if any(same_phase(theta, other) for other in thetas[index + 1 :]):
                raise ValueError(f"phase {theta} appears more than once")
        return self

    @classmethod
    def default(cls, n_samples: int | None = None) -> "PhaseSchedule":
        """
        q, p and the two diagonal quadratures needed for sigma_qp.
        """
        count = n_samples or get_settings().SAMPLES_PER_PHASE
        return cls(
            phases=[
                PhaseSetting(theta=theta, n_samples=count)
                for theta in (0.0, math.pi / 2, math.pi / 4, -math.pi / 4)
            ]
        )

    @property
    def thetas(self) -> List[float]:
        return [phase.theta for phase in self.phases]

    @property
    def total_samples(self) -> int:
        return sum(phase.n_samples for phase in self.phases)


class TraceMetadata(BaseModel):
    seed: int | None = Field(default=None, ge=0)
    schedule: PhaseSchedule
    rng: str = "Philox"
    convention: str = VACUUM_CONVENTION
    created_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    state: Optional[SingleModeState] = None
    # Reserved for a detector model; no loss is simulated.
    efficiency: float | None = None

    @field_validator("efficiency")
    @classmethod
    def reject_efficiency(cls, value: float | None) -> float | None:
        if value is not None:
            raise ValueError("detection efficiency is not modelled")
        return value


class HomodyneTrace(BaseModel):
    """
    Phase-tagged quadrature samples, stored as two parallel arrays.
    """

    theta: Vector
    values: Vector
    metadata: TraceMetadata
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("theta", "values", mode="before")
    @classmethod
    def validate_array(cls, value: Any) -> np.ndarray:
        array = np.array(value, dtype=float)
        if array.ndim != 1:
            raise ValueError("trace columns must be one-dimensional")
        if not np.all(np.isfinite(array)):
            raise ValueError("trace columns must be finite")
        array.setflags(write=False)
        return array

    @field_serializer("theta", "values")
    def serialize_array(self, array: np.ndarray) -> List[float]:
        return array.tolist()

    @model_validator(mode="after")
    def check_schedule(self) -> "HomodyneTrace":
        if self.theta.shape != self.values.shape:
            raise ValueError("theta and values must have the same length")
        matched = np.zeros(self.theta.shape, dtype=bool)
        for phase in self.metadata.schedule.phases:
            mask = self._phase_mask(phase.theta)
            count = int(np.count_nonzero(mask))
            if count != phase.n_samples:
                raise ValueError(
                    f"phase {phase.theta} has {count} samples, "
                    f"schedule expects {phase.n_samples}"
                )
            matched |= mask
        if not np.all(matched):
            stray = float(self.theta[~matched][0])
            raise ValueError(f"phase {stray} is not in the schedule")
        return self

    def _phase_mask(self, theta: float) -> np.ndarray:
        difference = (self.theta - theta + math.pi) % TWO_PI - math.pi
        return np.abs(difference) <= PHASE_MATCH_TOL

    def samples_at(self, theta: float) -> np.ndarray:
        return self.values[self._phase_mask(theta)]

    def phase_samples(self) -> List[Tuple[float, np.ndarray]]:
        """
        Samples grouped by phase, in schedule order.
        """
        return [
            (phase.theta, self.samples_at(phase.theta))
            for phase in self.metadata.schedule.phases
        ]


class PhaseDiagnostics(BaseModel):
    theta: float
    n_samples: int
    skewness: float
    excess_kurtosis: float
    skew_threshold: float
    kurtosis_threshold: float
    passed: bool


class GaussianityReport(BaseModel):
    phases: List[PhaseDiagnostics]
    kurtosis_sigmas: float
    skew_sigmas: float

    @computed_field
    @property
    def passed(self) -> bool:
        return all(phase.passed for phase in self.phases)


class BootstrapInterval(BaseModel):
    low: float
    high: float
    std_error: float = Field(ge=0)
    resamples: int
    confidence_level: float
    seed: int | None = None
    method: str = "percentile"
    # resamples whose statistic was undefined and left out of the interval
    degenerate: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def check_order(self) -> "BootstrapInterval":
        if self.low > self.high:
            raise ValueError("confidence interval bounds are out of order")
        return self


class StateFit(BaseModel):
    state: SingleModeState
    psi_degenerate: bool = False


class ReconstructionResult(BaseModel):
    cm: CovarianceMatrix
    x: FirstMoments
    fitted_params: Optional[StateFit] = None
    g2: Optional[G2Result] = None
    bootstrap: Optional[BootstrapInterval] = None
    diagnostics: GaussianityReport
    physicality: PhysicalityReport
    status: ReconstructionStatus = ReconstructionStatus.OK
    warnings: List[str] = []
    convention: str = VACUUM_CONVENTION


class TruncatedState(BaseModel):
    """
    Truncated number-basis density operator stored as a weighted mixture of
    pure components, rho = sum_k w_k |psi_k><psi_k|.
    """

    dims: Tuple[int, ...]
    components: np.ndarray
    weights: np.ndarray
    working_dim: int
    tail_mass: float = Field(ge=0)
    unitarity_defect: float = Field(ge=0)
    status: TruncationStatus = TruncationStatus.OK
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def check_shapes(self) -> "TruncatedState":
        if len(self.dims) not in (1, 2) or any(dim < 2 for dim in self.dims):
            raise ValueError("truncated states have one or two modes of dimension >= 2")
        size = int(np.prod(self.dims))
        if self.components.ndim != 2 or self.components.shape[1] != size:
            raise ValueError("components must have shape (K, prod(dims))")
        if self.weights.shape != (self.components.shape[0],):
            raise ValueError("one weight per component is required")
        if np.any(self.weights < 0):
            raise ValueError("mixture weights must be non-negative")
        return self

    @property
    def modes(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.dims[0]

    @property
    def matrix(self) -> np.ndarray:
        weighted = self.components.T * self.weights
        return weighted @ self.components.conj()

    @property
    def trace(self) -> float:
        norms = np.sum(np.abs(self.components) ** 2, axis=1)
        return float(np.dot(self.weights, norms))


class ScanAxis(BaseModel):
    """
    One swept parameter: an inclusive linear grid or an explicit list.
    """

    parameter: ScanParameter
    start: float | None = None
    stop: float | None = None
    steps: int | None = None
    values: List[float] | None = None

    @model_validator(mode="after")
    def check_range(self) -> "ScanAxis":
        if self.values is not None:
            if not self.values:
                raise ValueError(f"{self.parameter.value}: empty value list")
            return self
        if self.start is None or self.stop is None or self.steps is None:
            raise ValueError(
                f"{self.parameter.value}: give either values or start, stop and steps"
            )
        if self.steps < 2:
            raise ValueError(f"{self.parameter.value}: steps must be at least 2")
        if not self.start < self.stop:
            raise ValueError(f"{self.parameter.value}: min must be below max")
        return self

    def grid(self) -> List[float]:
        if self.values is not None:
            return list(self.values)
        return np.linspace(self.start, self.stop, self.steps).tolist()


SINGLE_MODE_PARAMETERS = {
    ScanParameter.ALPHA,
    ScanParameter.R,
    ScanParameter.PSI,
    ScanParameter.N_TH,
}


class ScanSpec(BaseModel):
    axes: List[ScanAxis] = Field(min_length=1)
    fixed: Dict[ScanParameter, float] = {}
    mode: ScanMode = ScanMode.SINGLE
    output: Path | None = None

    @model_validator(mode="after")
    def check_parameters(self) -> "ScanSpec":
        swept = [axis.parameter for axis in self.axes]
        if len(set(swept)) != len(swept):
            raise ValueError("each parameter can be swept only once")
        overlap = set(swept) & set(self.fixed)
        if overlap:
            names = ", ".join(sorted(parameter.value for parameter in overlap))
            raise ValueError(f"parameters both swept and fixed: {names}")
        used = set(swept) | set(self.fixed)
        if self.mode == ScanMode.SINGLE and not used <= SINGLE_MODE_PARAMETERS:
            raise ValueError("single-mode scans take alpha, r, psi and n_th only")
        if self.mode == ScanMode.TWO_MODE and ScanParameter.N_TH in used:
            if used & {ScanParameter.N_TH1, ScanParameter.N_TH2}:
                raise ValueError("use either n_th or n_th1/n_th2 in a two-mode scan")
        return self


class G2Comparison(BaseModel):
    closed_form: G2Result
    pipeline: G2Result
    difference: float


class StateMoments(BaseModel):
    cm: CovarianceMatrix
    x: FirstMoments
    physicality: PhysicalityReport
    purity: float | None = None
    nonclassical_depth: float | None = None


class AlphaMinimum(BaseModel):
    alpha_min: float | None = None
    g2_min: float | None = None


class SimulationRequest(BaseModel):
    state: SingleModeState
    samples_per_phase: int = Field(default=10_000, ge=1, le=1_000_000)
    seed: int = Field(default=0, ge=0)


class TraceRecords(BaseModel):
    theta: List[float]
    values: List[float]
    schedule: PhaseSchedule
    seed: int | None = None


class ReconstructionRequest(BaseModel):
    trace: TraceRecords
    resamples: int | None = Field(default=None, ge=1)
    seed: int = Field(default=0, ge=0)
