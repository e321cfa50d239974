import math

import numpy as np
import orjson
import pytest
from pydantic import ValidationError

from app.enums import (
    G2Method,
    ReconstructionStatus,
    ScanMode,
    ScanParameter,
    ThresholdMethod,
    TruncationStatus,
)
from app.schemas import (
    ChiCoefficients,
    CovarianceMatrix,
    FirstMoments,
    G2Result,
    HomodyneTrace,
    PhaseSchedule,
    PhaseSetting,
    ScanAxis,
    ScanSpec,
    SingleModeState,
    SqueezingParam,
    SymmetricMoments,
    ThresholdResult,
    TraceMetadata,
    as_complex,
    same_phase,
)

from .conftest import constant_trace


@pytest.mark.parametrize(
    "value, expected",
    [
        (2, 2 + 0j),
        ("1+2j", 1 + 2j),
        ("1 - 0.5j", 1 - 0.5j),
        ([0.5, -1.0], 0.5 - 1j),
        ({"re": 1.5, "im": 0.25}, 1.5 + 0.25j),
        ({"re": 3}, 3 + 0j),
    ],
)
def test_as_complex_accepts_common_spellings(value, expected):
    """
    Tests complex amplitudes parse from numbers, strings, pairs and mappings.
    """
    assert as_complex(value) == expected


def test_same_phase_wraps_modulo_two_pi():
    """
    Tests phases compare modulo 2 pi.
    """
    assert same_phase(-math.pi / 4, 7 * math.pi / 4)
    assert same_phase(0.0, 2 * math.pi)
    assert not same_phase(0.0, math.pi)


def test_squeezing_phase_is_normalized():
    """
    Tests psi is reduced into [0, 2 pi) and xi is built from r and psi.
    """
    squeezing = SqueezingParam(r=0.5, psi=-math.pi / 2)

    assert squeezing.psi == pytest.approx(3 * math.pi / 2)
    assert squeezing.xi == pytest.approx(-0.5j)


@pytest.mark.parametrize(
    "fields",
    [
        {"r": -0.1},
        {"r": math.inf},
        {"psi": math.nan},
    ],
)
def test_squeezing_rejects_invalid_values(fields):
    """
    Tests negative or non-finite squeezing parameters are rejected.
    """
    with pytest.raises(ValidationError):
        SqueezingParam(**fields)


def test_single_mode_state_parses_and_serializes_alpha():
    """
    Tests alpha accepts a {re, im} mapping and serializes back to one in JSON.
    """
    state = SingleModeState.model_validate(
        {"alpha": {"re": 1.0, "im": -2.0}, "xi": {"r": 0.3, "psi": 1.0}, "n_th": 0.1}
    )

    assert state.alpha == 1 - 2j
    dumped = state.model_dump(mode="json")
    assert dumped["alpha"] == {"re": 1.0, "im": -2.0}
    assert dumped["xi"]["r"] == 0.3


def test_single_mode_state_rejects_negative_thermal_photons():
    """
    Tests n_th must be non-negative.
    """
    with pytest.raises(ValidationError) as excinfo:
        SingleModeState.from_params(alpha=1.0, n_th=-0.1)
    assert "n_th" in str(excinfo.value)


def test_single_mode_state_rejects_infinite_alpha():
    """
    Tests a non-finite displacement is rejected.
    """
    with pytest.raises(ValidationError):
        SingleModeState(alpha=complex(math.inf, 0))


def test_covariance_matrix_is_symmetrized_and_read_only():
    """
    Tests entries are symmetrized within tolerance and frozen.
    """
    cm = CovarianceMatrix(entries=[[1.0, 0.2], [0.2 + 1e-14, 2.0]])

    assert cm.dim == 2
    assert cm.modes == 1
    assert cm.entries[0, 1] == cm.entries[1, 0]
    with pytest.raises(ValueError):
        cm.entries[0, 0] = 5.0


@pytest.mark.parametrize(
    "entries, message",
    [
        ([[1.0, 0.2], [0.3, 1.0]], "symmetric"),
        (np.eye(3), "2x2 or 4x4"),
        ([1.0, 2.0], "square"),
        ([[math.nan, 0.0], [0.0, 1.0]], "finite"),
    ],
)
def test_covariance_matrix_rejects_bad_entries(entries, message):
    """
    Tests malformed covariance matrices are refused with a clear message.
    """
    with pytest.raises(ValidationError) as excinfo:
        CovarianceMatrix(entries=entries)
    assert message in str(excinfo.value)


def test_vacuum_and_zero_helpers():
    """
    Tests the vacuum covariance matrix is I/2 and zero means have the right
    dimension.
    """
    assert np.allclose(CovarianceMatrix.vacuum(2).entries, 0.5 * np.eye(4))
    assert FirstMoments.zero(2).dim == 4
    assert CovarianceMatrix.vacuum().model_dump()["entries"] == [[0.5, 0.0], [0.0, 0.5]]


def test_chi_coefficients_require_complete_two_mode_set():
    """
    Tests mode-2 coefficients must be given together.
    """
    with pytest.raises(ValidationError) as excinfo:
        ChiCoefficients(A_coef=0.5, C_coef=0j, U_coef=1 + 0j, B_coef=0.5)
    assert "together" in str(excinfo.value)


def test_chi_coefficients_require_non_negative_diagonal():
    """
    Tests A must be non-negative.
    """
    ChiCoefficients(A_coef=0.0, C_coef=0j, U_coef=0j)

    with pytest.raises(ValidationError):
        ChiCoefficients(A_coef=-0.1, C_coef=0j, U_coef=0j)


def test_symmetric_moments_require_unit_zero_order():
    """
    Tests the order-zero moment must be present and equal to one.
    """
    SymmetricMoments(modes=1, values={(0,): 1.0, (1,): 0.5})

    with pytest.raises(ValidationError):
        SymmetricMoments(modes=1, values={(1,): 0.5})
    with pytest.raises(ValidationError):
        SymmetricMoments(modes=1, values={(0,): 1.0, (5,): 1.0})
    with pytest.raises(ValidationError):
        SymmetricMoments(modes=2, values={(0,): 1.0})


def test_g2_result_statistics_only_for_estimates():
    """
    Tests uncertainties are required for estimated g2 and forbidden for exact
    values.
    """
    G2Result(value=0.9, method=G2Method.CLOSED_FORM)
    G2Result(
        value=0.9,
        method=G2Method.ESTIMATED,
        uncertainty=0.01,
        ci_low=0.88,
        ci_high=0.92,
        confidence_level=0.95,
    )

    with pytest.raises(ValidationError):
        G2Result(value=0.9, method=G2Method.ESTIMATED)
    with pytest.raises(ValidationError):
        G2Result(value=0.9, method=G2Method.ORACLE, uncertainty=0.01)
    with pytest.raises(ValidationError):
        G2Result(
            value=0.9,
            method=G2Method.ESTIMATED,
            uncertainty=0.01,
            ci_low=0.95,
            ci_high=0.92,
            confidence_level=0.95,
        )


def test_threshold_result_consistency():
    """
    Tests existence matches the presence of alpha_th and the denominator sign.
    """
    ThresholdResult(exists=True, alpha_th=1.2, denominator=0.5)
    ThresholdResult(exists=False, denominator=-0.1)
    ThresholdResult(exists=True, alpha_th=1.2, method=ThresholdMethod.ROOT_FINDING)

    with pytest.raises(ValidationError):
        ThresholdResult(exists=True, denominator=0.5)
    with pytest.raises(ValidationError):
        ThresholdResult(exists=True, alpha_th=1.2, denominator=-0.5)
    with pytest.raises(ValidationError):
        ThresholdResult(exists=False, denominator=0.5)


def test_default_schedule_covers_four_phases():
    """
    Tests the default schedule measures q, p and both diagonals.
    """
    schedule = PhaseSchedule.default(100)

    assert schedule.thetas == pytest.approx([0, math.pi / 2, math.pi / 4, -math.pi / 4])
    assert schedule.total_samples == 400


def test_schedule_rejects_repeated_phase():
    """
    Tests phases equal modulo 2 pi are rejected.
    """
    with pytest.raises(ValidationError) as excinfo:
        PhaseSchedule(
            phases=[
                PhaseSetting(theta=0.0, n_samples=10),
                PhaseSetting(theta=2 * math.pi, n_samples=10),
            ]
        )
    assert "more than once" in str(excinfo.value)


def test_trace_metadata_rejects_efficiency():
    """
    Tests detector efficiency is refused since loss is not modelled.
    """
    with pytest.raises(ValidationError):
        TraceMetadata(schedule=PhaseSchedule.default(10), efficiency=0.9)


def test_trace_groups_samples_by_phase():
    """
    Tests samples are grouped in schedule order.
    """
    trace = constant_trace({0.0: 1.0, math.pi / 2: 2.0}, n_samples=5)

    grouped = trace.phase_samples()

    assert [theta for theta, _ in grouped] == [0.0, math.pi / 2]
    assert np.all(grouped[1][1] == 2.0)
    assert trace.samples_at(2 * math.pi).shape == (5,)


def test_trace_rejects_count_mismatch():
    """
    Tests the schedule counts must match the samples.
    """
    schedule = PhaseSchedule(phases=[PhaseSetting(theta=0.0, n_samples=3)])

    with pytest.raises(ValidationError) as excinfo:
        HomodyneTrace(
            theta=[0.0, 0.0],
            values=[1.0, 2.0],
            metadata=TraceMetadata(schedule=schedule),
        )
    assert "schedule expects 3" in str(excinfo.value)


def test_scan_axis_grid_and_validation():
    """
    Tests linear grids are inclusive and malformed ranges are refused.
    """
    axis = ScanAxis(parameter=ScanParameter.ALPHA, start=0.0, stop=1.0, steps=5)

    assert axis.grid() == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])
    with pytest.raises(ValidationError):
        ScanAxis(parameter=ScanParameter.R, start=1.0, stop=0.0, steps=5)
    with pytest.raises(ValidationError):
        ScanAxis(parameter=ScanParameter.R, start=0.0, stop=1.0, steps=1)
    with pytest.raises(ValidationError):
        ScanAxis(parameter=ScanParameter.R)


def test_scan_spec_rules():
    """
    Tests duplicate axes, swept-and-fixed parameters and mode mismatches.
    """
    alpha = ScanAxis(parameter=ScanParameter.ALPHA, values=[1.0, 2.0])

    with pytest.raises(ValidationError):
        ScanSpec(axes=[alpha, alpha])
    with pytest.raises(ValidationError) as excinfo:
        ScanSpec(axes=[alpha], fixed={ScanParameter.ALPHA: 1.0})
    assert "both swept and fixed" in str(excinfo.value)
    with pytest.raises(ValidationError):
        ScanSpec(axes=[alpha], fixed={ScanParameter.BETA: 1.0})
    with pytest.raises(ValidationError):
        ScanSpec(
            axes=[alpha],
            fixed={ScanParameter.N_TH: 0.1, ScanParameter.N_TH1: 0.1},
            mode=ScanMode.TWO_MODE,
        )


@pytest.mark.parametrize(
    "member, text",
    [
        (G2Method.ESTIMATED, "estimated"),
        (ThresholdMethod.ROOT_FINDING, "root_finding"),
        (ReconstructionStatus.UNDEFINED, "undefined"),
        (TruncationStatus.WARNING, "warning"),
        (ScanMode.TWO_MODE, "two_mode"),
    ],
)
def test_enums_compare_and_serialize_as_strings(member, text):
    """
    Tests enum members equal their values and encode as plain strings.
    """
    assert member == text
    assert orjson.loads(orjson.dumps({"value": member})) == {"value": text}
