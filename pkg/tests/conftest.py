import math
from pathlib import Path
from typing import Dict, List

import numpy as np
import pytest
from fastapi.testclient import TestClient
from typer.testing import CliRunner

from app.main import app
from app.schemas import (
    HomodyneTrace,
    PhaseSchedule,
    PhaseSetting,
    SingleModeState,
    TraceMetadata,
    TwoModeState,
)

REFERENCE_STATE = dict(alpha=2.0, r=0.5, psi=math.pi, n_th=0.14)


@pytest.fixture(scope="function")
def client():
    yield TestClient(app)

    app.dependency_overrides.clear()


@pytest.fixture(scope="function")
def runner() -> CliRunner:
    return CliRunner()


def single_state(
    alpha: complex = 0.0, r: float = 0.0, psi: float = 0.0, n_th: float = 0.0
) -> SingleModeState:
    return SingleModeState.from_params(alpha=alpha, r=r, psi=psi, n_th=n_th)


def two_mode_state(
    alpha: complex = 0.0,
    beta: complex = 0.0,
    r: float = 0.0,
    psi: float = 0.0,
    n_th1: float = 0.0,
    n_th2: float = 0.0,
) -> TwoModeState:
    return TwoModeState.from_params(
        alpha=alpha, beta=beta, r=r, psi=psi, n_th1=n_th1, n_th2=n_th2
    )


def benchmark_states() -> Dict[str, SingleModeState]:
    """
    Coherent, thermal, squeezed vacuum, amplitude- and phase-squeezed
    displaced, and squeezed thermal states.
    """
    return {
        "coherent": single_state(alpha=2.0),
        "thermal": single_state(n_th=0.5),
        "squeezed_vacuum": single_state(r=0.5),
        "amplitude_squeezed": single_state(**REFERENCE_STATE),
        "phase_squeezed": single_state(alpha=2.0, r=0.46, psi=0.0, n_th=0.16),
        "squeezed_thermal": single_state(alpha=1.0, r=0.3, psi=math.pi / 3, n_th=0.2),
    }


def constant_trace(
    values_by_phase: Dict[float, float], n_samples: int = 200
) -> HomodyneTrace:
    """
    A degenerate trace where every sample at a phase has the same value.
    """
    schedule = PhaseSchedule(
        phases=[
            PhaseSetting(theta=theta, n_samples=n_samples) for theta in values_by_phase
        ]
    )
    thetas: List[float] = []
    values: List[float] = []
    for theta, value in values_by_phase.items():
        thetas += [theta] * n_samples
        values += [value] * n_samples
    return HomodyneTrace(
        theta=thetas, values=values, metadata=TraceMetadata(schedule=schedule)
    )


def write_rows(path: Path, rows: List[str]) -> Path:
    path.write_text("\n".join(rows) + "\n")
    return path


def relative_gap(first: float, second: float) -> float:
    return abs(first - second) / max(1.0, abs(second))


def as_array(values) -> np.ndarray:
    return np.asarray(values, dtype=float)
