from typing import Annotated

from fastapi import APIRouter, Depends

from app.config import Settings, get_settings
from app.estimator import reconstruct
from app.homodyne import simulate_trace
from app.routers.errors import domain_errors
from app.schemas import (
    HomodyneTrace,
    PhaseSchedule,
    ReconstructionRequest,
    ReconstructionResult,
    SimulationRequest,
    TraceMetadata,
    TraceRecords,
)

router = APIRouter(
    prefix="/traces",
    tags=["traces"],
    responses={400: {"description": "Invalid trace"}},
)


# plain def: sampling and bootstrapping are CPU bound and run in the threadpool
@router.post("/simulate", response_model=TraceRecords)
def simulate_homodyne_trace(request: SimulationRequest) -> TraceRecords:
    """
    Simulated samples at the four standard phases.
    """
    with domain_errors():
        trace = simulate_trace(
            request.state, PhaseSchedule.default(request.samples_per_phase), request.seed
        )
        return TraceRecords(
            theta=trace.theta.tolist(),
            values=trace.values.tolist(),
            schedule=trace.metadata.schedule,
            seed=trace.metadata.seed,
        )


@router.post("/reconstruct", response_model=ReconstructionResult)
def reconstruct_trace(
    request: ReconstructionRequest,
    settings: Annotated[Settings, Depends(get_settings)],
) -> ReconstructionResult:
    """
    Covariance matrix, fitted parameters and g2 with a bootstrap interval.
    """
    with domain_errors():
        records = request.trace
        trace = HomodyneTrace(
            theta=records.theta,
            values=records.values,
            metadata=TraceMetadata(seed=records.seed, schedule=records.schedule),
        )
        return reconstruct(
            trace,
            resamples=request.resamples or settings.BOOTSTRAP_RESAMPLES,
            seed=request.seed,
        )
