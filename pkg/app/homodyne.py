"""
Synthetic balanced-homodyne traces and their on-disk format.

A trace is a CSV file with a `theta,value` header and one sample per row,
next to a `<name>.json` file holding the metadata.
"""

import csv
import logging
import math
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np
import orjson
from pydantic import ValidationError

from app.exceptions import InvalidParameterError, TraceFormatError, UnphysicalStateError
from app.gaussian import check_physical, cm_single
from app.schemas import (
    CovarianceMatrix,
    FirstMoments,
    HomodyneTrace,
    PhaseSchedule,
    PhaseSetting,
    SingleModeState,
    TraceMetadata,
)

logger = logging.getLogger(__name__)

TRACE_HEADER = ["theta", "value"]

# spawn keys for the two consumers of a seed
SIMULATION_STREAM = 0
BOOTSTRAP_STREAM = 1


def quadrature_stats(
    cm: CovarianceMatrix, x: FirstMoments, theta: float
) -> Tuple[float, float]:
    """
    Mean and variance of x_theta = cos(theta) q + sin(theta) p.
    """
    if cm.modes != 1 or x.dim != 2:
        raise InvalidParameterError("quadrature statistics need a single-mode state")
    if not check_physical(cm).physical:
        raise UnphysicalStateError("covariance matrix violates the uncertainty relation")
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    sigma = cm.entries
    mean = cos_t * x.entries[0] + sin_t * x.entries[1]
    variance = (
        cos_t**2 * sigma[0, 0] + sin_t**2 * sigma[1, 1] + 2 * sin_t * cos_t * sigma[0, 1]
    )
    return float(mean), float(variance)


def phase_generators(
    seed: int | None, count: int, stream: int = SIMULATION_STREAM
) -> Tuple[int, List[np.random.Generator]]:
    """
    Independent Philox streams spawned from one seed. Different `stream`
    keys give disjoint spawn trees, so simulation and bootstrap draws never
    coincide even when they share a seed. Returns the seed actually used so
    unseeded runs can be replayed.
    """
    if seed is None:
        # fits the 64-bit integers of the JSON metadata
        seed = int(np.random.SeedSequence().entropy) % 2**63
    sequence = np.random.SeedSequence(seed, spawn_key=(stream,))
    generators = [
        np.random.Generator(np.random.Philox(child)) for child in sequence.spawn(count)
    ]
    return seed, generators


def simulate_trace(
    state: SingleModeState,
    schedule: PhaseSchedule | None = None,
    seed: int | None = None,
) -> HomodyneTrace:
    schedule = schedule or PhaseSchedule.default()
    cm, x = cm_single(state)
    used_seed, generators = phase_generators(seed, len(schedule.phases))
    thetas, values = [], []
    for phase, generator in zip(schedule.phases, generators):
        mean, variance = quadrature_stats(cm, x, phase.theta)
        values.append(generator.normal(mean, math.sqrt(variance), size=phase.n_samples))
        thetas.append(np.full(phase.n_samples, phase.theta))
    logger.info(
        "simulated %d samples at %d phases (seed %d)",
        schedule.total_samples,
        len(schedule.phases),
        used_seed,
    )
    metadata = TraceMetadata(seed=used_seed, schedule=schedule, state=state)
    return HomodyneTrace(
        theta=np.concatenate(thetas), values=np.concatenate(values), metadata=metadata
    )


def metadata_path(path: Path) -> Path:
    return Path(path).with_suffix(".json")


def write_trace(trace: HomodyneTrace, path: Path) -> Path:
    """
    Writes the samples to `path` and the metadata next to it. Returns the
    metadata path.
    """
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(TRACE_HEADER)
        # csv writes floats with repr, which round-trips exactly
        writer.writerows(zip(trace.theta.tolist(), trace.values.tolist()))
    sidecar = metadata_path(path)
    sidecar.write_bytes(
        orjson.dumps(trace.metadata.model_dump(mode="json"), option=orjson.OPT_INDENT_2)
    )
    logger.debug("wrote %d samples to %s", trace.values.size, path)
    return sidecar


def _parse_rows(path: Path) -> Tuple[np.ndarray, np.ndarray]:
    thetas: List[float] = []
    values: List[float] = []
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise TraceFormatError("trace file is empty", row=1)
        if [cell.strip() for cell in header] != TRACE_HEADER:
            raise TraceFormatError("expected header 'theta,value'", row=1)
        for row_number, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise TraceFormatError(f"expected 2 columns, found {len(row)}", row=row_number)
            try:
                theta, value = float(row[0]), float(row[1])
            except ValueError:
                raise TraceFormatError("non-numeric entry", row=row_number) from None
            if not (math.isfinite(theta) and math.isfinite(value)):
                raise TraceFormatError("non-finite entry", row=row_number)
            thetas.append(theta)
            values.append(value)
    if not values:
        raise TraceFormatError("trace file has no samples")
    return np.array(thetas), np.array(values)


def schedule_from_phases(thetas: np.ndarray) -> PhaseSchedule:
    """
    Phases in order of first appearance with their sample counts.
    """
    counts: Dict[float, int] = {}
    for theta in thetas.tolist():
        counts[theta] = counts.get(theta, 0) + 1
    return PhaseSchedule(
        phases=[PhaseSetting(theta=theta, n_samples=count) for theta, count in counts.items()]
    )


def read_trace(path: Path) -> HomodyneTrace:
    path = Path(path)
    if not path.exists():
        raise TraceFormatError(f"trace file {path} does not exist")
    thetas, values = _parse_rows(path)
    sidecar = metadata_path(path)
    try:
        if sidecar.exists():
            metadata = TraceMetadata.model_validate(orjson.loads(sidecar.read_bytes()))
        else:
            logger.warning("no metadata next to %s, inferring the phase schedule", path)
            metadata = TraceMetadata(schedule=schedule_from_phases(thetas))
        return HomodyneTrace(theta=thetas, values=values, metadata=metadata)
    except (ValidationError, orjson.JSONDecodeError) as error:
        raise TraceFormatError(f"trace does not match its metadata: {error}") from error
