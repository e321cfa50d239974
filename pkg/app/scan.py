"""
Parameter sweeps over single-mode and two-mode states.
"""

import csv
import logging
import math
import sys
from itertools import product
from pathlib import Path
from typing import Any, Dict, Iterable, List, TextIO

from app.enums import ScanMode
from app.exceptions import UndefinedG2Error
from app.g2 import (
    alpha_min_pi,
    alpha_threshold,
    alpha_threshold_two_mode_symmetric,
    g2_single_closed_form,
    g2_two_mode_state,
)
from app.gaussian import nonclassical_depth
from app.schemas import ScanSpec, SingleModeState, TwoModeState, same_phase

logger = logging.getLogger(__name__)

Row = Dict[str, Any]

SINGLE_DEFAULTS = {"alpha": 0.0, "r": 0.0, "psi": 0.0, "n_th": 0.0}
TWO_MODE_DEFAULTS = {"alpha": 0.0, "r": 0.0, "psi": 0.0, "n_th1": 0.0, "n_th2": 0.0}


def _points(spec: ScanSpec) -> Iterable[Dict[str, float]]:
    names = [axis.parameter.value for axis in spec.axes]
    fixed = {parameter.value: value for parameter, value in spec.fixed.items()}
    for combination in product(*(axis.grid() for axis in spec.axes)):
        yield {**fixed, **dict(zip(names, combination))}


def _single_row(point: Dict[str, float]) -> Row:
    params = {**SINGLE_DEFAULTS, **point}
    alpha, r, psi, n_th = params["alpha"], params["r"], params["psi"], params["n_th"]
    row: Row = {
        "alpha": alpha,
        "r": r,
        "psi": psi,
        "n_th": n_th,
        "nonclassical_depth": nonclassical_depth(r, n_th),
        "threshold_exists": None,
        "alpha_th": None,
        "alpha_min": None,
        "g2": None,
    }
    if r > 0:
        threshold = alpha_threshold(r, psi, n_th)
        row["threshold_exists"] = threshold.exists
        row["alpha_th"] = threshold.alpha_th
        if same_phase(psi, math.pi):
            row["alpha_min"] = alpha_min_pi(r, n_th)
    state = SingleModeState.from_params(alpha=alpha, r=r, psi=psi, n_th=n_th)
    try:
        row["g2"] = g2_single_closed_form(state).value
    except UndefinedG2Error:
        pass
    return row


def _two_mode_row(point: Dict[str, float]) -> Row:
    params = {**TWO_MODE_DEFAULTS, **point}
    if "n_th" in params:
        params["n_th1"] = params["n_th2"] = params.pop("n_th")
    # symmetric configuration unless beta is given
    params.setdefault("beta", params["alpha"])
    row: Row = {
        name: params[name]
        for name in ("alpha", "beta", "r", "psi", "n_th1", "n_th2")
    }
    state = TwoModeState.from_params(**row)
    row.update(g2_tm=None, threshold_exists=None, alpha_th=None)
    try:
        row["g2_tm"] = g2_two_mode_state(state).value
    except UndefinedG2Error:
        pass
    if params["r"] > 0 and params["n_th1"] == params["n_th2"]:
        threshold = alpha_threshold_two_mode_symmetric(
            params["r"], params["psi"], params["n_th1"]
        )
        row["threshold_exists"] = threshold.exists
        row["alpha_th"] = threshold.alpha_th
    return row


def run_scan(spec: ScanSpec) -> List[Row]:
    """
    One row per grid point, row-major over the axes (last axis fastest).
    """
    build = _single_row if spec.mode == ScanMode.SINGLE else _two_mode_row
    rows = [build(point) for point in _points(spec)]
    logger.info("scanned %d points (%s)", len(rows), spec.mode.value)
    return rows


def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    return value


def write_scan_csv(rows: List[Row], destination: Path | TextIO | None = None) -> None:
    """
    Writes rows as CSV to a path, an open stream or stdout. Undefined values
    are left blank.
    """
    if not rows:
        return
    if isinstance(destination, (str, Path)):
        with Path(destination).open("w", newline="") as handle:
            write_scan_csv(rows, handle)
        return
    stream = destination or sys.stdout
    writer = csv.DictWriter(stream, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows({key: _cell(value) for key, value in row.items()} for row in rows)
