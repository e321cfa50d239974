"""
Command-line front end.

Every option can also come from a JSON file given with --config: top-level
keys apply to all commands, keys nested under a command name apply to that
command only. Flags on the command line win.
"""

import math
from contextlib import contextmanager
from itertools import product
from pathlib import Path
from typing import Annotated, Any, Dict, Iterator, List, Optional

import orjson
import typer
from pydantic import ValidationError
from rich.console import Console

from app.enums import ScanMode
from app.estimator import reconstruct
from app.exceptions import InvalidParameterError, NumericalFailure, UndefinedG2Error
from app.g2 import (
    alpha_min_pi,
    alpha_threshold,
    alpha_threshold_two_mode_symmetric,
    g2_reduced_mode,
    g2_single_closed_form,
    g2_single_from_cm,
    g2_two_mode,
    two_mode_threshold,
)
from app.gaussian import cm_single, cm_two_mode, nonclassical_depth
from app.homodyne import read_trace, simulate_trace, write_trace
from app.log_config import configure_logging
from app.oracle import compare_with_closed_form
from app.parsing import parse_angle, parse_assignment, parse_axis
from app.scan import run_scan, write_scan_csv
from app.schemas import (
    CovarianceMatrix,
    FirstMoments,
    PhaseSchedule,
    ScanSpec,
    SingleModeState,
    TwoModeState,
    same_phase,
)

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

cli = typer.Typer(
    name="homodyne-g2",
    help="g2(0) of Gaussian states: closed forms, thresholds, homodyne estimation.",
    no_args_is_help=True,
    pretty_exceptions_enable=False,
)
err_console = Console(stderr=True)

Angle = Annotated[
    float,
    typer.Option(parser=parse_angle, help="Radians, or pi, pi/2, -pi/4, 3pi/4, 2*pi/3."),
]
ThermalPhotons = Annotated[float, typer.Option("--n-th", "--nth", min=0.0)]

# oracle benchmark grid
GRID_ALPHAS = (0.5, 1.5, 3.0)
GRID_SQUEEZING = (0.25, 0.5, 1.0)
GRID_PHASES = (0.0, math.pi / 2, math.pi)
GRID_THERMAL = (0.0, 0.5)


def load_config(path: Path, commands: List[str]) -> Dict[str, Dict[str, Any]]:
    try:
        raw = orjson.loads(path.read_bytes())
    except orjson.JSONDecodeError as error:
        raise typer.BadParameter(f"{path} is not valid JSON: {error}") from error
    if not isinstance(raw, dict):
        raise typer.BadParameter(f"{path} must contain a JSON object")
    shared = {key: value for key, value in raw.items() if key not in commands}
    return {
        command: {**shared, **raw.get(command, {})} for command in commands
    }


@cli.callback()
def main(
    ctx: typer.Context,
    config: Annotated[
        Optional[Path],
        typer.Option(exists=True, dir_okay=False, help="JSON file with option defaults."),
    ] = None,
    verbose: Annotated[bool, typer.Option("--verbose", "-v")] = False,
) -> None:
    configure_logging("DEBUG" if verbose else None)
    if config is not None:
        ctx.default_map = load_config(config, list(ctx.command.commands))


@contextmanager
def reported_errors() -> Iterator[None]:
    try:
        yield
    except NumericalFailure as error:
        err_console.print(f"numerical failure: {error}", style="red", markup=False)
        raise typer.Exit(code=EXIT_NUMERICAL) from error
    except (InvalidParameterError, ValidationError, ValueError, OSError) as error:
        err_console.print(f"error: {error}", style="red", markup=False)
        raise typer.Exit(code=EXIT_VALIDATION) from error


def emit_json(payload: Any, output: Path | None = None) -> None:
    data = orjson.dumps(payload, option=orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY)
    if output is None:
        typer.echo(data.decode())
    else:
        output.write_bytes(data)


def _mode_g2(cm: CovarianceMatrix, x: FirstMoments, mode: int) -> Optional[Dict[str, Any]]:
    # a mode left in vacuum has no g2
    try:
        return g2_reduced_mode(cm, x, mode).model_dump(mode="json")
    except UndefinedG2Error:
        return None


@cli.command("g2")
def cmd_g2(
    alpha: float = 0.0,
    alpha_im: float = 0.0,
    r: Annotated[float, typer.Option(min=0.0)] = 0.0,
    psi: Angle = 0.0,
    n_th: ThermalPhotons = 0.0,
    two_mode: bool = False,
    beta: Optional[float] = None,
    beta_im: float = 0.0,
    n_th1: Annotated[float, typer.Option(min=0.0)] = 0.0,
    n_th2: Annotated[float, typer.Option(min=0.0)] = 0.0,
) -> None:
    """
    g2(0) from the closed form and from the moment pipeline.
    """
    with reported_errors():
        if two_mode:
            beta_value = alpha if beta is None else beta
            state = TwoModeState.from_params(
                alpha=complex(alpha, alpha_im),
                beta=complex(beta_value, beta_im),
                r=r,
                psi=psi,
                n_th1=n_th1,
                n_th2=n_th2,
            )
            cm, x = cm_two_mode(state)
            payload: Dict[str, Any] = {
                "state": state.model_dump(mode="json"),
                "pipeline": g2_two_mode(cm, x).model_dump(mode="json"),
                "modes": [_mode_g2(cm, x, mode) for mode in (0, 1)],
                "symmetric_threshold": None,
            }
            if r > 0 and n_th1 == n_th2:
                payload["symmetric_threshold"] = alpha_threshold_two_mode_symmetric(
                    r, psi, n_th1
                ).model_dump(mode="json")
            emit_json(payload)
            return
        state = SingleModeState.from_params(
            alpha=complex(alpha, alpha_im), r=r, psi=psi, n_th=n_th
        )
        pipeline = g2_single_from_cm(*cm_single(state))
        payload = {
            "state": state.model_dump(mode="json"),
            "closed_form": None,
            "pipeline": pipeline.model_dump(mode="json"),
            "difference": None,
        }
        # the closed form only covers real displacements
        if alpha_im == 0:
            closed_form = g2_single_closed_form(state)
            payload["closed_form"] = closed_form.model_dump(mode="json")
            payload["difference"] = abs(closed_form.value - pipeline.value)
        emit_json(payload)


@cli.command("threshold")
def cmd_threshold(
    r: Annotated[float, typer.Option()],
    psi: Angle = math.pi,
    n_th: ThermalPhotons = 0.0,
    two_mode: Annotated[
        bool,
        typer.Option(
            "--two-mode", "--two-mode-symmetric", help="Threshold of the total photon number."
        ),
    ] = False,
    n_th2: Annotated[
        Optional[float], typer.Option(min=0.0, help="Second-mode thermal photons.")
    ] = None,
    beta_ratio: Annotated[float, typer.Option(min=0.0, help="beta / alpha.")] = 1.0,
) -> None:
    """
    Coherent amplitude above which g2 drops below 1. Two-mode thresholds with
    unequal noise or displacements are found by root finding.
    """
    with reported_errors():
        if two_mode:
            threshold = two_mode_threshold(
                r, psi, n_th, n_th if n_th2 is None else n_th2, beta_ratio
            )
        else:
            threshold = alpha_threshold(r, psi, n_th)
        payload = threshold.model_dump(mode="json")
        payload["nonclassical_depth"] = nonclassical_depth(r, n_th)
        if not two_mode and same_phase(psi, math.pi):
            payload["alpha_min"] = alpha_min_pi(r, n_th)
        emit_json(payload)


@cli.command("scan")
def cmd_scan(
    axis: Annotated[
        List[str], typer.Option(help="name=min:max:steps or name=v1,v2,...")
    ],
    set_: Annotated[
        Optional[List[str]], typer.Option("--set", help="name=value")
    ] = None,
    mode: ScanMode = ScanMode.SINGLE,
    output: Annotated[Optional[Path], typer.Option("--output", "-o")] = None,
) -> None:
    """
    Sweep parameters and write one CSV row per grid point.
    """
    with reported_errors():
        spec = ScanSpec(
            axes=[parse_axis(text) for text in axis],
            fixed=dict(parse_assignment(text) for text in set_ or []),
            mode=mode,
            output=output,
        )
        write_scan_csv(run_scan(spec), spec.output)


@cli.command("simulate")
def cmd_simulate(
    output: Annotated[Path, typer.Option("--output", "-o")],
    alpha: float = 0.0,
    alpha_im: float = 0.0,
    r: Annotated[float, typer.Option(min=0.0)] = 0.0,
    psi: Angle = 0.0,
    n_th: ThermalPhotons = 0.0,
    samples: Annotated[Optional[int], typer.Option(min=1)] = None,
    seed: Annotated[int, typer.Option(min=0)] = 0,
) -> None:
    """
    Simulate a homodyne trace at the four standard phases.
    """
    with reported_errors():
        state = SingleModeState.from_params(
            alpha=complex(alpha, alpha_im), r=r, psi=psi, n_th=n_th
        )
        trace = simulate_trace(state, PhaseSchedule.default(samples), seed)
        sidecar = write_trace(trace, output)
        emit_json(
            {
                "trace": str(output),
                "metadata": str(sidecar),
                "samples": trace.metadata.schedule.total_samples,
                "seed": trace.metadata.seed,
            }
        )


@cli.command("estimate")
def cmd_estimate(
    trace: Annotated[Path, typer.Argument(help="Trace CSV written by `simulate`.")],
    resamples: Annotated[Optional[int], typer.Option(min=1)] = None,
    seed: Annotated[int, typer.Option(min=0)] = 0,
    kurtosis_tol: Optional[float] = None,
    skew_tol: Optional[float] = None,
    confidence: Annotated[Optional[float], typer.Option(min=0.0, max=1.0)] = None,
    output: Annotated[Optional[Path], typer.Option("--output", "-o")] = None,
) -> None:
    """
    Reconstruct the covariance matrix and g2 with a bootstrap interval.
    """
    with reported_errors():
        result = reconstruct(
            read_trace(trace),
            resamples=resamples,
            seed=seed,
            kurtosis_tol=kurtosis_tol,
            skew_tol=skew_tol,
            confidence_level=confidence,
        )
        emit_json(result.model_dump(mode="json"), output)


@cli.command("oracle")
def cmd_oracle(
    dim: Annotated[Optional[int], typer.Option(min=2)] = None,
    grid: Annotated[bool, typer.Option(help="Run the benchmark grid.")] = False,
    alpha: float = 2.0,
    r: Annotated[float, typer.Option(min=0.0)] = 0.5,
    psi: Angle = math.pi,
    n_th: ThermalPhotons = 0.0,
    two_mode: bool = False,
    beta: Optional[float] = None,
    n_th1: Annotated[float, typer.Option(min=0.0)] = 0.0,
    n_th2: Annotated[float, typer.Option(min=0.0)] = 0.0,
    convergence: Annotated[
        bool, typer.Option(help="Also report the change when the truncation doubles.")
    ] = False,
    json_output: Annotated[bool, typer.Option("--json")] = False,
    output: Annotated[Optional[Path], typer.Option("--output", "-o")] = None,
) -> None:
    """
    Compare closed forms with the truncated number-basis reference.
    """
    with reported_errors():
        if two_mode:
            state = TwoModeState.from_params(
                alpha=alpha,
                beta=alpha if beta is None else beta,
                r=r,
                psi=psi,
                n_th1=n_th1,
                n_th2=n_th2,
            )
            rows = [compare_with_closed_form(state, dim, convergence)]
        else:
            if grid:
                points = product(GRID_ALPHAS, GRID_SQUEEZING, GRID_PHASES, GRID_THERMAL)
            else:
                points = iter([(alpha, r, psi, n_th)])
            rows = [
                compare_with_closed_form(
                    SingleModeState.from_params(alpha=a, r=sq, psi=ph, n_th=nt),
                    dim,
                    convergence,
                )
                for a, sq, ph, nt in points
            ]
        if json_output:
            emit_json(rows, output)
        else:
            write_scan_csv(rows, output)


if __name__ == "__main__":
    cli()
