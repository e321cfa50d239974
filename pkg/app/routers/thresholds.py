import math
from typing import Annotated, Optional

from fastapi import APIRouter, Query

from app.g2 import (
    alpha_min_pi,
    alpha_threshold,
    g2_single_closed_form,
    two_mode_threshold,
)
from app.routers.errors import domain_errors
from app.schemas import AlphaMinimum, SingleModeState, ThresholdResult

router = APIRouter(
    prefix="/thresholds",
    tags=["thresholds"],
    responses={400: {"description": "Invalid threshold parameters"}},
)

Squeezing = Annotated[float, Query(title="Squeezing amplitude r, must be positive.")]
Phase = Annotated[float, Query(title="Squeezing phase psi in radians.")]
Thermal = Annotated[float, Query(title="Mean thermal photon number.")]


@router.get("/single", response_model=ThresholdResult)
async def get_single_mode_threshold(
    r: Squeezing, psi: Phase = math.pi, n_th: Thermal = 0.0
) -> ThresholdResult:
    """
    Amplitude above which a displaced squeezed thermal state is antibunched.
    """
    with domain_errors():
        return alpha_threshold(r, psi, n_th)


@router.get("/single/minimum", response_model=AlphaMinimum)
async def get_single_mode_minimum(r: Squeezing, n_th: Thermal = 0.0) -> AlphaMinimum:
    """
    Amplitude of minimal g2 under amplitude squeezing.
    """
    with domain_errors():
        alpha_min = alpha_min_pi(r, n_th)
        if alpha_min is None:
            return AlphaMinimum()
        state = SingleModeState.from_params(alpha=alpha_min, r=r, psi=math.pi, n_th=n_th)
        return AlphaMinimum(
            alpha_min=alpha_min, g2_min=g2_single_closed_form(state).value
        )


@router.get("/two-mode", response_model=ThresholdResult)
def get_two_mode_threshold(
    r: Squeezing,
    psi: Phase = math.pi,
    n_th: Thermal = 0.0,
    n_th2: Annotated[
        Optional[float], Query(title="Thermal photons of the second mode, defaults to n_th.")
    ] = None,
    beta_ratio: Annotated[
        float, Query(ge=0, title="Displacement ratio beta / alpha.")
    ] = 1.0,
) -> ThresholdResult:
    """
    Two-mode threshold along beta = beta_ratio * alpha. The symmetric case has
    a closed form, any other is solved numerically.
    """
    with domain_errors():
        return two_mode_threshold(
            r, psi, n_th, n_th if n_th2 is None else n_th2, beta_ratio
        )
