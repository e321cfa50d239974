from fastapi import APIRouter

from app.g2 import g2_single_closed_form, g2_single_from_cm, g2_two_mode_state
from app.gaussian import check_physical, cm_single, cm_two_mode, nonclassical_depth, purity
from app.routers.errors import domain_errors
from app.schemas import (
    G2Comparison,
    G2Result,
    SingleModeState,
    StateMoments,
    TwoModeState,
)

router = APIRouter(
    prefix="/states",
    tags=["states"],
    responses={400: {"description": "Invalid state parameters"}},
)


@router.post("/single", response_model=StateMoments)
async def describe_single_mode_state(state: SingleModeState) -> StateMoments:
    """
    Covariance matrix, first moments and scalar diagnostics of a displaced
    squeezed thermal state.
    """
    with domain_errors():
        cm, x = cm_single(state)
        return StateMoments(
            cm=cm,
            x=x,
            physicality=check_physical(cm),
            purity=purity(state),
            nonclassical_depth=nonclassical_depth(state.xi.r, state.n_th),
        )


@router.post("/single/g2", response_model=G2Comparison)
async def single_mode_g2(state: SingleModeState) -> G2Comparison:
    """
    Closed-form g2 next to the moment-pipeline value. Requires a real alpha.
    """
    with domain_errors():
        closed_form = g2_single_closed_form(state)
        pipeline = g2_single_from_cm(*cm_single(state))
        return G2Comparison(
            closed_form=closed_form,
            pipeline=pipeline,
            difference=abs(closed_form.value - pipeline.value),
        )


@router.post("/two-mode", response_model=StateMoments)
async def describe_two_mode_state(state: TwoModeState) -> StateMoments:
    with domain_errors():
        cm, x = cm_two_mode(state)
        return StateMoments(
            cm=cm, x=x, physicality=check_physical(cm), purity=purity(state)
        )


@router.post("/two-mode/g2", response_model=G2Result)
async def two_mode_g2(state: TwoModeState) -> G2Result:
    with domain_errors():
        return g2_two_mode_state(state)
