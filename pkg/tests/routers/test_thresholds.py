import math

import pytest

from app.g2 import solve_two_mode_threshold
from app.routers.thresholds import get_single_mode_threshold


def test_single_mode_threshold(client):
    """
    Tests the amplitude-squeezed threshold with thermal noise.
    """
    response = client.get("/api/v1/thresholds/single", params={"r": 0.5, "n_th": 0.14})

    assert response.status_code == 200
    threshold = response.json()
    assert threshold["exists"] is True
    assert threshold["alpha_th"] == pytest.approx(1.2322, abs=1e-4)
    assert threshold["denominator"] == pytest.approx(0.52912, abs=1e-5)
    assert threshold["method"] == "closed_form"


def test_single_mode_threshold_absent(client):
    """
    Tests psi = 0 has no threshold.
    """
    response = client.get("/api/v1/thresholds/single", params={"r": 0.5, "psi": 0.0})

    assert response.status_code == 200
    assert response.json()["exists"] is False
    assert response.json()["alpha_th"] is None


def test_single_mode_threshold_without_squeezing(client):
    """
    Tests r = 0 is a bad request.
    """
    response = client.get("/api/v1/thresholds/single", params={"r": 0.0})

    assert response.status_code == 400
    assert "no squeezing" in response.json()["detail"]


def test_single_mode_threshold_requires_r(client):
    """
    Tests r is a required query parameter.
    """
    response = client.get("/api/v1/thresholds/single")

    assert response.status_code == 422


def test_single_mode_minimum(client):
    """
    Tests the amplitude of minimal g2 and the g2 there.
    """
    response = client.get(
        "/api/v1/thresholds/single/minimum", params={"r": 0.5, "n_th": 0.14}
    )

    assert response.status_code == 200
    minimum = response.json()
    assert minimum["alpha_min"] == pytest.approx(1.8774, abs=1e-3)
    assert minimum["g2_min"] < 0.93480


def test_two_mode_symmetric_threshold(client):
    """
    Tests the symmetric two-mode threshold equals the single-mode one.
    """
    params = {"r": 0.5, "psi": 3 * math.pi / 4, "n_th": 0.1}

    single = client.get("/api/v1/thresholds/single", params=params)
    two_mode = client.get("/api/v1/thresholds/two-mode", params=params)

    assert two_mode.status_code == 200
    assert two_mode.json()["alpha_th"] == pytest.approx(single.json()["alpha_th"])


def test_two_mode_threshold_with_unequal_noise(client):
    """
    Tests an asymmetric configuration is solved by root finding.
    """
    params = {"r": 0.6, "n_th": 0.05, "n_th2": 0.2, "beta_ratio": 0.5}

    response = client.get("/api/v1/thresholds/two-mode", params=params)

    assert response.status_code == 200
    threshold = response.json()
    assert threshold["method"] == "root_finding"
    assert threshold["alpha_th"] == pytest.approx(
        solve_two_mode_threshold(0.6, math.pi, 0.05, 0.2, beta_ratio=0.5).alpha_th
    )


def test_two_mode_threshold_rejects_negative_ratio(client):
    response = client.get(
        "/api/v1/thresholds/two-mode", params={"r": 0.5, "beta_ratio": -1.0}
    )

    assert response.status_code == 422


@pytest.mark.asyncio
async def test_threshold_handler_called_directly():
    """
    Tests the handler without the HTTP layer.
    """
    threshold = await get_single_mode_threshold(r=0.5, psi=math.pi, n_th=0.0)

    assert threshold.exists
    assert threshold.alpha_th == pytest.approx(0.814, abs=1e-3)
