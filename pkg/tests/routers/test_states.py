import math

import pytest

from ..conftest import REFERENCE_STATE

REFERENCE_BODY = {
    "alpha": REFERENCE_STATE["alpha"],
    "xi": {"r": REFERENCE_STATE["r"], "psi": REFERENCE_STATE["psi"]},
    "n_th": REFERENCE_STATE["n_th"],
}


def test_describe_single_mode_state(client):
    """
    Tests the covariance matrix and diagnostics of the reference state.
    """
    response = client.post("/api/v1/states/single", json=REFERENCE_BODY)

    assert response.status_code == 200
    described = response.json()
    (q_var, qp), (pq, p_var) = described["cm"]["entries"]
    assert q_var == pytest.approx(0.64 * math.exp(-1.0))
    assert p_var == pytest.approx(0.64 * math.e)
    assert qp == pytest.approx(pq)
    assert described["x"]["entries"] == pytest.approx([2 * math.sqrt(2), 0.0], abs=1e-12)
    assert described["physicality"]["physical"] is True
    assert described["purity"] == pytest.approx(1 / 1.28)
    assert described["nonclassical_depth"] == pytest.approx(0.52912, abs=1e-5)


def test_single_mode_g2(client):
    """
    Tests closed form and pipeline agree through the API.
    """
    response = client.post("/api/v1/states/single/g2", json=REFERENCE_BODY)

    assert response.status_code == 200
    comparison = response.json()
    assert comparison["closed_form"]["value"] == pytest.approx(0.93480, abs=1e-5)
    assert comparison["pipeline"]["method"] == "moment_pipeline"
    assert comparison["difference"] < 1e-12


def test_single_mode_g2_accepts_alpha_as_mapping(client):
    """
    Tests alpha may be sent as {"re", "im"} with a zero imaginary part.
    """
    state = {**REFERENCE_BODY, "alpha": {"re": 2.0, "im": 0.0}}

    response = client.post("/api/v1/states/single/g2", json=state)

    assert response.status_code == 200
    assert response.json()["closed_form"]["value"] == pytest.approx(0.93480, abs=1e-5)


def test_single_mode_g2_complex_alpha(client):
    """
    Tests the closed form refuses a complex displacement.
    """
    state = {**REFERENCE_BODY, "alpha": [1.0, 0.5]}

    response = client.post("/api/v1/states/single/g2", json=state)

    assert response.status_code == 400


def test_single_mode_g2_vacuum(client):
    """
    Tests g2 of the vacuum is a bad request.
    """
    response = client.post("/api/v1/states/single/g2", json={})

    assert response.status_code == 400
    assert "undefined" in response.json()["detail"]


@pytest.mark.parametrize(
    "state",
    [
        {"n_th": -0.1},
        {"xi": {"r": -0.5}},
        {"alpha": "not a number"},
    ],
)
def test_single_mode_state_validation(client, state):
    """
    Tests negative noise, negative squeezing and unreadable amplitudes fail
    validation.
    """
    response = client.post("/api/v1/states/single", json=state)

    assert response.status_code == 422


def test_describe_two_mode_state(client):
    """
    Tests the two-mode covariance matrix is 4x4 and physical.
    """
    state = {"alpha": 1.0, "beta": 1.0, "xi": {"r": 0.5, "psi": math.pi}, "n_th1": 0.1}

    response = client.post("/api/v1/states/two-mode", json=state)

    assert response.status_code == 200
    described = response.json()
    assert len(described["cm"]["entries"]) == 4
    assert len(described["x"]["entries"]) == 4
    assert described["physicality"]["physical"] is True
    assert len(described["physicality"]["symplectic_eigenvalues"]) == 2
    assert described["nonclassical_depth"] is None


def test_two_mode_g2_thermal_modes(client):
    """
    Tests two unsqueezed thermal modes give a total g2 of 3/2.
    """
    response = client.post(
        "/api/v1/states/two-mode/g2", json={"n_th1": 0.5, "n_th2": 0.5}
    )

    assert response.status_code == 200
    assert response.json()["value"] == pytest.approx(1.5)


def test_two_mode_g2_squeezed_vacuum(client):
    """
    Tests the two-mode squeezed vacuum value 2 + 1 / (2 sinh^2 r).
    """
    r = 0.4

    response = client.post("/api/v1/states/two-mode/g2", json={"xi": {"r": r}})

    assert response.status_code == 200
    assert response.json()["value"] == pytest.approx(2 + 1 / (2 * math.sinh(r) ** 2))
