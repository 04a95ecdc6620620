import numpy as np
import pytest
from fastapi.testclient import TestClient

from dpsketch.erm import dataset_to_csv
from dpsketch.service import create_app
from dpsketch.synth import SyntheticSpec, gen_synthetic


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app(), raise_server_exceptions=False) as c:
        yield c


BASE_CONFIG = {
    "dataset": "synthetic",
    "loss": "logistic",
    "n": 200,
    "d": 3,
    "distribution": "singleton-uniform",
    "epsilon": 1.0,
    "delta": 1e-5,
    "schedule": "auto-convex",
    "seeds": [1, 2],
}


class TestHealth:
    def test_ok(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json()["status"] == "ok"


class TestGen:
    def test_returns_csv_and_constants(self, client):
        response = client.post("/gen", json={"config": BASE_CONFIG})
        assert response.status_code == 200
        body = response.json()
        assert body["dataset_csv"].splitlines()[0] == "x0,x1,x2,y"
        assert len(body["constants"]["smoothness"]) == 3

    def test_config_error_is_400(self, client):
        bad = dict(BASE_CONFIG, loss="hinge")
        response = client.post("/gen", json={"config": bad})
        assert response.status_code == 400
        assert "loss" in response.json()["detail"]

    def test_unknown_field_is_422(self, client):
        response = client.post("/gen", json={"config": dict(BASE_CONFIG, bogus=1)})
        assert response.status_code == 422


class TestCalibrate:
    def test_noise_table(self, client):
        response = client.post("/calibrate", json={"config": BASE_CONFIG})
        assert response.status_code == 200
        body = response.json()
        lines = body["table_csv"].strip().splitlines()
        assert lines[0] == "subset,lipschitz,sigma_sq"
        assert len(lines) == 1 + 3
        assert body["audited_epsilon"] <= 1.0

    def test_quadratic_refused(self, client):
        response = client.post(
            "/calibrate",
            json={"config": dict(BASE_CONFIG, loss="quadratic", schedule="manual")},
        )
        assert response.status_code == 400
        assert "bounded-gradient" in response.json()["detail"]


class TestRun:
    def test_run_payload(self, client):
        response = client.post("/run", json={"config": BASE_CONFIG})
        assert response.status_code == 200
        body = response.json()
        assert body["results_csv"].splitlines()[0].startswith("method,seed,epoch")
        assert body["all_diverged"] is False
        summary = body["summary"]["methods"]["singleton-uniform"]
        assert summary["audited_epsilon"] <= 1.0

    def test_inline_dataset(self, client):
        problem = gen_synthetic(
            SyntheticSpec(n=80, d=3, loss="logistic"), np.random.default_rng(5)
        )
        config = dict(BASE_CONFIG, dataset="remote.csv", n=80)
        response = client.post(
            "/run",
            json={"config": config, "dataset_csv": dataset_to_csv(problem.dataset)},
        )
        assert response.status_code == 200

    def test_missing_dataset_content_is_400(self, client):
        response = client.post("/run", json={"config": dict(BASE_CONFIG, dataset="x.csv")})
        assert response.status_code == 400


class TestCompare:
    def test_methods_subset(self, client):
        response = client.post(
            "/compare",
            json={"config": BASE_CONFIG, "methods": ["dp-sgd", "dp-cd-uniform"]},
        )
        assert response.status_code == 200
        body = response.json()
        assert set(body["summary"]["medians"]) == {"dp-sgd", "dp-cd-uniform"}

    def test_empty_methods_is_400(self, client):
        response = client.post("/compare", json={"config": BASE_CONFIG, "methods": []})
        assert response.status_code == 400


class TestBound:
    def test_default_row(self, client):
        response = client.post("/bound", json={"config": BASE_CONFIG})
        assert response.status_code == 200
        body = response.json()
        assert body["row"] == "skgd-coord-uniform"
        assert body["value"] > 0

    def test_missing_constants_is_400(self, client):
        config = dict(BASE_CONFIG, loss="quadratic", schedule="manual")
        response = client.post("/bound", json={"config": config, "row": "dp-sgd"})
        assert response.status_code == 400
