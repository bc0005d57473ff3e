import io
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient
from PIL import Image

from apcircle import EngineConfig, track_video
from apcircle.service import create_app
from apcircle.video_io import frame_results_csv_text, load_video

SPEC_TEXT = """
width = 96
height = 96
frame_count = 10
center_x = 48
center_y = 48
base_diameter = 30
amplitude = 5
period = 20
rng_seed = 3
"""


@pytest.fixture()
def spec_file(tmp_path):
    path = tmp_path / "clip.phantom"
    path.write_text(SPEC_TEXT)
    return path


@pytest.fixture()
def client():
    return TestClient(create_app())


def _wait_done(client, session_id, timeout=30.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        state = client.get(f"/sessions/{session_id}").json()["state"]
        if state in ("done", "failed"):
            return state
        time.sleep(0.02)
    raise TimeoutError("session did not finish")


class TestSessionFlow:
    def test_create_seed_run_result(self, client, spec_file):
        created = client.post("/sessions", json={"source": str(spec_file)})
        assert created.status_code == 200
        view = created.json()
        session_id = view["id"]
        assert view["state"] == "loaded"
        assert view["frame_count"] == 10

        seeded = client.post(f"/sessions/{session_id}/seed", json={"x": 48, "y": 48})
        assert seeded.status_code == 200
        assert seeded.json()["state"] == "seeded"

        started = client.post(f"/sessions/{session_id}/run")
        assert started.status_code == 200
        assert _wait_done(client, session_id) == "done"

        result = client.get(f"/sessions/{session_id}/result").json()
        assert result["state"] == "done"
        assert len(result["frames"]) == 10
        assert all("diameter_cm" in row for row in result["frames"])

        # service output must equal a direct engine run bit for bit
        frames = load_video(spec_file)
        direct = track_video(frames, (48, 48), EngineConfig())
        for row, fr in zip(result["frames"], direct.per_frame):
            assert row["diameter_px"] == fr.diameter_px
            assert row["x_c"] == fr.circle.x
            assert row["y_c"] == fr.circle.y

        csv_response = client.get(f"/sessions/{session_id}/result", params={"format": "csv"})
        assert csv_response.text == frame_results_csv_text(direct.per_frame)

    def test_config_overrides_applied(self, client, spec_file):
        session_id = client.post("/sessions", json={"source": str(spec_file)}).json()["id"]
        seeded = client.post(
            f"/sessions/{session_id}/seed",
            json={"x": 48, "y": 48, "alpha": 2e-4, "sample_count": 16, "filter": "median"},
        )
        assert seeded.status_code == 200
        config = seeded.json()["config"]
        assert config["alpha"] == 2e-4
        assert config["sample_count"] == 16
        assert config["filter"] == "median"

    def test_frame_and_overlay_endpoints(self, client, spec_file):
        session_id = client.post("/sessions", json={"source": str(spec_file)}).json()["id"]
        image_response = client.get(f"/sessions/{session_id}/frames/0")
        assert image_response.status_code == 200
        img = Image.open(io.BytesIO(image_response.content))
        assert img.size == (96, 96)

        assert client.get(f"/sessions/{session_id}/frames/99").status_code == 404
        # no results yet -> overlay unavailable
        assert client.get(f"/sessions/{session_id}/overlay/0").status_code == 404

        client.post(f"/sessions/{session_id}/seed", json={"x": 48, "y": 48})
        client.post(f"/sessions/{session_id}/run")
        _wait_done(client, session_id)
        overlay_response = client.get(f"/sessions/{session_id}/overlay/3")
        assert overlay_response.status_code == 200
        overlay = np.asarray(Image.open(io.BytesIO(overlay_response.content)))
        assert overlay.shape == (96, 96, 3)


class TestStateMachine:
    def test_run_before_seed_conflicts(self, client, spec_file):
        session_id = client.post("/sessions", json={"source": str(spec_file)}).json()["id"]
        response = client.post(f"/sessions/{session_id}/run")
        assert response.status_code == 409

    def test_seed_after_done_conflicts(self, client, spec_file):
        session_id = client.post("/sessions", json={"source": str(spec_file)}).json()["id"]
        client.post(f"/sessions/{session_id}/seed", json={"x": 48, "y": 48})
        client.post(f"/sessions/{session_id}/run")
        _wait_done(client, session_id)
        assert client.post(f"/sessions/{session_id}/seed", json={"x": 40, "y": 40}).status_code == 409
        assert client.post(f"/sessions/{session_id}/run").status_code == 409

    def test_reseed_before_run_allowed(self, client, spec_file):
        session_id = client.post("/sessions", json={"source": str(spec_file)}).json()["id"]
        assert client.post(f"/sessions/{session_id}/seed", json={"x": 48, "y": 48}).status_code == 200
        assert client.post(f"/sessions/{session_id}/seed", json={"x": 50, "y": 47}).status_code == 200

    def test_invalid_seed_rejected(self, client, spec_file):
        session_id = client.post("/sessions", json={"source": str(spec_file)}).json()["id"]
        response = client.post(f"/sessions/{session_id}/seed", json={"x": 500, "y": 48})
        assert response.status_code == 422
        assert "seed out of bounds" in response.json()["detail"]

    def test_unknown_functional_rejected(self, client, spec_file):
        session_id = client.post("/sessions", json={"source": str(spec_file)}).json()["id"]
        response = client.post(
            f"/sessions/{session_id}/seed", json={"x": 48, "y": 48, "functional": "psnake"}
        )
        assert response.status_code == 422

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/deadbeef").status_code == 404
        assert client.post("/sessions/deadbeef/run").status_code == 404

    def test_unreadable_source_rejected(self, client, tmp_path):
        response = client.post("/sessions", json={"source": str(tmp_path / "missing")})
        assert response.status_code == 422
