import numpy as np
import pytest
from fastapi.testclient import TestClient

from conftest import write_bundle
from stagecut.service.app import create_app


@pytest.fixture
def client(tmp_path):
    return TestClient(create_app()), write_bundle(tmp_path / "bundle")


class TestRegister:
    def test_register_and_summary(self, client):
        api, bundle = client
        response = api.post("/projects", json={"path": str(bundle)})
        assert response.status_code == 200
        body = response.json()
        assert body["rush_count"] == 8
        summary = api.get(f"/projects/{body['project_id']}").json()
        assert summary["frame_count"] == 750
        assert summary["word_count"] > 0

    def test_register_is_idempotent(self, client):
        api, bundle = client
        a = api.post("/projects", json={"path": str(bundle)}).json()
        b = api.post("/projects", json={"path": str(bundle)}).json()
        assert a["project_id"] == b["project_id"]

    def test_invalid_bundle_is_4xx_with_stage(self, client, tmp_path):
        api, _ = client
        empty = tmp_path / "empty"
        empty.mkdir()
        response = api.post("/projects", json={"path": str(empty)})
        assert response.status_code == 400
        body = response.json()
        assert body["stage"] == "ingest"
        assert "meta.json" in body["message"]

    def test_unknown_project_404(self, client):
        api, _ = client
        response = api.get("/projects/deadbeef")
        assert response.status_code == 404
        assert response.json()["stage"] == "service"

    def test_missing_llm_cache_rejected(self, client, tmp_path):
        api, _ = client
        root = write_bundle(tmp_path / "nocache", llm_response=None)
        response = api.post("/projects", json={"path": str(root)})
        assert response.status_code == 400
        assert response.json()["stage"] == "dialogue"


class TestSolve:
    def _register(self, api, bundle):
        return api.post("/projects", json={"path": str(bundle)}).json()["project_id"]

    def test_default_solve_payload(self, client):
        api, bundle = client
        pid = self._register(api, bundle)
        response = api.post(f"/projects/{pid}/solve", json={"overrides": {}})
        assert response.status_code == 200
        payload = response.json()
        assert payload["segments"][0]["rush"] == "MASTER"
        assert len(payload["selected"]) == 750
        assert len(payload["tracks"]["shots"]) == 8
        assert payload["total_energy"] == pytest.approx(
            payload["total_energy"]
        )
        covered = np.zeros(750, dtype=int)
        for seg in payload["segments"]:
            covered[seg["start_frame"] : seg["end_frame"]] += 1
        assert (covered == 1).all()

    def test_cache_hit_identical_payload(self, client):
        api, bundle = client
        pid = self._register(api, bundle)
        a = api.post(f"/projects/{pid}/solve", json={"overrides": {}})
        b = api.post(f"/projects/{pid}/solve", json={"overrides": {}})
        assert a.content == b.content  # byte-identical, including solve time

    def test_lower_m_reduces_mean_segment_duration(self, client):
        api, bundle = client
        pid = self._register(api, bundle)
        base = api.post(f"/projects/{pid}/solve", json={"overrides": {}}).json()
        fast = api.post(
            f"/projects/{pid}/solve", json={"overrides": {"m": 3.0}}
        ).json()

        def mean_duration(payload):
            durations = [
                seg["end_frame"] - seg["start_frame"] for seg in payload["segments"]
            ]
            return float(np.mean(durations))

        assert mean_duration(fast) < mean_duration(base)

    def test_invalid_override_rejected(self, client):
        api, bundle = client
        pid = self._register(api, bundle)
        response = api.post(
            f"/projects/{pid}/solve", json={"overrides": {"alpha": 0.9}}
        )
        assert response.status_code == 422
        body = response.json()
        assert body["stage"] == "params"
        assert "alpha" in body["message"]

    def test_unknown_override_rejected(self, client):
        api, bundle = client
        pid = self._register(api, bundle)
        response = api.post(
            f"/projects/{pid}/solve", json={"overrides": {"bogus": 1.0}}
        )
        assert response.status_code == 422


class TestFrameRects:
    def _register(self, api, bundle):
        return api.post("/projects", json={"path": str(bundle)}).json()["project_id"]

    def test_master_rect_present_at_zero(self, client):
        api, bundle = client
        pid = self._register(api, bundle)
        response = api.get(f"/projects/{pid}/frames/0/rects")
        assert response.status_code == 200
        rects = response.json()["rects"]
        master = next(r for r in rects if r["label"] == "MASTER")
        assert master["w"] == 1920.0
        assert master["h"] == 1080.0
        assert len(rects) == 8

    def test_out_of_range_frame(self, client):
        api, bundle = client
        pid = self._register(api, bundle)
        response = api.get(f"/projects/{pid}/frames/750/rects")
        assert response.status_code == 400
        assert "out of range" in response.json()["message"]

    def test_selected_marker_matches_last_solve(self, client):
        api, bundle = client
        pid = self._register(api, bundle)
        payload = api.post(f"/projects/{pid}/solve", json={"overrides": {}}).json()
        t = 200
        rects = api.get(f"/projects/{pid}/frames/{t}/rects").json()["rects"]
        selected = [r["label"] for r in rects if r["selected"]]
        expected = payload["tracks"]["shots"][payload["selected"][t]]
        assert selected == [expected]


class TestConcurrency:
    def test_parallel_solves_share_one_cached_payload(self, client):
        import threading

        api, bundle = client
        registry = api.app.state.registry
        pid = api.post("/projects", json={"path": str(bundle)}).json()["project_id"]
        results = []

        def work():
            results.append(registry.solve(pid, {"m": 4.0}))

        threads = [threading.Thread(target=work) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(results) == 4
        first = results[0]
        assert all(r is first for r in results[1:])  # one cache entry wins


class TestPotentials:
    def test_stride_downsampling(self, client):
        api, bundle = client
        pid = api.post("/projects", json={"path": str(bundle)}).json()["project_id"]
        tracks = api.get(f"/projects/{pid}/potentials", params={"stride": 50}).json()
        assert tracks["stride"] == 50
        assert tracks["frames"] == list(range(0, 750, 50))
        assert len(tracks["unary"]) == len(tracks["frames"])

    def test_bad_stride(self, client):
        api, bundle = client
        pid = api.post("/projects", json={"path": str(bundle)}).json()["project_id"]
        response = api.get(f"/projects/{pid}/potentials", params={"stride": 0})
        assert response.status_code == 400
