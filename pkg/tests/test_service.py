import json

import pytest
from fastapi.testclient import TestClient

from jobmatch.scoring import ScoringConfig
from jobmatch.service import build_state, create_app
from jobmatch.synthetic import GenParams, gen_candidates, gen_companies

SENTINEL_STREET = "vicolo del segreto 99, borgo nascosto"


def make_service(tmp_path, n_candidates=30, n_companies=25, config=None, sentinel=True):
    p = GenParams(n_candidates=n_candidates, n_companies=n_companies, seed=61)
    cands = gen_candidates(p)
    comps = gen_companies(p)
    if sentinel and cands:
        cands[0].address = SENTINEL_STREET
    audit_path = tmp_path / "audit.jsonl"
    state = build_state(
        candidates=cands,
        companies=comps,
        config=config or ScoringConfig(),
        audit_path=str(audit_path),
    )
    return create_app(state), state, audit_path, cands, comps


def audit_lines(path):
    if not path.exists():
        return []
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


class TestMatch:
    def test_known_candidate_topk_and_audit_growth(self, tmp_path):
        app, state, audit_path, cands, _ = make_service(tmp_path)
        client = TestClient(app)
        resp = client.post("/match", json={"candidate_id": cands[0].id, "k": 5})
        assert resp.status_code == 200
        body = resp.json()
        assert len(body["results"]) <= 5
        assert body["request_id"]
        lines = audit_lines(audit_path)
        assert len(lines) == 1
        assert lines[0]["request_id"] == body["request_id"]

    def test_unknown_candidate_404(self, tmp_path):
        app, *_ = make_service(tmp_path)
        client = TestClient(app)
        assert client.post("/match", json={"candidate_id": "ghost"}).status_code == 404

    def test_distance_override_out_of_range_422(self, tmp_path):
        app, _, _, cands, _ = make_service(tmp_path)
        client = TestClient(app)
        resp = client.post(
            "/match",
            json={"candidate_id": cands[0].id, "config_overrides": {"distance_max_km": 60.0}},
        )
        assert resp.status_code == 422

    def test_identical_requests_identical_lists(self, tmp_path):
        app, _, _, cands, _ = make_service(tmp_path)
        client = TestClient(app)
        payload = {"candidate_id": cands[1].id, "k": 8}
        a = client.post("/match", json=payload).json()["results"]
        b = client.post("/match", json=payload).json()["results"]
        assert a == b

    def test_adhoc_candidate_payload(self, tmp_path):
        app, *_ = make_service(tmp_path)
        client = TestClient(app)
        resp = client.post(
            "/match",
            json={
                "candidate": {
                    "id": "manual",
                    "lat": 45.43,
                    "lon": 10.99,
                    "attitude": 0.8,
                    "education_level": 3,
                    "disability_type": "motoria",
                    "skills_text": "pulizia locali, gestione magazzino",
                },
                "k": 3,
            },
        )
        assert resp.status_code == 200

    def test_malformed_payload_400(self, tmp_path):
        app, *_ = make_service(tmp_path)
        client = TestClient(app)
        resp = client.post("/match", json={"candidate": {"attitude": 3.0, "lat": 45.0, "lon": 11.0}})
        assert resp.status_code == 400
        assert "attitude" in resp.json()["detail"]

    def test_missing_candidate_400(self, tmp_path):
        app, *_ = make_service(tmp_path)
        client = TestClient(app)
        assert client.post("/match", json={"k": 3}).status_code == 400

    def test_contribution_bars_sum_to_final(self, tmp_path):
        app, _, _, cands, _ = make_service(tmp_path)
        client = TestClient(app)
        body = client.post("/match", json={"candidate_id": cands[2].id, "k": 5}).json()
        for rec in body["results"]:
            assert abs(sum(rec["explanation"].values()) - rec["final"]) < 1e-9

    def test_include_filtered_lists_gated_companies(self, tmp_path):
        cfg = ScoringConfig(attitude_min=0.0, distance_max_km=10.0)
        app, _, _, cands, comps = make_service(tmp_path, config=cfg)
        client = TestClient(app)
        body = client.post(
            "/match", json={"candidate_id": cands[0].id, "k": 50, "include_filtered": True}
        ).json()
        assert "filtered" in body
        assert len(body["results"]) + len(body["filtered"]) == len(comps)
        for entry in body["filtered"]:
            assert entry["gate"] != "passed"


class TestAuditMinimization:
    def test_no_free_text_address_in_log(self, tmp_path):
        app, _, audit_path, cands, _ = make_service(tmp_path)
        client = TestClient(app)
        for cand in cands[:10]:
            client.post("/match", json={"candidate_id": cand.id, "k": 3})
        raw = audit_path.read_text(encoding="utf-8")
        assert SENTINEL_STREET not in raw
        assert "vicolo del segreto" not in raw
        for line in audit_lines(audit_path):
            assert "address" not in line["candidate"]

    def test_every_match_has_exactly_one_line(self, tmp_path):
        app, _, audit_path, cands, _ = make_service(tmp_path)
        client = TestClient(app)
        for _ in range(7):
            client.post("/match", json={"candidate_id": cands[0].id})
        assert len(audit_lines(audit_path)) == 7

    def test_log_rotates_by_size(self, tmp_path):
        from jobmatch.scoring import ScoringConfig
        from jobmatch.service import build_state, create_app
        from jobmatch.synthetic import GenParams, gen_candidates, gen_companies

        p = GenParams(n_candidates=3, n_companies=5, seed=61)
        state = build_state(
            candidates=gen_candidates(p),
            companies=gen_companies(p),
            config=ScoringConfig(),
            audit_path=str(tmp_path / "audit.jsonl"),
            audit_max_bytes=200,
        )
        client = TestClient(create_app(state))
        for _ in range(3):
            client.post("/match", json={"candidate_id": "c00000"})
        assert (tmp_path / "audit.jsonl.1").exists()


class TestConfig:
    def test_get_returns_current(self, tmp_path):
        app, *_ = make_service(tmp_path)
        client = TestClient(app)
        body = client.get("/config").json()
        assert body["w_compat"] == 0.35
        assert body["distance_max_km"] == 30.0

    def test_put_applies_to_next_match(self, tmp_path):
        app, state, _, cands, _ = make_service(tmp_path)
        client = TestClient(app)
        before = client.post("/match", json={"candidate_id": cands[0].id, "k": 50}).json()
        resp = client.put("/config", json={"attitude_min": 1.0})
        assert resp.status_code == 200
        assert state.config.attitude_min == 1.0
        after = client.post("/match", json={"candidate_id": cands[0].id, "k": 50}).json()
        assert after["results"] == []  # nobody clears a 1.0 attitude bar
        assert before["results"] != after["results"]

    def test_invalid_put_rejected_and_retained(self, tmp_path):
        app, state, _, _, _ = make_service(tmp_path)
        client = TestClient(app)
        old = state.config
        assert client.put("/config", json={"w_compat": -1.0}).status_code == 422
        assert state.config == old

    def test_config_change_is_audited(self, tmp_path):
        app, _, audit_path, _, _ = make_service(tmp_path)
        client = TestClient(app)
        client.put("/config", json={"attitude_min": 0.2})
        lines = audit_lines(audit_path)
        assert lines[-1]["type"] == "config_update"
        assert lines[-1]["config"]["attitude_min"] == 0.2


class TestOverride:
    def _match(self, client, cands):
        return client.post("/match", json={"candidate_id": cands[0].id}).json()["request_id"]

    def test_override_stored_verbatim(self, tmp_path):
        app, _, audit_path, cands, _ = make_service(tmp_path)
        client = TestClient(app)
        rid = self._match(client, cands)
        reason = "esperienza specifica nel settore richiesto"
        resp = client.post("/override", json={"request_id": rid, "action": "overridden", "reason": reason})
        assert resp.status_code == 200
        last = audit_lines(audit_path)[-1]
        assert last["type"] == "override"
        assert last["operator_action"]["reason"] == reason

    def test_unknown_request_404(self, tmp_path):
        app, *_ = make_service(tmp_path)
        client = TestClient(app)
        resp = client.post("/override", json={"request_id": "nope", "action": "accepted"})
        assert resp.status_code == 404

    def test_duplicate_override_conflict(self, tmp_path):
        app, _, _, cands, _ = make_service(tmp_path)
        client = TestClient(app)
        rid = self._match(client, cands)
        ok = client.post("/override", json={"request_id": rid, "action": "accepted"})
        dup = client.post("/override", json={"request_id": rid, "action": "accepted"})
        assert ok.status_code == 200
        assert dup.status_code == 409

    def test_overridden_requires_reason(self, tmp_path):
        app, _, _, cands, _ = make_service(tmp_path)
        client = TestClient(app)
        rid = self._match(client, cands)
        resp = client.post("/override", json={"request_id": rid, "action": "overridden", "reason": "  "})
        assert resp.status_code == 400


class TestAnalytics:
    def test_empty_datasets(self, tmp_path):
        state = build_state(candidates=[], companies=[], audit_path=str(tmp_path / "a.jsonl"))
        client = TestClient(create_app(state))
        body = client.get("/analytics").json()
        assert body["totals"] == {"candidates": 0, "companies": 0, "open_positions": 0}
        assert body["mean_attitude"] == 0.0
        assert body["disability_histogram"] == {}

    def test_totals_and_mean_attitude(self, tmp_path):
        app, state, _, cands, comps = make_service(tmp_path, n_candidates=100, n_companies=40)
        client = TestClient(app)
        body = client.get("/analytics").json()
        assert body["totals"]["candidates"] == 100
        assert body["totals"]["companies"] == 40
        assert body["totals"]["open_positions"] == sum(c.open_positions for c in comps)
        expected = sum(c.attitude for c in cands) / len(cands)
        assert abs(body["mean_attitude"] - expected) < 1e-9

    def test_histograms_sum_to_totals(self, tmp_path):
        app, *_ = make_service(tmp_path, n_candidates=80, n_companies=30)
        client = TestClient(app)
        body = client.get("/analytics").json()
        assert sum(body["disability_histogram"].values()) == 80
        assert sum(body["sector_histogram"].values()) == 30

    def test_latency_percentiles_populated(self, tmp_path):
        app, _, _, cands, _ = make_service(tmp_path)
        client = TestClient(app)
        for _ in range(5):
            client.post("/match", json={"candidate_id": cands[0].id})
        lat = client.get("/analytics").json()["latency_seconds"]
        assert lat["count"] == 5
        assert 0 <= lat["p50"] <= lat["p95"] <= lat["p99"]


class TestAuth:
    def test_bearer_token_enforced(self, tmp_path, monkeypatch):
        monkeypatch.setenv("MATCH_API_TOKEN", "segreto")
        app, _, _, cands, _ = make_service(tmp_path)
        client = TestClient(app)
        assert client.get("/config").status_code == 401
        assert client.post("/match", json={"candidate_id": cands[0].id}).status_code == 401
        ok = client.get("/config", headers={"Authorization": "Bearer segreto"})
        assert ok.status_code == 200
        assert client.get("/health").status_code == 200  # health stays open

    def test_health(self, tmp_path):
        app, *_ = make_service(tmp_path)
        body = TestClient(app).get("/health").json()
        assert body["status"] == "ok"
        assert body["candidates"] == 30


class TestServiceUnavailable:
    def test_no_datasets_503(self, tmp_path):
        state = build_state(candidates=[], companies=[], audit_path=str(tmp_path / "a.jsonl"))
        client = TestClient(create_app(state))
        resp = client.post("/match", json={"candidate": {"id": "x", "lat": 45.0, "lon": 11.0}})
        assert resp.status_code == 503
