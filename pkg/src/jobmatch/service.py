"""HTTP service: matching, live configuration, analytics and audit log.

State (datasets, tf-idf model, config) is held as immutable snapshots and
swapped atomically, so a request sees exactly one config version end to
end. The audit log is append-only JSONL with a single serialized writer;
every match response has its record flushed before the response returns.
Candidate snapshots in the log are minimized: ids and feature values only,
never the free-text address.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from collections import Counter, deque
from dataclasses import asdict, replace

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .errors import ConfigError
from .geo import GeoPoint
from .learning import Calibrator, Forest, apply_calibrator, featurize_pair, predict_proba
from .scoring import (
    CandidateProfile,
    CompanyProfile,
    ScoringConfig,
    rank_companies,
    score_pair,
    with_overrides,
)
from .text_it import TfidfModel

AUDIT_MAX_BYTES_DEFAULT = 10 * 1024 * 1024


class AuditLog:
    """Append-only JSONL log, rotated by size, one serialized writer."""

    def __init__(self, path: str, max_bytes: int = AUDIT_MAX_BYTES_DEFAULT):
        self.path = path
        self.max_bytes = max_bytes
        self._lock = threading.Lock()

    def append(self, record: dict) -> None:
        line = json.dumps(record, sort_keys=True, ensure_ascii=False)
        with self._lock:
            if os.path.exists(self.path) and os.path.getsize(self.path) >= self.max_bytes:
                os.replace(self.path, self.path + ".1")
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())


def minimized_candidate(cand: CandidateProfile) -> dict:
    """Audit snapshot: ids and feature values, no free-text address."""
    return {
        "id": cand.id,
        "education_level": cand.education_level,
        "disability_type": cand.disability_type,
        "attitude": cand.attitude,
        "years_experience": cand.years_experience,
        "unemployment_months": cand.unemployment_months,
        "lat": cand.residence.lat if cand.residence else None,
        "lon": cand.residence.lon if cand.residence else None,
    }


class MatchRequest(BaseModel):
    candidate_id: str | None = None
    candidate: dict | None = None
    k: int = Field(default=5, ge=1)
    config_overrides: dict[str, float] | None = None
    include_filtered: bool = False


class OverrideRequest(BaseModel):
    request_id: str
    action: str
    reason: str = ""


class ServiceState:
    def __init__(
        self,
        candidates: list[CandidateProfile],
        companies: list[CompanyProfile],
        tfidf: TfidfModel | None,
        config: ScoringConfig,
        audit: AuditLog,
        model: Forest | None = None,
        calibrator: Calibrator | None = None,
    ):
        self.candidates = {c.id: c for c in candidates}
        self.companies = companies
        self.tfidf = tfidf
        self.config = config
        self.audit = audit
        self.model = model
        self.calibrator = calibrator
        self.overrides: dict[str, dict] = {}  # request_id -> operator action
        self.known_requests: set[str] = set()
        self.latencies: deque[float] = deque(maxlen=512)


def _candidate_from_payload(payload: dict) -> CandidateProfile:
    lat, lon = payload.get("lat"), payload.get("lon")
    if lat is None or lon is None:
        raise ValueError("lat and lon are required for ad-hoc candidates")
    exclusions = payload.get("exclusions", [])
    if isinstance(exclusions, str):
        exclusions = [p for p in exclusions.split(";") if p.strip()]
    return CandidateProfile(
        id=str(payload.get("id", "adhoc")),
        address=str(payload.get("address", "")),
        residence=GeoPoint(float(lat), float(lon)),
        education_level=int(payload.get("education_level", 0)),
        disability_type=str(payload.get("disability_type", "altro")),
        attitude=float(payload.get("attitude", 0.5)),
        years_experience=float(payload.get("years_experience", 0.0)),
        unemployment_months=int(payload.get("unemployment_months", 0)),
        skills_text=str(payload.get("skills_text", "")),
        exclusions=list(exclusions),
    )


def _percentile(sorted_values: list[float], q: float) -> float:
    if not sorted_values:
        return 0.0
    idx = min(len(sorted_values) - 1, int(round(q * (len(sorted_values) - 1))))
    return sorted_values[idx]


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="jobmatch", version="0.1.0")
    # the operator console is served as static files from another origin
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    token = os.environ.get("MATCH_API_TOKEN", "")

    def require_auth(request: Request) -> None:
        if not token:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="missing or invalid bearer token")

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "candidates": len(state.candidates),
            "companies": len(state.companies),
            "model_loaded": state.model is not None,
        }

    @app.post("/match", dependencies=[Depends(require_auth)])
    def match(req: MatchRequest):
        started = time.perf_counter()
        if not state.companies or state.tfidf is None:
            raise HTTPException(status_code=503, detail="datasets not loaded")

        if req.candidate_id is not None:
            cand = state.candidates.get(req.candidate_id)
            if cand is None:
                raise HTTPException(status_code=404, detail=f"unknown candidate {req.candidate_id!r}")
        elif req.candidate is not None:
            try:
                cand = _candidate_from_payload(req.candidate)
            except (ValueError, TypeError) as exc:
                raise HTTPException(status_code=400, detail=str(exc))
        else:
            raise HTTPException(status_code=400, detail="candidate_id or candidate payload required")

        cfg = state.config  # one snapshot for the whole request
        if req.config_overrides:
            try:
                cfg = with_overrides(cfg, req.config_overrides)
            except (ConfigError, TypeError) as exc:
                raise HTTPException(status_code=422, detail=str(exc))

        ranked = rank_companies(cand, state.companies, state.tfidf, cfg, req.k)
        companies_by_id = {c.id: c for c in state.companies}
        results = []
        for r in ranked:
            comp = companies_by_id[r.company_id]
            entry = {
                "company_id": r.company_id,
                "name": comp.name,
                "sector": comp.sector,
                "final": r.final,
                "compat": r.compat,
                "dist_factor": r.dist_factor,
                "attitude": r.attitude,
                "company_factor": r.company_factor,
                "distance_km": r.distance_km,
                "employee_count": comp.employee_count,
                "open_positions": comp.open_positions,
                "remote_available": comp.remote_available,
                "certified": comp.certified,
                "explanation": r.explanation,
            }
            if state.model is not None:
                raw = predict_proba(state.model, featurize_pair(cand, comp, state.tfidf, cfg))
                entry["success_proba"] = (
                    apply_calibrator(state.calibrator, raw) if state.calibrator is not None else raw
                )
            results.append(entry)

        filtered = None
        if req.include_filtered:
            filtered = []
            for comp in state.companies:
                r = score_pair(cand, comp, state.tfidf, cfg)
                if r.gate != "passed":
                    filtered.append({"company_id": comp.id, "name": comp.name, "gate": r.gate})

        request_id = uuid.uuid4().hex
        record = {
            "type": "match",
            "timestamp": time.time(),
            "request_id": request_id,
            "candidate": minimized_candidate(cand),
            "config": asdict(cfg),
            "recommendations": [{"company_id": r.company_id, "final": r.final} for r in ranked],
            "operator_action": {"action": "none"},
        }
        state.audit.append(record)
        state.known_requests.add(request_id)
        state.latencies.append(time.perf_counter() - started)

        response = {"request_id": request_id, "config": asdict(cfg), "results": results}
        if filtered is not None:
            response["filtered"] = filtered
        return response

    @app.get("/config", dependencies=[Depends(require_auth)])
    def get_config():
        return asdict(state.config)

    @app.put("/config", dependencies=[Depends(require_auth)])
    def put_config(values: dict[str, float]):
        try:
            new_cfg = with_overrides(state.config, values)
        except (ConfigError, TypeError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        state.config = new_cfg  # atomic swap
        state.audit.append(
            {
                "type": "config_update",
                "timestamp": time.time(),
                "config": asdict(new_cfg),
            }
        )
        return asdict(new_cfg)

    @app.post("/override", dependencies=[Depends(require_auth)])
    def override(req: OverrideRequest):
        if req.action not in ("accepted", "overridden"):
            raise HTTPException(status_code=400, detail="action must be 'accepted' or 'overridden'")
        if req.action == "overridden" and not req.reason.strip():
            raise HTTPException(status_code=400, detail="a reason is required when overriding")
        if req.request_id not in state.known_requests:
            raise HTTPException(status_code=404, detail=f"unknown request_id {req.request_id!r}")
        if req.request_id in state.overrides:
            raise HTTPException(status_code=409, detail=f"request {req.request_id!r} already has an operator action")
        action = {"action": req.action, "reason": req.reason}
        state.overrides[req.request_id] = action
        state.audit.append(
            {
                "type": "override",
                "timestamp": time.time(),
                "request_id": req.request_id,
                "operator_action": action,
            }
        )
        return {"request_id": req.request_id, "operator_action": action}

    @app.get("/analytics", dependencies=[Depends(require_auth)])
    def analytics():
        cands = list(state.candidates.values())
        disability_hist = Counter(c.disability_type for c in cands)
        sector_hist = Counter(c.sector for c in state.companies)
        lat_sorted = sorted(state.latencies)
        return {
            "totals": {
                "candidates": len(cands),
                "companies": len(state.companies),
                "open_positions": sum(c.open_positions for c in state.companies),
            },
            "mean_attitude": (sum(c.attitude for c in cands) / len(cands)) if cands else 0.0,
            "disability_histogram": dict(sorted(disability_hist.items())),
            "sector_histogram": dict(sorted(sector_hist.items())),
            "latency_seconds": {
                "count": len(lat_sorted),
                "p50": _percentile(lat_sorted, 0.50),
                "p95": _percentile(lat_sorted, 0.95),
                "p99": _percentile(lat_sorted, 0.99),
            },
        }

    return app


def build_state(
    candidates: list[CandidateProfile],
    companies: list[CompanyProfile],
    config: ScoringConfig | None = None,
    audit_path: str = "audit.jsonl",
    model: Forest | None = None,
    calibrator: Calibrator | None = None,
    audit_max_bytes: int = AUDIT_MAX_BYTES_DEFAULT,
) -> ServiceState:
    """Fit the tf-idf model over the active corpus and assemble app state."""
    from .text_it import fit_tfidf

    corpus = [c.tasks_text for c in companies] + [c.skills_text for c in candidates]
    tfidf = fit_tfidf(corpus) if corpus else None
    return ServiceState(
        candidates=candidates,
        companies=companies,
        tfidf=tfidf,
        config=config or ScoringConfig(),
        audit=AuditLog(audit_path, max_bytes=audit_max_bytes),
        model=model,
        calibrator=calibrator,
    )
