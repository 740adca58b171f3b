"""Deterministic data-parallel scoring of candidate × company grids.

Work is partitioned by candidate (each ranking is independent), top-k
lists are kept per candidate, and results are reassembled in input order,
so the report is identical for any worker count. Peak memory stays
proportional to |candidates|·k + |companies|, never to the full grid.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from multiprocessing import get_context

from .scoring import CandidateProfile, CompanyProfile, MatchResult, ScoringConfig, rank_companies
from .text_it import TfidfModel

BATCH_CSV_COLUMNS = [
    "candidate_id",
    "rank",
    "company_id",
    "final",
    "compat",
    "dist_factor",
    "attitude",
    "company_factor",
    "distance_km",
    "gate",
]


@dataclass
class BatchReport:
    rankings: list[list[MatchResult]]  # aligned with the input candidate order
    pair_count: int
    elapsed: float
    worker_count: int


_BATCH_STATE: dict | None = None


def _rank_task(index: int) -> tuple[int, list[MatchResult]]:
    st = _BATCH_STATE
    return index, rank_companies(st["candidates"][index], st["companies"], st["tfidf"], st["cfg"], st["k"])


def batch_match(
    candidates: list[CandidateProfile],
    companies: list[CompanyProfile],
    tfidf: TfidfModel,
    cfg: ScoringConfig,
    k: int,
    workers: int = 1,
) -> BatchReport:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    start = time.perf_counter()

    # warm the shared vector memo once so forked workers inherit it
    for comp in companies:
        tfidf.vector(comp.tasks_text)

    global _BATCH_STATE
    _BATCH_STATE = {"candidates": candidates, "companies": companies, "tfidf": tfidf, "cfg": cfg, "k": k}
    try:
        if workers == 1:
            rankings = [_rank_task(i)[1] for i in range(len(candidates))]
        else:
            rankings = [[] for _ in candidates]
            chunk = max(1, len(candidates) // (workers * 4))
            with ProcessPoolExecutor(max_workers=workers, mp_context=get_context("fork")) as pool:
                for index, ranked in pool.map(_rank_task, range(len(candidates)), chunksize=chunk):
                    rankings[index] = ranked
    finally:
        _BATCH_STATE = None

    return BatchReport(
        rankings=rankings,
        pair_count=len(candidates) * len(companies),
        elapsed=time.perf_counter() - start,
        worker_count=workers,
    )


def write_batch_csv(report: BatchReport, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(BATCH_CSV_COLUMNS)
        for ranked in report.rankings:
            for rank, r in enumerate(ranked, start=1):
                writer.writerow(
                    [
                        r.candidate_id,
                        rank,
                        r.company_id,
                        repr(r.final),
                        repr(r.compat),
                        repr(r.dist_factor),
                        repr(r.attitude),
                        repr(r.company_factor),
                        repr(r.distance_km),
                        r.gate,
                    ]
                )


def read_batch_csv(path: str) -> list[MatchResult]:
    """Rebuild MatchResults from a batch CSV (explanations are not stored)."""
    results: list[MatchResult] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            results.append(
                MatchResult(
                    candidate_id=row["candidate_id"],
                    company_id=row["company_id"],
                    compat=float(row["compat"]),
                    dist_factor=float(row["dist_factor"]),
                    attitude=float(row["attitude"]),
                    company_factor=float(row["company_factor"]),
                    distance_km=float(row["distance_km"]),
                    final=float(row["final"]),
                    gate=row["gate"],
                    explanation={},
                )
            )
    return results
