"""Matching engine for targeted job placement of people with disabilities.

Core pieces: great-circle geography with a persistent geocoding cache,
Italian TF-IDF compatibility scoring with hard exclusion gates, a weighted
multi-dimensional scorer, synthetic training data, a bagged decision-tree
scorer with isotonic calibration, fairness auditing and an audit-logged
HTTP service.
"""

__version__ = "0.1.0"

from .geo import GeoPoint, haversine_km
from .scoring import (
    CandidateProfile,
    CompanyProfile,
    MatchResult,
    ScoringConfig,
    rank_companies,
    score_pair,
)
from .text_it import fit_tfidf, similarity, tokenize_it

__all__ = [
    "GeoPoint",
    "haversine_km",
    "CandidateProfile",
    "CompanyProfile",
    "MatchResult",
    "ScoringConfig",
    "rank_companies",
    "score_pair",
    "fit_tfidf",
    "similarity",
    "tokenize_it",
    "__version__",
]
