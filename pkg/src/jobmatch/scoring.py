"""Multi-dimensional weighted scoring with hard gates.

A candidate/company pair passes four gates in a fixed order (exclusion,
attitude, distance, compatibility) and is then scored as the weighted
mean of four components: semantic compatibility, distance factor,
attitude and company inclusion factor. Weights default to 35/25/20/15
and are renormalized by their sum so the final score stays in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

from .errors import ConfigError, ScoringError
from .geo import EARTH_RADIUS_KM, GeoPoint, haversine_km
from .text_it import ScreeningResult, TfidfModel, exclusion_screen, similarity, tokenize_it

DISABILITY_TYPES = (
    "motoria",
    "visiva",
    "uditiva",
    "intellettiva",
    "psichica",
    "altro",
)

EDUCATION_LEVELS = (0, 1, 2, 3, 4)  # none, primary, secondary, diploma, degree

GATE_PASSED = "passed"
GATE_EXCLUDED = "excluded_by_tasks"
GATE_ATTITUDE = "below_attitude"
GATE_DISTANCE = "beyond_distance"
GATE_COMPAT = "below_compatibility"

GATES = (GATE_PASSED, GATE_EXCLUDED, GATE_ATTITUDE, GATE_DISTANCE, GATE_COMPAT)


@dataclass(slots=True)
class CandidateProfile:
    id: str
    address: str = ""
    residence: GeoPoint | None = None
    education_level: int = 0
    disability_type: str = "altro"
    attitude: float = 0.5
    years_experience: float = 0.0
    unemployment_months: int = 0
    skills_text: str = ""
    exclusions: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.id:
            raise ValueError("candidate id is required")
        if not 0.0 <= self.attitude <= 1.0:
            raise ValueError(f"attitude {self.attitude} outside [0, 1]")
        if self.education_level not in EDUCATION_LEVELS:
            raise ValueError(f"education_level {self.education_level} not in {EDUCATION_LEVELS}")
        if self.disability_type not in DISABILITY_TYPES:
            raise ValueError(f"unknown disability_type {self.disability_type!r}")
        if self.years_experience < 0:
            raise ValueError("years_experience must be >= 0")
        if self.unemployment_months < 0:
            raise ValueError("unemployment_months must be >= 0")


@dataclass(slots=True)
class CompanyProfile:
    id: str
    name: str = ""
    address: str = ""
    location: GeoPoint | None = None
    sector: str = "servizi"
    employee_count: int = 1
    open_positions: int = 0
    tasks_text: str = ""
    remote_available: bool = False
    certified: bool = False
    past_disability_hires: int = 0

    def __post_init__(self):
        if not self.id:
            raise ValueError("company id is required")
        if self.employee_count < 1:
            raise ValueError("employee_count must be >= 1")
        if self.open_positions < 0:
            raise ValueError("open_positions must be >= 0")
        if self.past_disability_hires < 0:
            raise ValueError("past_disability_hires must be >= 0")


@dataclass(frozen=True, slots=True)
class ScoringConfig:
    """Weights and the three operator thresholds.

    The published component weights sum to 0.95; the final score divides
    by the actual weight sum so it remains a convex combination.
    """

    w_compat: float = 0.35
    w_dist: float = 0.25
    w_att: float = 0.20
    w_company: float = 0.15
    attitude_min: float = 0.0
    distance_max_km: float = 30.0
    compat_min: float = 0.0

    def __post_init__(self):
        weights = (self.w_compat, self.w_dist, self.w_att, self.w_company)
        if any(w < 0 for w in weights):
            raise ConfigError(f"weights must be non-negative, got {weights}")
        if sum(weights) <= 0:
            raise ConfigError("at least one weight must be positive")
        if not 0.0 <= self.attitude_min <= 1.0:
            raise ConfigError(f"attitude_min {self.attitude_min} outside [0, 1]")
        if not 0.0 <= self.compat_min <= 1.0:
            raise ConfigError(f"compat_min {self.compat_min} outside [0, 1]")
        if not 5.0 <= self.distance_max_km <= 50.0:
            raise ConfigError(f"distance_max_km {self.distance_max_km} outside [5, 50]")

    @property
    def weight_sum(self) -> float:
        return self.w_compat + self.w_dist + self.w_att + self.w_company


@dataclass(slots=True)
class MatchResult:
    candidate_id: str
    company_id: str
    compat: float
    dist_factor: float
    attitude: float
    company_factor: float
    distance_km: float
    final: float
    gate: str
    explanation: dict[str, float]


def distance_factor(d_km: float, d_max: float) -> float:
    """Linear decay: 1 at the doorstep, 0 at or beyond d_max."""
    if d_max <= 0:
        raise ConfigError(f"d_max must be positive, got {d_max}")
    if d_km < 0:
        raise ValueError(f"distance must be non-negative, got {d_km}")
    return min(1.0, max(0.0, 1.0 - d_km / d_max))


def company_factor(c: CompanyProfile) -> float:
    """Inclusion track record: certification, remote work, past hires."""
    hires = min(1.0, c.past_disability_hires / 5.0)
    return 0.4 * float(c.certified) + 0.3 * float(c.remote_available) + 0.3 * hires


@lru_cache(maxsize=65536)
def _task_tokens(text: str) -> frozenset[str]:
    return frozenset(tokenize_it(text))


@lru_cache(maxsize=16384)
def _exclusion_tokens(exclusions: tuple[str, ...]) -> tuple[tuple[str, ...], ...]:
    return tuple(tuple(tokenize_it(p)) for p in exclusions)


def _require_inputs(cand: CandidateProfile, comp: CompanyProfile, tfidf: TfidfModel | None) -> None:
    if tfidf is None:
        raise ScoringError("tfidf model is not fitted")
    if cand.residence is None:
        raise ScoringError(f"candidate {cand.id} has no geocoded residence")
    if comp.location is None:
        raise ScoringError(f"company {comp.id} has no geocoded location")


def score_pair(
    cand: CandidateProfile,
    comp: CompanyProfile,
    tfidf: TfidfModel,
    cfg: ScoringConfig,
) -> MatchResult:
    """Score one pair: gates in order, then the renormalized weighted mean."""
    _require_inputs(cand, comp, tfidf)

    screening: ScreeningResult = exclusion_screen(cand.exclusions, comp.tasks_text)
    compat = similarity(tfidf, cand.skills_text, comp.tasks_text)
    d_km = haversine_km(cand.residence, comp.location)
    d_factor = distance_factor(d_km, cfg.distance_max_km)
    c_factor = company_factor(comp)

    if screening.excluded:
        gate = GATE_EXCLUDED
    elif cand.attitude < cfg.attitude_min:
        gate = GATE_ATTITUDE
    elif d_km > cfg.distance_max_km:
        gate = GATE_DISTANCE
    elif compat < cfg.compat_min:
        gate = GATE_COMPAT
    else:
        gate = GATE_PASSED

    wsum = cfg.weight_sum
    if gate == GATE_PASSED:
        final = (
            cfg.w_compat * compat
            + cfg.w_dist * d_factor
            + cfg.w_att * cand.attitude
            + cfg.w_company * c_factor
        ) / wsum
        explanation = {
            "compat": cfg.w_compat * compat / wsum,
            "dist_factor": cfg.w_dist * d_factor / wsum,
            "attitude": cfg.w_att * cand.attitude / wsum,
            "company_factor": cfg.w_company * c_factor / wsum,
        }
    else:
        final = 0.0
        explanation = {"compat": 0.0, "dist_factor": 0.0, "attitude": 0.0, "company_factor": 0.0}

    return MatchResult(
        candidate_id=cand.id,
        company_id=comp.id,
        compat=compat,
        dist_factor=d_factor,
        attitude=cand.attitude,
        company_factor=c_factor,
        distance_km=d_km,
        final=final,
        gate=gate,
        explanation=explanation,
    )


def rank_companies(
    cand: CandidateProfile,
    companies: list[CompanyProfile],
    tfidf: TfidfModel,
    cfg: ScoringConfig,
    k: int,
) -> list[MatchResult]:
    """Top-k gate-passed matches, best first.

    Ties on the final score go to the nearer company, then to the
    lexicographically smaller company id. The arithmetic is identical to
    score_pair; this loop only hoists per-candidate work (cached vectors,
    tokenized exclusions) out of the inner iteration.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if tfidf is None:
        raise ScoringError("tfidf model is not fitted")
    if cand.residence is None:
        raise ScoringError(f"candidate {cand.id} has no geocoded residence")

    cand_vec = tfidf.vector(cand.skills_text)
    excl_toks = tuple(t for t in _exclusion_tokens(tuple(cand.exclusions)) if t)
    attitude = cand.attitude
    att_min = cfg.attitude_min
    d_max = cfg.distance_max_km
    c_min = cfg.compat_min
    w_c, w_d, w_a, w_f = cfg.w_compat, cfg.w_dist, cfg.w_att, cfg.w_company
    wsum = cfg.weight_sum
    residence = cand.residence
    # hoisted candidate-side constants for the inlined haversine; the float
    # expressions below are kept identical to haversine_km so results match
    # score_pair bit for bit
    cand_lat, cand_lon = residence.lat, residence.lon
    rlat1 = math.radians(cand_lat)
    cos_lat1 = math.cos(rlat1)
    radians, sin, cos, asin, sqrt = math.radians, math.sin, math.cos, math.asin, math.sqrt
    vector = tfidf.vector
    cand_len = len(cand_vec)
    cand_items = tuple(cand_vec.items())

    passed: list[tuple] = []
    for index, comp in enumerate(companies):
        loc = comp.location
        if loc is None:
            raise ScoringError(f"company {comp.id} has no geocoded location")
        if excl_toks:
            task_toks = _task_tokens(comp.tasks_text)
            excluded = False
            for toks in excl_toks:
                for t in toks:
                    if t not in task_toks:
                        break
                else:
                    excluded = True
                    break
            if excluded:
                continue
        if attitude < att_min:
            continue
        h = (
            sin(radians(loc.lat - cand_lat) / 2.0) ** 2
            + cos_lat1 * cos(radians(loc.lat)) * sin(radians(loc.lon - cand_lon) / 2.0) ** 2
        )
        d_km = 2.0 * EARTH_RADIUS_KM * asin(min(1.0, sqrt(h)))
        if d_km > d_max:
            continue
        comp_vec = vector(comp.tasks_text)
        compat = 0.0
        if cand_len <= len(comp_vec):
            get = comp_vec.get
            for t, w in cand_items:
                compat += w * get(t, 0.0)
        else:
            get = cand_vec.get
            for t, w in comp_vec.items():
                compat += w * get(t, 0.0)
        if compat < c_min:
            continue
        d_factor = min(1.0, max(0.0, 1.0 - d_km / d_max))
        hires = min(1.0, comp.past_disability_hires / 5.0)
        c_factor = 0.4 * float(comp.certified) + 0.3 * float(comp.remote_available) + 0.3 * hires
        final = (w_c * compat + w_d * d_factor + w_a * attitude + w_f * c_factor) / wsum
        # tuple compares give the ranking order directly: final desc, then
        # distance asc, then company id asc; the index keeps comparisons
        # from ever reaching the profile object
        passed.append((-final, d_km, comp.id, index, compat, d_factor, c_factor, comp))

    passed.sort()
    results = []
    for neg_final, d_km, comp_id, _, compat, d_factor, c_factor, comp in passed[:k]:
        final = -neg_final
        results.append(
            MatchResult(
                candidate_id=cand.id,
                company_id=comp_id,
                compat=compat,
                dist_factor=d_factor,
                attitude=attitude,
                company_factor=c_factor,
                distance_km=d_km,
                final=final,
                gate=GATE_PASSED,
                explanation={
                    "compat": w_c * compat / wsum,
                    "dist_factor": w_d * d_factor / wsum,
                    "attitude": w_a * attitude / wsum,
                    "company_factor": w_f * c_factor / wsum,
                },
            )
        )
    return results


CONFIG_KEYS = (
    "w_compat",
    "w_dist",
    "w_att",
    "w_company",
    "attitude_min",
    "distance_max_km",
    "compat_min",
)


def save_config(cfg: ScoringConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for key in CONFIG_KEYS:
            fh.write(f"{key} = {getattr(cfg, key)!r}\n")


def load_config(path: str) -> ScoringConfig:
    """Parse a flat ``key = value`` config file; unknown keys rejected."""
    values: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in CONFIG_KEYS:
                raise ConfigError(f"line {lineno}: unknown config key {key!r}")
            try:
                values[key] = float(value.strip())
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: bad number for {key}: {value.strip()!r}") from exc
    return ScoringConfig(**values)


def with_overrides(cfg: ScoringConfig, overrides: dict[str, float]) -> ScoringConfig:
    """Apply per-request overrides; validation happens in the constructor."""
    unknown = set(overrides) - set(CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return replace(cfg, **overrides)
