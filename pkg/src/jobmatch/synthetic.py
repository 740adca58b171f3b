"""Seeded probabilistic generation of candidates, companies and labeled pairs.

No distribution here is calibrated to real employment-center data; the
lexicons and probability tables are fixed, versioned artifacts so that a
(seed, params) pair always reproduces the same dataset byte for byte.
Every entity draws from its own PCG64 stream keyed by (seed, kind, index),
so generation can be partitioned across workers by entity index without
changing the output.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .geo import GeoPoint
from .learning import FEATURE_NAMES, featurize_pair
from .scoring import (
    DISABILITY_TYPES,
    GATE_PASSED,
    CandidateProfile,
    CompanyProfile,
    ScoringConfig,
    score_pair,
)
from .text_it import TfidfModel

_STREAM_CANDIDATE = 1
_STREAM_COMPANY = 2
_STREAM_PAIR = 3

# Candidates live in towns of the Verona commuting belt (centre plus a
# small jitter); companies are spread uniformly over the bounding box of
# the same belt, so most pairs sit within a realistic commute range.
_TOWNS = (
    ("verona", 45.4384, 10.9916),
    ("villafranca di verona", 45.3506, 10.8444),
    ("bussolengo", 45.4697, 10.8449),
    ("san giovanni lupatoto", 45.3833, 11.0423),
    ("san martino buon albergo", 45.4208, 11.0954),
    ("grezzana", 45.5167, 11.0167),
    ("sommacampagna", 45.4075, 10.8428),
    ("pescantina", 45.4833, 10.8667),
)

COMPANY_BBOX = (45.35, 45.52, 10.85, 11.15)  # lat_min, lat_max, lon_min, lon_max

_STREETS = ("via roma", "via garibaldi", "via mazzini", "via verdi", "corso italia", "via dante")


@dataclass(frozen=True, slots=True)
class GenParams:
    n_candidates: int
    n_companies: int
    seed: int
    noise: float = 0.05

    def __post_init__(self):
        if self.n_candidates < 0 or self.n_companies < 0:
            raise ValueError("entity counts must be non-negative")
        if self.noise < 0:
            raise ValueError("noise must be >= 0")


@dataclass(frozen=True, slots=True)
class LabeledPair:
    features: tuple[float, ...]
    label: int
    p_true: float


@lru_cache(maxsize=1)
def task_lexicon() -> tuple[str, ...]:
    text = resources.files("jobmatch.data").joinpath("task_lexicon.txt").read_text("utf-8")
    return tuple(line.strip() for line in text.splitlines() if line.strip())


@lru_cache(maxsize=1)
def exclusion_lexicon() -> tuple[str, ...]:
    text = resources.files("jobmatch.data").joinpath("exclusion_lexicon.txt").read_text("utf-8")
    return tuple(line.strip() for line in text.splitlines() if line.strip())


@lru_cache(maxsize=1)
def sector_list() -> tuple[str, ...]:
    text = resources.files("jobmatch.data").joinpath("sectors.txt").read_text("utf-8")
    return tuple(line.strip() for line in text.splitlines() if line.strip())


@lru_cache(maxsize=1)
def education_table() -> dict[str, list[float]]:
    text = resources.files("jobmatch.data").joinpath("education_by_disability.json").read_text("utf-8")
    return json.loads(text)


def _rng(seed: int, stream: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream, index])))


def _sample_town_location(rng: np.random.Generator) -> tuple[str, GeoPoint]:
    town, lat, lon = _TOWNS[rng.integers(len(_TOWNS))]
    point = GeoPoint(lat + rng.normal(0.0, 0.015), lon + rng.normal(0.0, 0.015))
    street = _STREETS[rng.integers(len(_STREETS))]
    number = int(rng.integers(1, 120))
    return f"{street} {number}, {town}", point


def _sample_box_location(rng: np.random.Generator) -> tuple[str, GeoPoint]:
    lat_min, lat_max, lon_min, lon_max = COMPANY_BBOX
    point = GeoPoint(float(rng.uniform(lat_min, lat_max)), float(rng.uniform(lon_min, lon_max)))
    street = _STREETS[rng.integers(len(_STREETS))]
    number = int(rng.integers(1, 120))
    return f"{street} {number}, provincia di verona", point


def _gen_candidate(index: int, p: GenParams) -> CandidateProfile:
    rng = _rng(p.seed, _STREAM_CANDIDATE, index)
    address, residence = _sample_town_location(rng)
    # Only education depends on the disability type; everything else is
    # drawn independently so recommendation rates stay symmetric by group.
    disability = DISABILITY_TYPES[rng.integers(len(DISABILITY_TYPES))]
    education = int(rng.choice(5, p=education_table()[disability]))
    attitude = float(rng.beta(2.0, 2.0))
    years_experience = round(float(rng.gamma(2.0, 2.0)), 1)
    unemployment_months = int(rng.poisson(10.0))
    activities = task_lexicon()
    n_skills = int(rng.integers(16, 21))
    skills = rng.choice(len(activities), size=min(n_skills, len(activities)), replace=False)
    # exclusions and physical capabilities partition the demand lexicon:
    # what the candidate rules out never reappears as a listed capability
    n_excl = int(rng.choice([0, 1, 2, 3], p=[0.45, 0.35, 0.15, 0.05]))
    lexicon = exclusion_lexicon()
    excl_idx = set(int(i) for i in rng.choice(len(lexicon), size=n_excl, replace=False))
    remaining = [i for i in range(len(lexicon)) if i not in excl_idx]
    n_cap = min(int(rng.integers(2, 6)), len(remaining))
    cap_idx = rng.choice(len(remaining), size=n_cap, replace=False)
    skill_parts = [activities[i] for i in sorted(skills)]
    skill_parts.extend(lexicon[remaining[i]] for i in sorted(cap_idx))
    return CandidateProfile(
        id=f"c{index:05d}",
        address=address,
        residence=residence,
        education_level=education,
        disability_type=disability,
        attitude=attitude,
        years_experience=years_experience,
        unemployment_months=unemployment_months,
        skills_text=", ".join(skill_parts),
        exclusions=[lexicon[i] for i in sorted(excl_idx)],
    )


def _gen_company(index: int, p: GenParams) -> CompanyProfile:
    rng = _rng(p.seed, _STREAM_COMPANY, index)
    address, location = _sample_box_location(rng)
    sectors = sector_list()
    sector = sectors[rng.integers(len(sectors))]
    activities = task_lexicon()
    n_tasks = int(rng.integers(15, 19))
    tasks = rng.choice(len(activities), size=min(n_tasks, len(activities)), replace=False)
    parts = [activities[i] for i in sorted(tasks)]
    lexicon = exclusion_lexicon()
    n_demands = int(rng.choice([0, 1, 2], p=[0.55, 0.35, 0.10]))
    demand_idx = rng.choice(len(lexicon), size=n_demands, replace=False)
    parts.extend(lexicon[i] for i in sorted(demand_idx))
    return CompanyProfile(
        id=f"a{index:05d}",
        name=f"azienda {sector} {index}",
        address=address,
        location=location,
        sector=sector,
        employee_count=1 + int(rng.lognormal(2.5, 1.0)),
        open_positions=int(rng.poisson(1.5)),
        tasks_text=", ".join(parts),
        remote_available=bool(rng.random() < 0.55),
        certified=bool(rng.random() < 0.7),
        past_disability_hires=int(rng.poisson(4.0)),
    )


def gen_candidates(p: GenParams) -> list[CandidateProfile]:
    return [_gen_candidate(i, p) for i in range(p.n_candidates)]


def gen_companies(p: GenParams) -> list[CompanyProfile]:
    return [_gen_company(i, p) for i in range(p.n_companies)]


def _pair_outcome(
    rng: np.random.Generator, final: float, passed: bool, noise: float
) -> tuple[float, int]:
    if passed:
        p_true = 0.05 + 0.90 * final + float(rng.normal(0.0, noise))
    else:
        p_true = 0.02 + float(rng.normal(0.0, noise / 2.0))
    p_true = min(1.0, max(0.0, p_true))
    label = 1 if rng.random() < p_true else 0
    return p_true, label


def gen_labeled_pairs(
    cands: list[CandidateProfile],
    comps: list[CompanyProfile],
    p: GenParams,
    tfidf: TfidfModel,
    cfg: ScoringConfig,
) -> list[LabeledPair]:
    """Bernoulli-labeled cross product of the two populations.

    Success probability follows the match score for gate-passed pairs
    (affine squash 0.05..0.95 plus Gaussian noise) and hugs zero for gated
    pairs. p_true is retained so calibration can be tested against the
    generating probability.
    """
    pairs: list[LabeledPair] = []
    n_comps = len(comps)
    for i, cand in enumerate(cands):
        for j, comp in enumerate(comps):
            result = score_pair(cand, comp, tfidf, cfg)
            rng = _rng(p.seed, _STREAM_PAIR, i * n_comps + j)
            p_true, label = _pair_outcome(rng, result.final, result.gate == GATE_PASSED, p.noise)
            features = featurize_pair(cand, comp, tfidf, cfg)
            pairs.append(LabeledPair(features=features, label=label, p_true=p_true))
    return pairs


PAIR_COLUMNS = list(FEATURE_NAMES) + ["label", "p_true"]


def write_pairs_csv(pairs: list[LabeledPair], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(PAIR_COLUMNS)
        for pair in pairs:
            writer.writerow([repr(x) for x in pair.features] + [pair.label, repr(pair.p_true)])


def load_pairs_csv(path: str) -> list[LabeledPair]:
    pairs: list[LabeledPair] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            features = tuple(float(row[name]) for name in FEATURE_NAMES)
            pairs.append(LabeledPair(features=features, label=int(row["label"]), p_true=float(row["p_true"])))
    return pairs
