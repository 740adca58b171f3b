import pytest

from jobmatch.geo import GeoPoint
from jobmatch.scoring import CandidateProfile, CompanyProfile, ScoringConfig
from jobmatch.text_it import fit_tfidf

# Hand-checked 3-document corpus: d1/d2 and d1/d3 each share exactly one
# common term (df=2), d2/d3 share nothing.
TOY_CORPUS = [
    "assemblaggio componenti meccanici",
    "assemblaggio manuale pezzi",
    "controllo qualità componenti",
]


@pytest.fixture(scope="session")
def toy_model():
    return fit_tfidf(TOY_CORPUS)


def make_candidate(**kwargs) -> CandidateProfile:
    defaults = dict(
        id="c1",
        address="via roma 1, verona",
        residence=GeoPoint(45.4384, 10.9916),
        education_level=2,
        disability_type="motoria",
        attitude=0.7,
        years_experience=3.0,
        unemployment_months=6,
        skills_text="assemblaggio componenti meccanici",
        exclusions=[],
    )
    defaults.update(kwargs)
    return CandidateProfile(**defaults)


def make_company(**kwargs) -> CompanyProfile:
    defaults = dict(
        id="a1",
        name="officina uno",
        address="via verdi 10, verona",
        location=GeoPoint(45.44, 11.00),
        sector="manifatturiero",
        employee_count=40,
        open_positions=2,
        tasks_text="assemblaggio componenti meccanici",
        remote_available=False,
        certified=True,
        past_disability_hires=1,
    )
    defaults.update(kwargs)
    return CompanyProfile(**defaults)


@pytest.fixture
def default_config():
    return ScoringConfig()
