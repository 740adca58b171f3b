"""CSV ingestion and validation for candidate and company datasets.

Schemas (exact headers, UTF-8, RFC 4180 quoting, booleans true/false):

    candidates: id,address,lat,lon,education_level,disability_type,attitude,
                years_experience,unemployment_months,skills_text,exclusions
    companies:  id,name,address,lat,lon,sector,employee_count,open_positions,
                tasks_text,remote_available,certified,past_disability_hires

lat/lon may be empty; profiles without coordinates are geocoded later.
Exclusions are ``;``-separated within the single CSV field. Rows that
violate profile invariants are rejected individually with a line, field
and reason; a missing required column fails the whole file.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

from .errors import IngestError
from .geo import GeoPoint
from .scoring import CandidateProfile, CompanyProfile

CANDIDATE_COLUMNS = [
    "id",
    "address",
    "lat",
    "lon",
    "education_level",
    "disability_type",
    "attitude",
    "years_experience",
    "unemployment_months",
    "skills_text",
    "exclusions",
]

COMPANY_COLUMNS = [
    "id",
    "name",
    "address",
    "lat",
    "lon",
    "sector",
    "employee_count",
    "open_positions",
    "tasks_text",
    "remote_available",
    "certified",
    "past_disability_hires",
]


@dataclass
class ValidationReport:
    accepted_count: int = 0
    rejected: list[tuple[int, str, str]] = field(default_factory=list)


def _parse_bool(value: str, fieldname: str) -> bool:
    if value == "true":
        return True
    if value == "false":
        return False
    raise ValueError(f"{fieldname} must be true/false, got {value!r}")


def _parse_point(row: dict[str, str]) -> GeoPoint | None:
    lat_s, lon_s = row.get("lat", ""), row.get("lon", "")
    if not lat_s and not lon_s:
        return None
    if not lat_s or not lon_s:
        raise ValueError("lat and lon must be given together")
    return GeoPoint(float(lat_s), float(lon_s))


def _open_reader(path: str, required: list[str]):
    fh = open(path, newline="", encoding="utf-8")
    reader = csv.DictReader(fh)
    if reader.fieldnames is None:
        fh.close()
        raise IngestError(f"{path}: empty file, header required")
    missing = [c for c in required if c not in reader.fieldnames]
    if missing:
        fh.close()
        raise IngestError(f"{path}: missing required columns {missing}")
    return fh, reader


def parse_candidates_csv(path: str) -> tuple[list[CandidateProfile], ValidationReport]:
    fh, reader = _open_reader(path, CANDIDATE_COLUMNS)
    profiles: list[CandidateProfile] = []
    report = ValidationReport()
    with fh:
        for lineno, row in enumerate(reader, start=2):
            fieldname = ""
            try:
                fieldname = "id"
                if not row["id"]:
                    raise ValueError("missing id")
                fieldname = "lat/lon"
                residence = _parse_point(row)
                fieldname = "row"
                exclusions = [p for p in row["exclusions"].split(";") if p.strip()]
                profile = CandidateProfile(
                    id=row["id"],
                    address=row["address"],
                    residence=residence,
                    education_level=int(row["education_level"]),
                    disability_type=row["disability_type"],
                    attitude=float(row["attitude"]),
                    years_experience=float(row["years_experience"]),
                    unemployment_months=int(row["unemployment_months"]),
                    skills_text=row["skills_text"],
                    exclusions=exclusions,
                )
            except ValueError as exc:
                report.rejected.append((lineno, _offending_field(str(exc), fieldname), str(exc)))
                continue
            profiles.append(profile)
            report.accepted_count += 1
    return profiles, report


def parse_companies_csv(path: str) -> tuple[list[CompanyProfile], ValidationReport]:
    fh, reader = _open_reader(path, COMPANY_COLUMNS)
    profiles: list[CompanyProfile] = []
    report = ValidationReport()
    with fh:
        for lineno, row in enumerate(reader, start=2):
            fieldname = ""
            try:
                fieldname = "id"
                if not row["id"]:
                    raise ValueError("missing id")
                fieldname = "lat/lon"
                location = _parse_point(row)
                fieldname = "row"
                profile = CompanyProfile(
                    id=row["id"],
                    name=row["name"],
                    address=row["address"],
                    location=location,
                    sector=row["sector"],
                    employee_count=int(row["employee_count"]),
                    open_positions=int(row["open_positions"]),
                    tasks_text=row["tasks_text"],
                    remote_available=_parse_bool(row["remote_available"], "remote_available"),
                    certified=_parse_bool(row["certified"], "certified"),
                    past_disability_hires=int(row["past_disability_hires"]),
                )
            except ValueError as exc:
                report.rejected.append((lineno, _offending_field(str(exc), fieldname), str(exc)))
                continue
            profiles.append(profile)
            report.accepted_count += 1
    return profiles, report


_FIELD_HINTS = [
    "attitude",
    "education_level",
    "disability_type",
    "years_experience",
    "unemployment_months",
    "employee_count",
    "open_positions",
    "past_disability_hires",
    "remote_available",
    "certified",
    "latitude",
    "longitude",
]


def _offending_field(message: str, fallback: str) -> str:
    for hint in _FIELD_HINTS:
        if hint in message:
            return {"latitude": "lat", "longitude": "lon"}.get(hint, hint)
    return fallback


def write_candidates_csv(profiles: list[CandidateProfile], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CANDIDATE_COLUMNS)
        for p in profiles:
            writer.writerow(
                [
                    p.id,
                    p.address,
                    repr(p.residence.lat) if p.residence else "",
                    repr(p.residence.lon) if p.residence else "",
                    p.education_level,
                    p.disability_type,
                    repr(p.attitude),
                    repr(p.years_experience),
                    p.unemployment_months,
                    p.skills_text,
                    ";".join(p.exclusions),
                ]
            )


def write_companies_csv(profiles: list[CompanyProfile], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(COMPANY_COLUMNS)
        for p in profiles:
            writer.writerow(
                [
                    p.id,
                    p.name,
                    p.address,
                    repr(p.location.lat) if p.location else "",
                    repr(p.location.lon) if p.location else "",
                    p.sector,
                    p.employee_count,
                    p.open_positions,
                    p.tasks_text,
                    "true" if p.remote_available else "false",
                    "true" if p.certified else "false",
                    p.past_disability_hires,
                ]
            )
