"""Statistical-parity auditing of recommendation rates across groups.

A candidate counts as "recommended" when the audited batch contains at
least one gate-passed result for them; the disparity is the max−min gap
between per-group recommendation rates.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParameterError
from .scoring import GATE_PASSED, CandidateProfile, MatchResult

GROUP_KEYS = ("disability_type", "education_level")


@dataclass(frozen=True)
class GroupRate:
    recommended_count: int
    total_count: int
    rate: float


@dataclass
class ParityReport:
    group_key: str
    group_rates: dict[str, GroupRate]
    disparity: float
    groups: list[str]


@dataclass(frozen=True)
class Alert:
    metric: str
    disparity: float
    threshold: float
    max_group: str
    max_rate: float
    min_group: str
    min_rate: float

    @property
    def message(self) -> str:
        return (
            f"statistical parity breach on {self.metric}: disparity {self.disparity:.3f} "
            f"> {self.threshold:.3f} (highest {self.max_group} at {self.max_rate:.3f}, "
            f"lowest {self.min_group} at {self.min_rate:.3f})"
        )


def parity_report(
    results: list[MatchResult],
    candidates: list[CandidateProfile],
    group_key: str,
) -> ParityReport:
    if group_key not in GROUP_KEYS:
        raise ParameterError(f"group_key must be one of {GROUP_KEYS}, got {group_key!r}")

    group_of = {c.id: str(getattr(c, group_key)) for c in candidates}
    recommended: set[str] = set()
    for r in results:
        if r.candidate_id not in group_of:
            raise ParameterError(f"result references unknown candidate {r.candidate_id!r}")
        if r.gate == GATE_PASSED:
            recommended.add(r.candidate_id)

    totals: dict[str, int] = {}
    hits: dict[str, int] = {}
    for c in candidates:
        g = group_of[c.id]
        totals[g] = totals.get(g, 0) + 1
        if c.id in recommended:
            hits[g] = hits.get(g, 0) + 1

    group_rates = {
        g: GroupRate(hits.get(g, 0), n, hits.get(g, 0) / n) for g, n in totals.items()
    }
    rates = [gr.rate for gr in group_rates.values() if gr.total_count > 0]
    disparity = max(rates) - min(rates) if rates else 0.0
    return ParityReport(
        group_key=group_key,
        group_rates=group_rates,
        disparity=disparity,
        groups=sorted(group_rates),
    )


def check_alert(report: ParityReport, max_disparity: float = 0.10) -> list[Alert]:
    """One alert per breach; the threshold itself does not trip it."""
    if report.disparity <= max_disparity:
        return []
    populated = {g: gr for g, gr in report.group_rates.items() if gr.total_count > 0}
    max_group = max(populated, key=lambda g: (populated[g].rate, g))
    min_group = min(populated, key=lambda g: (populated[g].rate, g))
    return [
        Alert(
            metric=report.group_key,
            disparity=report.disparity,
            threshold=max_disparity,
            max_group=max_group,
            max_rate=populated[max_group].rate,
            min_group=min_group,
            min_rate=populated[min_group].rate,
        )
    ]
