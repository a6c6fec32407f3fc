"""Report payload builders shared by the CLI and the HTTP API.

Display rounding happens here and only here: t/c/f/expectation to three
decimals, equivalent vulnerability counts to whole numbers.  Everything
upstream (snapshots, composition) keeps full precision.
"""

from __future__ import annotations

import csv
from typing import Mapping, Sequence

from .assessment import ComparisonReport, ComponentAssessment, TrustParams
from .systems import SystemAssessment, SystemSpec, atom_names


def component_payload(assessment: ComponentAssessment) -> dict:
    return {
        "component": assessment.component,
        "t": round(assessment.opinion.t, 3),
        "c": round(assessment.opinion.c, 3),
        "f": round(assessment.opinion.f, 3),
        "expectation": round(assessment.expectation, 3),
        "equivalent_vulns": round(assessment.equivalent_vulns),
    }


def assessment_report(assessments: Mapping[str, ComponentAssessment], params: TrustParams) -> dict:
    return {
        "params": params.as_dict(),
        "components": [component_payload(assessments[name]) for name in sorted(assessments)],
    }


def system_payload(
    assessment: SystemAssessment,
    spec: SystemSpec,
    assessments: Mapping[str, ComponentAssessment],
) -> dict:
    atoms = sorted(set(atom_names(spec.formula)))
    return {
        "system": assessment.system,
        "t": round(assessment.opinion.t, 3),
        "c": round(assessment.opinion.c, 3),
        "f": round(assessment.opinion.f, 3),
        "expectation": round(assessment.expectation, 3),
        "equivalent_vulns": round(assessment.equivalent_vulns),
        "simplification_log": list(assessment.simplification_log),
        "components": [component_payload(assessments[name]) for name in atoms],
    }


def comparison_payload(report: ComparisonReport, a: dict, b: dict) -> dict:
    out = {
        "a": a,
        "b": b,
        "ratio_equivalent": round(report.ratio_equivalent, 3),
    }
    if report.ratio_actual is not None:
        out["ratio_actual"] = round(report.ratio_actual, 3)
        out["norm_error"] = round(report.norm_error, 3)
    return out


def write_top_csv(path: str, rows: Sequence[tuple[str, int, str]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["component", "count", "rank"])
        writer.writerows(rows)


def write_yearly_csv(path: str, totals: Mapping[int, int]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["year", "count"])
        for year in sorted(totals):
            writer.writerow([year, totals[year]])


def write_distribution_csv(path: str, pairs: Sequence[tuple[str, int]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["component", "total"])
        writer.writerows(pairs)


def write_history_csv(path: str, start: str, counts: Sequence[int]) -> None:
    from . import months

    base = months.parse_month(start)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["month", "count"])
        for offset, count in enumerate(counts):
            writer.writerow([months.format_month(base + offset), count])
