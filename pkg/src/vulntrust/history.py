"""Vulnerability-history evidence: ingestion, monthly series, descriptive stats.

The canonical evidence unit is one (component, CVE id, published date)
record; a CVE affecting k components yields k records.  Records are
binned into per-component monthly count series over a configurable
epoch window, from which the ranking/summary statistics are derived.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from . import months
from .errors import (
    EmptyDatasetError,
    MissingDatesError,
    ParseError,
    UnknownComponentError,
)

DEFAULT_EPOCH = ("2001-01", "2017-09")

CSV_HEADER = ["component", "cve_id", "published"]


@dataclass(frozen=True)
class VulnRecord:
    component: str
    cve_id: str
    published: dt.date


@dataclass(frozen=True)
class VulnSeries:
    """Monthly vulnerability counts for one component over the epoch."""

    component: str
    start: str  # YYYY-MM of counts[0]
    counts: tuple[int, ...]

    def total(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class IngestReport:
    rows_total: int = 0
    records: int = 0
    duplicates_collapsed: int = 0
    undated_skipped: int = 0
    out_of_epoch_skipped: int = 0

    def as_dict(self) -> dict:
        return {
            "rows_total": self.rows_total,
            "records": self.records,
            "duplicates_collapsed": self.duplicates_collapsed,
            "undated_skipped": self.undated_skipped,
            "out_of_epoch_skipped": self.out_of_epoch_skipped,
        }


@dataclass(frozen=True)
class Dataset:
    """Immutable set of vulnerability records within an epoch window."""

    records: tuple[VulnRecord, ...]
    epoch: tuple[str, str] = DEFAULT_EPOCH
    report: IngestReport = field(default_factory=IngestReport, compare=False)

    @property
    def epoch_start(self) -> int:
        return months.parse_month(self.epoch[0])

    @property
    def epoch_end(self) -> int:
        return months.parse_month(self.epoch[1])

    def components(self) -> list[str]:
        return sorted({r.component for r in self.records})

    def records_for(self, component: str) -> list[VulnRecord]:
        return [r for r in self.records if r.component == component]

    def totals(self, window: tuple[str, str] | None = None) -> dict[str, int]:
        """Record count per component, optionally restricted to a month window."""
        if window is None:
            lo, hi = self.epoch_start, self.epoch_end
        else:
            lo, hi = months.parse_month(window[0]), months.parse_month(window[1])
        out: dict[str, int] = {}
        for r in self.records:
            m = months.month_of(r.published)
            if lo <= m <= hi:
                out[r.component] = out.get(r.component, 0) + 1
        return out

    def filtered(
        self,
        packages: Iterable[str] | None = None,
        start: str | None = None,
        end: str | None = None,
    ) -> "Dataset":
        """Restrict to a package set and/or month window; epoch shrinks with it."""
        keep = set(packages) if packages is not None else None
        lo = months.parse_month(start) if start else self.epoch_start
        hi = months.parse_month(end) if end else self.epoch_end
        records = tuple(
            r
            for r in self.records
            if (keep is None or r.component in keep) and lo <= months.month_of(r.published) <= hi
        )
        return Dataset(records=records, epoch=(months.format_month(lo), months.format_month(hi)), report=self.report)


def _dedup(records: Iterable[VulnRecord]) -> tuple[list[VulnRecord], int]:
    """Collapse duplicate (component, cve_id) pairs, keeping the earliest date."""
    best: dict[tuple[str, str], VulnRecord] = {}
    total = 0
    for r in records:
        total += 1
        key = (r.component, r.cve_id)
        kept = best.get(key)
        if kept is None or r.published < kept.published:
            best[key] = r
    deduped = sorted(best.values(), key=lambda r: (r.component, r.cve_id))
    return deduped, total - len(deduped)


def _build_dataset(
    raw: list[VulnRecord],
    epoch: tuple[str, str],
    rows_total: int,
    undated_skipped: int = 0,
) -> Dataset:
    deduped, dupes = _dedup(raw)
    lo, hi = months.parse_month(epoch[0]), months.parse_month(epoch[1])
    in_epoch = [r for r in deduped if lo <= months.month_of(r.published) <= hi]
    if not in_epoch:
        raise EmptyDatasetError("no records within the dataset epoch")
    report = IngestReport(
        rows_total=rows_total,
        records=len(in_epoch),
        duplicates_collapsed=dupes,
        undated_skipped=undated_skipped,
        out_of_epoch_skipped=len(deduped) - len(in_epoch),
    )
    return Dataset(records=tuple(in_epoch), epoch=epoch, report=report)


def _parse_date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError as exc:
        raise ValueError(f"bad date {text!r}") from exc


def ingest_csv(path: str, epoch: tuple[str, str] = DEFAULT_EPOCH) -> Dataset:
    """Load the canonical `component,cve_id,published` CSV.

    Malformed rows are fatal: a ParseError cites the offending row
    number (1-based, header is row 1).

    Raises:
        ParseError: wrong header, wrong column count, or a bad date.
        EmptyDatasetError: no rows survive.
    """
    raw: list[VulnRecord] = []
    rows_total = 0
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDatasetError(f"{path}: empty file") from None
        if [h.strip() for h in header] != CSV_HEADER:
            raise ParseError(f"expected header {','.join(CSV_HEADER)!r}", row=1, path=path)
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue  # blank line
            if len(row) != 3:
                raise ParseError(f"expected 3 columns, got {len(row)}", row=lineno, path=path)
            component, cve_id, published = (cell.strip() for cell in row)
            if not component or not cve_id:
                raise ParseError("empty component or cve_id", row=lineno, path=path)
            try:
                date = _parse_date(published)
            except ValueError as exc:
                raise ParseError(str(exc), row=lineno, path=path) from None
            rows_total += 1
            raw.append(VulnRecord(component, cve_id, date))
    if not raw:
        raise EmptyDatasetError(f"{path}: no data rows")
    return _build_dataset(raw, epoch, rows_total)


def ingest_tracker_json(
    path: str,
    cve_dates: str,
    epoch: tuple[str, str] = DEFAULT_EPOCH,
) -> Dataset:
    """Adapt a security-tracker-style export: package -> {cve_id: ...}.

    Publication dates come from the companion `cve_id,published` CSV;
    undated CVEs are skipped and counted, not fatal, unless more than
    half of all referenced CVEs lack a usable date.

    Raises:
        ParseError: malformed JSON / dates CSV.
        MissingDatesError: > 50% of CVEs undated.
        EmptyDatasetError: nothing ingestible.
    """
    dates: dict[str, dt.date] = {}
    with open(cve_dates, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if lineno == 1 and [h.strip().lower() for h in row] == ["cve_id", "published"]:
                continue
            if len(row) != 2:
                raise ParseError(f"expected 2 columns, got {len(row)}", row=lineno, path=cve_dates)
            try:
                dates[row[0].strip()] = _parse_date(row[1])
            except ValueError as exc:
                raise ParseError(str(exc), row=lineno, path=cve_dates) from None

    try:
        with open(path, encoding="utf-8") as fh:
            tree = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", path=path) from None
    if not isinstance(tree, dict):
        raise ParseError("top level must be an object mapping package to CVEs", path=path)
    if not tree:
        raise EmptyDatasetError(f"{path}: no packages")

    raw: list[VulnRecord] = []
    pairs = 0
    undated = 0
    referenced: set[str] = set()
    for package, cves in tree.items():
        if not isinstance(cves, dict):
            raise ParseError(f"package {package!r} must map to an object of CVE ids", path=path)
        for cve_id in cves:
            pairs += 1
            referenced.add(cve_id)
            date = dates.get(cve_id)
            if date is None:
                undated += 1
                continue
            raw.append(VulnRecord(package, cve_id, date))

    undated_cves = sum(1 for c in referenced if c not in dates)
    if referenced and undated_cves * 2 > len(referenced):
        raise MissingDatesError(
            f"{undated_cves} of {len(referenced)} CVEs have no published date"
        )
    if not raw:
        raise EmptyDatasetError(f"{path}: no datable records")
    return _build_dataset(raw, epoch, rows_total=pairs, undated_skipped=undated)


def load_filter(path: str) -> dict:
    """Read the optional {"packages": [...], "start": ..., "end": ...} filter."""
    with open(path, encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}", path=path) from None
    if not isinstance(spec, dict):
        raise ParseError("filter must be a JSON object", path=path)
    out = {
        "packages": spec.get("packages"),
        "start": spec.get("start"),
        "end": spec.get("end"),
    }
    if out["packages"] is not None and not isinstance(out["packages"], list):
        raise ParseError("'packages' must be a list", path=path)
    return out


def bin_monthly(dataset: Dataset, component: str) -> VulnSeries:
    """Monthly counts for one component over the full epoch window.

    Raises:
        UnknownComponentError: component has no records in the epoch.
    """
    lo, hi = dataset.epoch_start, dataset.epoch_end
    counts = [0] * months.span(lo, hi)
    seen = False
    for r in dataset.records:
        if r.component != component:
            continue
        seen = True
        counts[months.month_of(r.published) - lo] += 1
    if not seen:
        raise UnknownComponentError(component)
    return VulnSeries(component=component, start=dataset.epoch[0], counts=tuple(counts))


def yearly_totals(dataset: Dataset) -> dict[int, int]:
    """Record count per calendar year, ascending by year."""
    out: dict[int, int] = {}
    for r in dataset.records:
        out[r.published.year] = out.get(r.published.year, 0) + 1
    return dict(sorted(out.items()))


def avg_per_affected(dataset: Dataset, year: int) -> float:
    """Mean records per component among components hit in that year."""
    total = 0
    affected: set[str] = set()
    for r in dataset.records:
        if r.published.year == year:
            total += 1
            affected.add(r.component)
    if not affected:
        return 0.0
    return total / len(affected)


def top_n(
    dataset: Dataset,
    n: int,
    window: tuple[str, str] | None = None,
) -> list[tuple[str, int, str]]:
    """Top components by count, with tie ranks rendered as "k1-k2".

    Ties share a rank string spanning the whole tie group in the full
    ranking (e.g. three components tied behind 4 others all rank
    "5-7"); within a tie group components sort alphabetically.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    totals = dataset.totals(window)
    ordered = sorted(totals.items(), key=lambda item: (-item[1], item[0]))
    out: list[tuple[str, int, str]] = []
    i = 0
    while i < len(ordered) and len(out) < n:
        j = i
        while j < len(ordered) and ordered[j][1] == ordered[i][1]:
            j += 1
        rank = str(i + 1) if j - i == 1 else f"{i + 1}-{j}"
        for component, count in ordered[i:j]:
            if len(out) == n:
                break
            out.append((component, count, rank))
        i = j
    return out


def distribution_export(dataset: Dataset, min_count: int) -> list[tuple[str, int]]:
    """Per-component totals, descending, filtered to totals >= min_count."""
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    totals = dataset.totals()
    return sorted(
        ((c, t) for c, t in totals.items() if t >= min_count),
        key=lambda item: (-item[1], item[0]),
    )


def write_csv(dataset: Dataset, path: str) -> None:
    """Persist in the canonical CSV schema (stable ordering)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in sorted(dataset.records, key=lambda r: (r.component, r.cve_id)):
            writer.writerow([r.component, r.cve_id, r.published.isoformat()])
