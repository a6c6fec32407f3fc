"""Shared fixtures: a synthetic dataset reproducing the published ranking.

TOP20 mirrors the all-time / 2015-2016 counts of the twenty most
vulnerable packages; records are spread deterministically over the
epoch so the group statistics (totals, reference-window counts) match
the table exactly while individual dates stay synthetic.
"""

from __future__ import annotations

import datetime as dt

import pytest

from vulntrust.history import Dataset, VulnRecord

# (component, all-time total 2001-2016, count in 2015-2016)
TOP20 = [
    ("linux", 1303, 144),
    ("firefox-esr", 815, 153),
    ("chromium-browser", 496, 297),
    ("openjdk-8", 353, 121),
    ("icedove", 347, 89),
    ("wireshark", 261, 87),
    ("php7.0", 258, 86),
    ("mysql-transitional", 221, 63),
    ("xulrunner", 211, 0),
    ("iceape", 178, 0),
    ("openssl", 145, 50),
    ("qemu", 134, 70),
    ("xen", 113, 52),
    ("wordpress", 110, 38),
    ("tomcat8", 99, 48),
    ("imagemagick", 95, 57),
    ("krb5", 89, 10),
    ("typo3-src", 77, 1),
    ("ruby2.3", 75, 5),
    ("postgresql-9.6", 75, 19),
]

# beneath the top group: (component, all-time total, count in 2015-2016)
MID_TIER = [
    ("midpkg-a", 40, 12),
    ("midpkg-b", 24, 6),
    ("midpkg-c", 9, 0),
]


def spread_records(component: str, count: int, start_year: int, end_year: int, tag: str):
    """Deterministically spread `count` records over whole months of a year span."""
    records = []
    months_available = (end_year - start_year + 1) * 12
    for i in range(count):
        month_slot = i % months_available
        year = start_year + month_slot // 12
        month = month_slot % 12 + 1
        records.append(
            VulnRecord(component, f"CVE-{tag}-{component}-{i}", dt.date(year, month, 10))
        )
    return records


def build_ranked_dataset() -> Dataset:
    records = []
    for component, total, recent in TOP20 + MID_TIER:
        records.extend(spread_records(component, recent, 2015, 2016, "r"))
        records.extend(spread_records(component, total - recent, 2001, 2014, "o"))
    return Dataset(records=tuple(records), epoch=("2001-01", "2017-09"))


@pytest.fixture(scope="session")
def ranked_dataset() -> Dataset:
    return build_ranked_dataset()
