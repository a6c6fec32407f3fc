"""Calendar-month arithmetic.

Months are handled as integer indices (year * 12 + month - 1) inside the
package and as ``YYYY-MM`` strings at every file/API boundary.
"""

from __future__ import annotations

import datetime as _dt
import re

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")


def month_index(year: int, month: int) -> int:
    if not 1 <= month <= 12:
        raise ValueError(f"month out of range: {month}")
    return year * 12 + month - 1


def parse_month(text: str) -> int:
    """Parse ``YYYY-MM`` to a month index."""
    m = _MONTH_RE.match(text)
    if m is None:
        raise ValueError(f"not a YYYY-MM month: {text!r}")
    return month_index(int(m.group(1)), int(m.group(2)))


def format_month(index: int) -> str:
    year, month0 = divmod(index, 12)
    return f"{year:04d}-{month0 + 1:02d}"


def month_of(date: _dt.date) -> int:
    return month_index(date.year, date.month)


def year_of(index: int) -> int:
    return index // 12


def span(start: int, end: int) -> int:
    """Number of months from start to end, both inclusive."""
    if end < start:
        raise ValueError(f"month range ends before it starts: {format_month(start)}..{format_month(end)}")
    return end - start + 1
