"""Vulnerability-count prediction over a future horizon, with error estimates.

A prediction run is parameterized by a train/validate/test split over a
monthly series: the backend's statistic is fitted on the training window
only, the validation window (k months right after training) yields a
normalized error estimate, and the horizon (l months) is what the
returned count covers.

Backends: `average` (training-window mean), `ewma` (exponentially
weighted mean, most recent month weighing 1), and `external`
(pass-through of a predictions CSV produced elsewhere, e.g. by a
learned model).  All backends are pure functions of (series, split,
parameters).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from . import months
from .errors import (
    EmptyHistoryError,
    EmptyInputError,
    InvalidAlphaError,
    MissingPredictionError,
    NegativePredictionError,
    ParseError,
    WindowOutOfRangeError,
)
from .history import Dataset, VulnSeries, bin_monthly

DEFAULT_ALPHA = 0.1

PREDICTIONS_HEADER = ["component", "pred", "error"]


@dataclass(frozen=True)
class SplitSpec:
    """Timeline partition: training up to train_end (inclusive), then k
    validation months, then an l-month prediction horizon."""

    train_end: str = "2016-03"
    validation_months: int = 9
    horizon_months: int = 9

    def __post_init__(self) -> None:
        months.parse_month(self.train_end)  # validate format early
        if self.validation_months < 1 or self.horizon_months < 1:
            raise ValueError("validation_months and horizon_months must be >= 1")


@dataclass(frozen=True)
class PredictionResult:
    component: str
    pred: float
    error_estimate: float

    def __post_init__(self) -> None:
        if self.pred < 0 or self.error_estimate < 0:
            raise NegativePredictionError(
                f"{self.component}: pred and error must be nonnegative"
            )


def _windows(series: VulnSeries, split: SplitSpec) -> tuple[list[int], list[int]]:
    """(training counts, validation counts); validation must fit in the series."""
    start = months.parse_month(series.start)
    train_end = months.parse_month(split.train_end)
    if train_end < start:
        raise EmptyHistoryError(f"{series.component}: training window is empty")
    n_train = train_end - start + 1
    if n_train > len(series.counts):
        raise WindowOutOfRangeError(f"{series.component}: training window exceeds series")
    val_end = n_train + split.validation_months
    if val_end > len(series.counts):
        raise WindowOutOfRangeError(f"{series.component}: validation window exceeds series")
    return list(series.counts[:n_train]), list(series.counts[n_train:val_end])


def validation_error(series: VulnSeries, split: SplitSpec, predicted_validation: float) -> float:
    """Normalized prediction error over the validation window.

    Let a be the actual total over the k validation months and p the
    predicted total.  The error is |p - a| scaled by the spread
    (max - min) of all sliding k-month sums over the whole series when
    that spread exceeds 1, and left absolute otherwise.
    """
    _, validation = _windows(series, split)
    actual = sum(validation)
    k = split.validation_months
    sliding = [sum(series.counts[i : i + k]) for i in range(len(series.counts) - k + 1)]
    diff = abs(predicted_validation - actual)
    if sliding:
        spread = max(sliding) - min(sliding)
        if spread > 1:
            return diff / spread
    return diff


def _rate_prediction(series: VulnSeries, split: SplitSpec, rate: float) -> PredictionResult:
    pred = rate * split.horizon_months
    err = validation_error(series, split, rate * split.validation_months)
    return PredictionResult(component=series.component, pred=pred, error_estimate=err)


def predict_average(series: VulnSeries, split: SplitSpec) -> PredictionResult:
    """Training-window mean rate extrapolated over the horizon."""
    training, _ = _windows(series, split)
    if not training:
        raise EmptyHistoryError(f"{series.component}: no training data")
    return _rate_prediction(series, split, sum(training) / len(training))


def predict_ewma(series: VulnSeries, split: SplitSpec, alpha: float = DEFAULT_ALPHA) -> PredictionResult:
    """Exponentially weighted mean rate; weight (1-alpha)^age per month.

    The most recent training month has age 0 (weight 1); alpha = 1
    degenerates to "last month's rate".
    """
    if not 0.0 < alpha <= 1.0:
        raise InvalidAlphaError(f"alpha must be in (0, 1], got {alpha}")
    training, _ = _windows(series, split)
    if not training:
        raise EmptyHistoryError(f"{series.component}: no training data")
    m = len(training)
    weights = [(1.0 - alpha) ** (m - 1 - j) for j in range(m)]
    rate = sum(w * v for w, v in zip(weights, training)) / sum(weights)
    return _rate_prediction(series, split, rate)


def import_external(path: str, split: SplitSpec) -> dict[str, PredictionResult]:
    """Load a `component,pred,error` CSV produced by an external predictor.

    Raises:
        ParseError: schema violations.
        NegativePredictionError: pred < 0 or error < 0.
    """
    out: dict[str, PredictionResult] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty predictions file", path=path) from None
        if [h.strip() for h in header] != PREDICTIONS_HEADER:
            raise ParseError(f"expected header {','.join(PREDICTIONS_HEADER)!r}", row=1, path=path)
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 columns, got {len(row)}", row=lineno, path=path)
            component = row[0].strip()
            try:
                pred, err = float(row[1]), float(row[2])
            except ValueError:
                raise ParseError(f"non-numeric pred/error: {row[1]!r}, {row[2]!r}", row=lineno, path=path) from None
            out[component] = PredictionResult(component=component, pred=pred, error_estimate=err)
    return out


def rmse(results: Sequence[tuple[float, float]]) -> float:
    """Root mean squared error over (predicted, actual) pairs."""
    if not results:
        raise EmptyInputError("rmse needs at least one (pred, actual) pair")
    return math.sqrt(sum((p - a) ** 2 for p, a in results) / len(results))


Backend = Callable[[VulnSeries, SplitSpec], PredictionResult]


def make_backend(
    name: str,
    alpha: float = DEFAULT_ALPHA,
    external: Mapping[str, PredictionResult] | None = None,
) -> Backend:
    """Build a prediction callable by backend name."""
    if name == "average":
        return predict_average
    if name == "ewma":
        return lambda series, split: predict_ewma(series, split, alpha)
    if name == "external":
        if external is None:
            raise ValueError("external backend needs an imported predictions map")

        def _lookup(series: VulnSeries, split: SplitSpec) -> PredictionResult:
            try:
                return external[series.component]
            except KeyError:
                raise MissingPredictionError(series.component) from None

        return _lookup
    raise ValueError(f"unknown backend {name!r}")


def predict_all(
    dataset: Dataset,
    backend: Backend,
    split: SplitSpec,
    components: Iterable[str] | None = None,
) -> dict[str, PredictionResult]:
    """Run one backend over (a subset of) the dataset's components."""
    names = sorted(components) if components is not None else dataset.components()
    return {name: backend(bin_monthly(dataset, name), split) for name in names}


def backtest(
    dataset: Dataset,
    backends: Mapping[str, Backend],
    split: SplitSpec,
    min_total: int = 10,
) -> list[tuple[str, float, int]]:
    """Score backends on the held-out test window.

    Components with more than `min_total` records overall qualify.  The
    test window is the `horizon_months` months directly after the
    validation window; each backend's horizon prediction is scored
    against the actual test-window total with rmse.

    Returns rows (backend, rmse, components_scored) in input order.
    """
    test_start = months.parse_month(split.train_end) + split.validation_months + 1
    test_end = test_start + split.horizon_months - 1
    if test_end > dataset.epoch_end:
        raise WindowOutOfRangeError(
            f"test window ends {months.format_month(test_end)}, after epoch end {dataset.epoch[1]}"
        )
    qualifying = sorted(c for c, total in dataset.totals().items() if total > min_total)

    rows: list[tuple[str, float, int]] = []
    for name, backend in backends.items():
        pairs = []
        for component in qualifying:
            series = bin_monthly(dataset, component)
            offset = test_start - months.parse_month(series.start)
            actual = sum(series.counts[offset : offset + split.horizon_months])
            pairs.append((backend(series, split).pred, float(actual)))
        rows.append((name, rmse(pairs), len(pairs)))
    return rows


def write_predictions(path: str, predictions: Mapping[str, PredictionResult]) -> None:
    """Write the canonical predictions CSV (stable order, fixed format)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(PREDICTIONS_HEADER)
        for component in sorted(predictions):
            r = predictions[component]
            writer.writerow([component, f"{r.pred:.6f}", f"{r.error_estimate:.6f}"])


def write_backtest_report(path: str, rows: Sequence[tuple[str, float, int]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["backend", "rmse", "components_scored"])
        for name, value, scored in rows:
            writer.writerow([name, f"{value:.6f}", scored])
