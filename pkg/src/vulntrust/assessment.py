"""Turn predicted vulnerability counts into trust opinions and reports.

The mapping treats a component's future as lambda_ Bernoulli trials over
the prediction horizon (default 1080, one trial per six hours over nine
months).  The predicted count pred then gives the trust value

    t = 1 - pred / lambda_   (0 when pred exceeds lambda_)

which is the maximum-likelihood estimate of the per-trial "stays safe"
probability.  Certainty comes from the predictor's normalized
validation error e,

    c = clamp(1 - min(e, 1), floor, ceiling)

clamped away from both 0 (a lucky fit on a quiet package is not
perfect knowledge) and 1 (even a perfect validation fit keeps a small
error margin).  The prior f reflects ecosystem-wide base rates: the
mean count of the component's peer group over a reference window,
scaled to the horizon, mapped through 1 - avg/lambda_, then passed
through an affine trend correction f' = slope*f + intercept.
Components with no history at all get f = 1.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping

from . import months
from .errors import MissingOpinionError
from .forecast import PredictionResult
from .history import Dataset
from .opinions import Opinion

DEFAULT_REFERENCE_WINDOW = ("2015-01", "2016-12")


def _clamp(value: float, lo: float, hi: float) -> float:
    return max(lo, min(hi, value))


@dataclass(frozen=True)
class TrustParams:
    """Model tuning constants; defaults encode the shipped calibration."""

    lambda_: int = 1080
    certainty_floor: float = 0.100
    certainty_ceiling: float = 0.990
    prior_slope: float = 1.05
    prior_intercept: float = -0.05
    top_group_size: int = 20
    reference_window: tuple[str, str] = DEFAULT_REFERENCE_WINDOW
    horizon_months: int = 9

    def __post_init__(self) -> None:
        if self.lambda_ < 1:
            raise ValueError("lambda_ must be >= 1")
        if not 0.0 <= self.certainty_floor < self.certainty_ceiling <= 1.0:
            raise ValueError("need 0 <= certainty_floor < certainty_ceiling <= 1")
        if self.top_group_size < 1 or self.horizon_months < 1:
            raise ValueError("top_group_size and horizon_months must be >= 1")
        months.parse_month(self.reference_window[0])
        months.parse_month(self.reference_window[1])

    def as_dict(self) -> dict:
        return {
            "lambda": self.lambda_,
            "certainty_floor": self.certainty_floor,
            "certainty_ceiling": self.certainty_ceiling,
            "prior_slope": self.prior_slope,
            "prior_intercept": self.prior_intercept,
            "top_group_size": self.top_group_size,
            "reference_window": list(self.reference_window),
            "horizon_months": self.horizon_months,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "TrustParams":
        kwargs = dict(data)
        if "lambda" in kwargs:
            kwargs["lambda_"] = kwargs.pop("lambda")
        if "reference_window" in kwargs:
            kwargs["reference_window"] = tuple(kwargs["reference_window"])
        return cls(**kwargs)


@dataclass(frozen=True)
class ComponentAssessment:
    component: str
    opinion: Opinion
    expectation: float
    equivalent_vulns: float

    @classmethod
    def from_opinion(cls, component: str, opinion: Opinion, params: TrustParams) -> "ComponentAssessment":
        e = opinion.expectation
        return cls(
            component=component,
            opinion=opinion,
            expectation=e,
            equivalent_vulns=(1.0 - e) * params.lambda_,
        )


@dataclass(frozen=True)
class ComparisonReport:
    ratio_equivalent: float
    ratio_actual: float | None = None
    norm_error: float | None = None


def component_trust(pred: float, params: TrustParams) -> float:
    """Trust value from a predicted count: 1 - pred/lambda_, floored at 0."""
    if pred < 0:
        raise ValueError("pred must be nonnegative")
    if pred > params.lambda_:
        return 0.0
    return 1.0 - pred / params.lambda_


def certainty_from_error(error: float, params: TrustParams) -> float:
    """Certainty from a normalized validation error, clamped to the range."""
    if error < 0:
        raise ValueError("error must be nonnegative")
    return _clamp(1.0 - min(error, 1.0), params.certainty_floor, params.certainty_ceiling)


def _group_prior(group_counts: list[int], window_months: int, params: TrustParams) -> float:
    """Prior from a peer group's reference-window counts.

    Group mean per window, scaled to the horizon, mapped through
    1 - avg/lambda_, then the affine trend correction, clamped to [0,1].
    """
    avg_window = sum(group_counts) / len(group_counts)
    avg_horizon = avg_window * params.horizon_months / window_months
    f = 1.0 - min(avg_horizon, params.lambda_) / params.lambda_
    f_prime = params.prior_slope * f + params.prior_intercept
    return _clamp(f_prime, 0.0, 1.0)


def prior_for(component: str, dataset: Dataset, params: TrustParams) -> float:
    """Initial expectation for one component.

    Zero-history components are considered fully trustworthy (f = 1).
    Components inside the all-time top group share the top-group prior;
    every other component with history shares the remaining vulnerable
    group's prior.
    """
    totals = dataset.totals()
    if totals.get(component, 0) == 0:
        return 1.0
    ranked = sorted(totals.items(), key=lambda item: (-item[1], item[0]))
    top = [name for name, _ in ranked[: params.top_group_size]]
    window = params.reference_window
    window_months = months.span(months.parse_month(window[0]), months.parse_month(window[1]))
    window_totals = dataset.totals(window)
    if component in top:
        group = top
    else:
        group = [name for name, _ in ranked[params.top_group_size:]]
    counts = [window_totals.get(name, 0) for name in group]
    return _group_prior(counts, window_months, params)


def assess_component(
    component: str,
    prediction: PredictionResult,
    dataset: Dataset,
    params: TrustParams,
) -> ComponentAssessment:
    """Full per-component pipeline: (t, c, f) opinion plus derived numbers."""
    opinion = Opinion(
        t=component_trust(prediction.pred, params),
        c=certainty_from_error(prediction.error_estimate, params),
        f=prior_for(component, dataset, params),
    )
    return ComponentAssessment.from_opinion(component, opinion, params)


def assess_components(
    predictions: Mapping[str, PredictionResult],
    dataset: Dataset,
    params: TrustParams,
) -> dict[str, ComponentAssessment]:
    """Assess every predicted component; warns if lambda_ is set too low.

    lambda_ should exceed the sum of all predicted counts so that even a
    system depending on everything keeps a positive trust value.
    """
    total_pred = sum(p.pred for p in predictions.values())
    if params.lambda_ <= total_pred:
        warnings.warn(
            f"lambda ({params.lambda_}) does not exceed the sum of predictions ({total_pred:.1f}); "
            "trust values will saturate at 0 for heavy configurations",
            stacklevel=2,
        )
    return {
        name: assess_component(name, prediction, dataset, params)
        for name, prediction in sorted(predictions.items())
    }


def pristine_assessment(component: str, params: TrustParams) -> ComponentAssessment:
    """Assessment of a component with no recorded history.

    Nothing predicted (pred 0 at zero validation error) on a fully
    trusted prior: t = 1, c = certainty ceiling, f = 1.
    """
    opinion = Opinion(
        t=component_trust(0.0, params),
        c=certainty_from_error(0.0, params),
        f=1.0,
    )
    return ComponentAssessment.from_opinion(component, opinion, params)


def resolve_assessments(
    needed: Iterable[str],
    assessments: Mapping[str, ComponentAssessment],
    dataset: Dataset,
    params: TrustParams,
) -> dict[str, ComponentAssessment]:
    """Cover every needed component, synthesizing zero-history entries.

    Components that do have recorded history but no assessment stay
    unresolved - that is a stale snapshot, not a pristine package.

    Raises:
        MissingOpinionError: a component with history lacks an assessment.
    """
    out = dict(assessments)
    totals = dataset.totals()
    for name in sorted(set(needed)):
        if name in out:
            continue
        if totals.get(name, 0) > 0:
            raise MissingOpinionError(
                f"{name} has recorded history but no assessment; re-run predict/assess"
            )
        out[name] = pristine_assessment(name, params)
    return out


def ratio_report(
    equivalent_a: float,
    equivalent_b: float,
    actual_a: float | None = None,
    actual_b: float | None = None,
) -> ComparisonReport:
    """Relative-quality ratios of two assessments, with normalized error
    against the actual-count ratio when actuals are supplied."""
    if equivalent_b == 0:
        raise ZeroDivisionError("equivalent count of the second configuration is 0")
    ratio_equivalent = equivalent_a / equivalent_b
    if actual_a is None or actual_b is None:
        return ComparisonReport(ratio_equivalent=ratio_equivalent)
    if actual_b == 0:
        raise ZeroDivisionError("actual count of the second configuration is 0")
    ratio_actual = actual_a / actual_b
    if ratio_actual == 0:
        raise ZeroDivisionError("actual ratio is 0; normalized error undefined")
    return ComparisonReport(
        ratio_equivalent=ratio_equivalent,
        ratio_actual=ratio_actual,
        norm_error=abs(ratio_equivalent - ratio_actual) / ratio_actual,
    )


def compare_configs(a, b, actual_a: float | None = None, actual_b: float | None = None) -> ComparisonReport:
    """Compare two assessments (component- or system-level) by their
    equivalent vulnerability counts."""
    return ratio_report(a.equivalent_vulns, b.equivalent_vulns, actual_a, actual_b)
