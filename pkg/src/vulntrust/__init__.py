"""vulntrust: trustworthiness of software from its vulnerability history.

The toolkit ingests per-component vulnerability records, predicts
counts over a future horizon, converts predictions into uncertain-
probability opinions, and composes per-component opinions into scores
for whole systems described by AND/OR dependency formulas.
"""

from .assessment import (
    ComparisonReport,
    ComponentAssessment,
    TrustParams,
    assess_component,
    assess_components,
    certainty_from_error,
    compare_configs,
    component_trust,
    prior_for,
    ratio_report,
)
from .forecast import (
    PredictionResult,
    SplitSpec,
    backtest,
    import_external,
    predict_average,
    predict_ewma,
    rmse,
    validation_error,
)
from .history import (
    Dataset,
    VulnRecord,
    VulnSeries,
    avg_per_affected,
    bin_monthly,
    distribution_export,
    ingest_csv,
    ingest_tracker_json,
    top_n,
    yearly_totals,
)
from .opinions import (
    FusedOpinion,
    Opinion,
    WeightedOpinion,
    and_ct,
    conjunction,
    disjunction,
    expectation,
    fuse,
    or_ct,
    pairwise_conflict,
)
from .systems import (
    And,
    Atom,
    Or,
    SystemAssessment,
    SystemSpec,
    assess_system,
    evaluate,
    fuse_assessments,
    parse_spec,
    to_read_once,
)

__version__ = "0.1.0"
