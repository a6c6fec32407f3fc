"""Tests for prediction backends, the normalized error, rmse and backtests."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vulntrust.errors import (
    EmptyHistoryError,
    EmptyInputError,
    InvalidAlphaError,
    MissingPredictionError,
    NegativePredictionError,
    ParseError,
    WindowOutOfRangeError,
)
from vulntrust.forecast import (
    PredictionResult,
    SplitSpec,
    backtest,
    import_external,
    make_backend,
    predict_average,
    predict_ewma,
    rmse,
    validation_error,
    write_predictions,
)
from vulntrust.history import VulnSeries


def series(counts, start="2015-01", component="pkg"):
    return VulnSeries(component=component, start=start, counts=tuple(counts))


def split_for(train_months, k=9, l=9, start="2015-01"):
    """SplitSpec whose training window covers the first train_months of start."""
    year, month = int(start[:4]), int(start[5:7])
    idx = year * 12 + month - 1 + train_months - 1
    y, m0 = divmod(idx, 12)
    return SplitSpec(train_end=f"{y:04d}-{m0 + 1:02d}", validation_months=k, horizon_months=l)


class TestPredictAverage:
    def test_constant_series(self):
        s = series([1] * 24)
        got = predict_average(s, split_for(15, k=9, l=9))
        assert got.pred == pytest.approx(9.0, abs=1e-12)
        assert got.error_estimate == pytest.approx(0.0, abs=1e-12)

    def test_all_zero_history(self):
        got = predict_average(series([0] * 24), split_for(15, k=9, l=9))
        assert got.pred == 0.0

    def test_mean_times_horizon(self):
        # training [0, 2, 4]: mean 2, l = 9 -> 18
        s = series([0, 2, 4, 0, 0, 0, 0])
        got = predict_average(s, split_for(3, k=4, l=9))
        assert got.pred == pytest.approx(18.0, abs=1e-12)

    def test_empty_training_window(self):
        with pytest.raises(EmptyHistoryError):
            predict_average(series([1] * 12, start="2016-01"), SplitSpec(train_end="2015-12"))

    def test_validation_window_must_fit(self):
        with pytest.raises(WindowOutOfRangeError):
            predict_average(series([1] * 10), split_for(5, k=9, l=9))

    @given(
        counts=st.lists(st.integers(0, 20), min_size=14, max_size=30),
        scale=st.integers(1, 7),
    )
    @settings(max_examples=150)
    def test_scale_equivariance(self, counts, scale):
        sp = split_for(10, k=4, l=9)
        base = predict_average(series(counts), sp).pred
        scaled = predict_average(series([scale * v for v in counts]), sp).pred
        assert scaled == pytest.approx(scale * base, rel=1e-12, abs=1e-12)


class TestPredictEwma:
    def test_constant_series_matches_average_for_every_alpha(self):
        s = series([3] * 24)
        sp = split_for(15)
        avg = predict_average(s, sp)
        for alpha in (0.05, 0.1, 0.3, 0.7, 1.0):
            got = predict_ewma(s, sp, alpha)
            assert got.pred == pytest.approx(avg.pred, abs=1e-9)
            assert got.error_estimate == pytest.approx(avg.error_estimate, abs=1e-9)

    def test_alpha_one_is_last_month(self):
        s = series([5, 1, 7, 2, 0, 0, 0, 0])
        got = predict_ewma(s, split_for(4, k=4, l=3), alpha=1.0)
        assert got.pred == pytest.approx(2 * 3, abs=1e-12)

    def test_hand_computed_weighting(self):
        # training [0,0,0,3], alpha 0.5: weighted mean 3/(1+. 5+.25+.125) = 1.6
        s = series([0, 0, 0, 3, 0])
        got = predict_ewma(s, split_for(4, k=1, l=2), alpha=0.5)
        assert got.pred == pytest.approx(3.2, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.0, -0.5, 1.5])
    def test_alpha_domain(self, alpha):
        with pytest.raises(InvalidAlphaError):
            predict_ewma(series([1] * 24), split_for(12), alpha)

    @given(
        counts=st.lists(st.integers(0, 9), min_size=14, max_size=30),
        alpha=st.floats(0.01, 1.0, allow_nan=False),
    )
    @settings(max_examples=150)
    def test_rate_stays_within_observed_range(self, counts, alpha):
        sp = split_for(10, k=4, l=1)
        got = predict_ewma(series(counts), sp, alpha)
        training = counts[:10]
        assert min(training) - 1e-9 <= got.pred <= max(training) + 1e-9


class TestValidationError:
    def test_perfect_prediction(self):
        s = series([2] * 24)
        assert validation_error(s, split_for(15), 2 * 9) == pytest.approx(0.0, abs=1e-12)

    def test_absolute_branch_when_spread_small(self):
        # sliding 1-month sums are {0, 1}: spread 1, so error stays absolute
        s = series([0, 0, 0, 1])
        assert validation_error(s, split_for(3, k=1, l=1), 2.0) == pytest.approx(1.0, abs=1e-12)

    def test_normalized_by_sliding_window_spread(self):
        # sliding 9-month sums take values {0, 11, 20}: spread 20 (brute-forced below)
        counts = [0] * 9 + [20] + [0] * 8 + [11] + [0] * 8
        s = series(counts)
        k = 9
        sliding = [sum(counts[i : i + k]) for i in range(len(counts) - k + 1)]
        assert max(sliding) - min(sliding) == 20
        assert sum(counts[18:27]) == 11
        got = validation_error(s, split_for(18, k=9, l=9), 12.0)
        assert got == pytest.approx(1 / 20, abs=1e-12)

    @given(
        counts=st.lists(st.integers(0, 10), min_size=14, max_size=30),
        p=st.floats(0, 50, allow_nan=False),
    )
    @settings(max_examples=150)
    def test_nonnegative_and_zero_iff_exact(self, counts, p):
        sp = split_for(10, k=4, l=1)
        s = series(counts)
        err = validation_error(s, sp, p)
        assert err >= 0.0
        actual = sum(counts[10:14])
        if err == 0.0:
            assert p == actual
        assert validation_error(s, sp, float(actual)) == 0.0


class TestRmse:
    def test_single_exact(self):
        assert rmse([(3, 3)]) == 0.0

    def test_hand_arithmetic(self):
        assert rmse([(0, 3), (4, 0)]) == pytest.approx(math.sqrt(12.5), abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(EmptyInputError):
            rmse([])


class TestImportExternal:
    def test_pass_through(self, tmp_path):
        path = tmp_path / "pred.csv"
        path.write_text(
            "component,pred,error\nlinux,35,0.034\nfirefox-esr,54,0.08\n",
            encoding="utf-8",
        )
        got = import_external(str(path), SplitSpec())
        assert got["linux"] == PredictionResult("linux", 35.0, 0.034)
        assert got["firefox-esr"].pred == 54.0

    def test_negative_prediction_rejected(self, tmp_path):
        path = tmp_path / "pred.csv"
        path.write_text("component,pred,error\nx,-1,0.1\n", encoding="utf-8")
        with pytest.raises(NegativePredictionError):
            import_external(str(path), SplitSpec())

    def test_bad_header(self, tmp_path):
        path = tmp_path / "pred.csv"
        path.write_text("a,b,c\nx,1,0.1\n", encoding="utf-8")
        with pytest.raises(ParseError):
            import_external(str(path), SplitSpec())

    def test_round_trip(self, tmp_path):
        path = tmp_path / "out.csv"
        preds = {
            "a": PredictionResult("a", 3.25, 0.125),
            "b": PredictionResult("b", 0.0, 1.5),
        }
        write_predictions(str(path), preds)
        again = import_external(str(path), SplitSpec())
        assert again == preds


def dataset_from_counts(monthly, epoch=("2015-01", "2017-09")):
    """Build a Dataset whose bin_monthly(component) equals the given counts."""
    import datetime as dt

    from vulntrust.history import Dataset, VulnRecord

    records = []
    for component, counts in monthly.items():
        n = 0
        for j, count in enumerate(counts):
            year, m0 = divmod((2015 * 12) + j, 12)
            for _ in range(count):
                records.append(VulnRecord(component, f"CVE-{component}-{n}", dt.date(year, m0 + 1, 10)))
                n += 1
    return Dataset(records=tuple(records), epoch=epoch)


class TestBacktest:
    def covers(self):
        return SplitSpec(train_end="2016-03", validation_months=9, horizon_months=9)

    def test_constant_rate_component_scores_zero(self):
        # 33 months of exactly 1/month; > 10 total, so it qualifies
        ds = dataset_from_counts({"steady": [1] * 33})
        rows = backtest(ds, {"average": make_backend("average")}, self.covers())
        assert rows == [("average", pytest.approx(0.0, abs=1e-9), 1)]

    def test_two_components_hand_scored(self):
        ds = dataset_from_counts({
            "steady": [1] * 33,
            "rising": [0] * 13 + [2] * 20,
        })
        rows = backtest(ds, {"average": make_backend("average")}, self.covers())
        # rising: training mean = 4/15, pred = 2.4; actual test-window total = 18
        pred_rising = (2 * 2 / 15) * 9
        expected = math.sqrt(((9 - 9) ** 2 + (pred_rising - 18) ** 2) / 2)
        assert rows[0][1] == pytest.approx(expected, rel=1e-9)
        assert rows[0][2] == 2

    def test_low_volume_components_excluded(self):
        ds = dataset_from_counts({"steady": [1] * 33, "quiet": [1] + [0] * 32})
        rows = backtest(ds, {"average": make_backend("average")}, self.covers())
        assert rows[0][2] == 1

    def test_deterministic(self):
        ds = dataset_from_counts({"steady": [1] * 33, "rising": [0] * 13 + [2] * 20})
        backends = {"average": make_backend("average"), "ewma": make_backend("ewma", alpha=0.2)}
        assert backtest(ds, backends, self.covers()) == backtest(ds, backends, self.covers())

    def test_window_must_fit_epoch(self):
        ds = dataset_from_counts({"steady": [1] * 33})
        with pytest.raises(WindowOutOfRangeError):
            backtest(ds, {"average": make_backend("average")}, SplitSpec(train_end="2016-12"))

    def test_external_backend_must_cover_components(self):
        ds = dataset_from_counts({"steady": [1] * 33})
        backend = make_backend("external", external={})
        with pytest.raises(MissingPredictionError):
            backtest(ds, {"external": backend}, self.covers())
