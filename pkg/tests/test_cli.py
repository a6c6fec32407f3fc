"""End-to-end CLI tests: ingest -> predict -> assess -> compare -> stats."""

from __future__ import annotations

import csv
import json
import os

import pytest

from vulntrust.cli import main


def run(argv):
    return main(argv)


@pytest.fixture
def workspace(tmp_path, monkeypatch):
    data_dir = tmp_path / "data"
    monkeypatch.setenv("VULNTRUST_DATA_DIR", str(data_dir))

    rows = ["component,cve_id,published"]
    n = 0
    for year in (2014, 2015, 2016):
        for month in range(1, 13):
            rows.append(f"steady,CVE-S-{n},{year}-{month:02d}-10")
            n += 1
    for month in (2, 5, 8, 11):
        rows.append(f"spiky,CVE-P-{month},2015-{month:02d}-20")
        rows.append(f"spiky,CVE-Q-{month},2016-{month:02d}-20")
    rows.append("quiet,CVE-X-1,2016-06-01")
    source = tmp_path / "source.csv"
    source.write_text("\n".join(rows) + "\n", encoding="utf-8")

    spec_a = tmp_path / "system_a.json"
    spec_a.write_text(json.dumps({
        "name": "pair",
        "formula": {"and": [{"atom": "steady"}, {"atom": "spiky"}]},
    }), encoding="utf-8")
    spec_b = tmp_path / "system_b.json"
    spec_b.write_text(json.dumps({
        "name": "solo",
        "formula": {"atom": "steady"},
    }), encoding="utf-8")

    assert run(["ingest", "--csv", str(source), "--epoch-start", "2014-01", "--epoch-end", "2017-09"]) == 0
    return tmp_path


class TestIngest:
    def test_writes_dataset_and_report(self, workspace, monkeypatch):
        data_dir = os.environ["VULNTRUST_DATA_DIR"]
        assert os.path.exists(os.path.join(data_dir, "dataset.csv"))
        report = json.load(open(os.path.join(data_dir, "ingest_report.json")))
        assert report["records"] == 36 + 8 + 1

    def test_malformed_row_exits_2(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("VULNTRUST_DATA_DIR", str(tmp_path / "d2"))
        bad = tmp_path / "bad.csv"
        bad.write_text("component,cve_id,published\na,CVE-1,2016-13-01\n", encoding="utf-8")
        assert run(["ingest", "--csv", str(bad)]) == 2
        assert "row 2" in capsys.readouterr().err

    def test_missing_flags_exit_1(self, tmp_path, monkeypatch):
        monkeypatch.setenv("VULNTRUST_DATA_DIR", str(tmp_path / "d3"))
        tracker = tmp_path / "t.json"
        tracker.write_text("{}", encoding="utf-8")
        assert run(["ingest", "--tracker-json", str(tracker)]) == 1

    def test_usage_error_exits_1(self):
        with pytest.raises(SystemExit) as exc:
            run(["ingest"])  # no source flag at all
        assert exc.value.code == 1


class TestPredictAssess:
    def test_predict_writes_csv(self, workspace):
        assert run(["predict", "--backend", "average", "--train-end", "2016-03"]) == 0
        path = os.path.join(os.environ["VULNTRUST_DATA_DIR"], "predictions.csv")
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["component", "pred", "error"]
        assert {r[0] for r in rows[1:]} == {"steady", "spiky", "quiet"}

    def test_custom_epoch_survives_reload(self, workspace):
        # the configured epoch must persist with the dataset: the steady
        # component averages exactly 1/month over 2014-01..2016-03, so a
        # 9-month horizon prediction is 9, not a zero-diluted fraction
        assert run(["predict", "--backend", "average", "--train-end", "2016-03"]) == 0
        path = os.path.join(os.environ["VULNTRUST_DATA_DIR"], "predictions.csv")
        with open(path, newline="") as fh:
            rows = {r[0]: float(r[1]) for r in list(csv.reader(fh))[1:]}
        assert rows["steady"] == pytest.approx(9.0, abs=1e-6)

    def test_predict_alpha_validated(self, workspace):
        with pytest.raises(SystemExit) as exc:
            run(["predict", "--backend", "ewma", "--alpha", "7"])
        assert exc.value.code == 1

    def test_assess_writes_snapshot_and_report(self, workspace):
        assert run(["predict", "--backend", "average", "--train-end", "2016-03"]) == 0
        out = workspace / "report.json"
        assert run(["assess", "--system", str(workspace / "system_a.json"), "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert {c["component"] for c in payload["components"]} == {"steady", "spiky", "quiet"}
        system = payload["system"]
        assert system["system"] == "pair"
        assert 0.0 <= system["expectation"] <= 1.0
        assert system["components"][0]["component"] == "spiky"
        snapshot_file = os.path.join(os.environ["VULNTRUST_DATA_DIR"], "snapshot.json")
        snapshot = json.load(open(snapshot_file))
        assert set(snapshot["assessments"]) == {"steady", "spiky", "quiet"}

    def test_external_predictions_roundtrip(self, workspace):
        external = workspace / "external.csv"
        external.write_text(
            "component,pred,error\nsteady,9,0.05\nspiky,4,0.2\nquiet,0,0.0\n",
            encoding="utf-8",
        )
        assert run(["predict", "--backend", "external", "--import", str(external)]) == 0
        out = workspace / "report.json"
        assert run(["assess", "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        steady = next(c for c in payload["components"] if c["component"] == "steady")
        assert steady["t"] == pytest.approx(1 - 9 / 1080, abs=1e-3)
        assert steady["c"] == pytest.approx(0.95, abs=1e-9)

    def test_assess_without_predictions_exits_2(self, workspace, capsys):
        assert run(["assess"]) == 2

    def test_compare_systems(self, workspace):
        assert run(["predict", "--backend", "average", "--train-end", "2016-03"]) == 0
        assert run(["assess"]) == 0
        out = workspace / "cmp.json"
        code = run([
            "compare",
            "--system-a", str(workspace / "system_a.json"),
            "--system-b", str(workspace / "system_b.json"),
            "--actual-a", "12", "--actual-b", "9",
            "--out", str(out),
        ])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["ratio_actual"] == pytest.approx(12 / 9, abs=5e-4)
        assert payload["a"]["system"] == "pair"
        assert payload["ratio_equivalent"] > 1  # pair depends on more components


class TestBacktest:
    def test_report_rows(self, workspace, capsys):
        code = run(["backtest", "--backends", "average,ewma", "--min-total", "5",
                    "--train-end", "2015-12", "--validate-months", "6", "--horizon", "6"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2
        assert lines[0].startswith("average,")
        assert lines[1].startswith("ewma,")


class TestStats:
    def test_top_to_stdout(self, workspace, capsys):
        assert run(["stats", "--top", "2"]) == 0
        out = capsys.readouterr().out.strip().splitlines()
        assert out[0] == "component,count,rank"
        assert out[1].startswith("steady,36,1")

    def test_yearly_csv_and_plot(self, workspace):
        out = workspace / "yearly.csv"
        assert run(["stats", "--yearly", "--out", str(out), "--plot"]) == 0
        rows = out.read_text().strip().splitlines()
        assert rows[0] == "year,count"
        assert (workspace / "yearly.png").exists()

    def test_distribution_filter(self, workspace, capsys):
        assert run(["stats", "--distribution", "2"]) == 0
        out = capsys.readouterr().out.strip().splitlines()
        assert out == ["component,total", "steady,36", "spiky,8"]

    def test_history_plot(self, workspace):
        out = workspace / "steady.csv"
        assert run(["stats", "--history", "steady", "--out", str(out), "--plot"]) == 0
        rows = out.read_text().strip().splitlines()
        assert rows[0] == "month,count"
        assert sum(int(r.split(",")[1]) for r in rows[1:]) == 36
        assert (workspace / "steady.png").exists()

    def test_unknown_component_exits_2(self, workspace, capsys):
        assert run(["stats", "--history", "nope"]) == 2
