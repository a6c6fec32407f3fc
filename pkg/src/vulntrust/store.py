"""File-backed persistence: the data directory, dataset files and snapshots.

Everything is plain files under one directory (env var VULNTRUST_DATA_DIR,
default ./data): the canonical dataset CSV, the predictions CSV, and
immutable assessment snapshots (full-precision JSON).  Snapshot writes go
through a temp file + rename, so a reader never sees a half-written one.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from typing import Mapping

from .assessment import ComponentAssessment, TrustParams
from .forecast import PredictionResult, SplitSpec
from .history import Dataset
from .opinions import Opinion

ENV_DATA_DIR = "VULNTRUST_DATA_DIR"

DATASET_FILE = "dataset.csv"
DATASET_META_FILE = "dataset_meta.json"
INGEST_REPORT_FILE = "ingest_report.json"
PREDICTIONS_FILE = "predictions.csv"
SNAPSHOT_FILE = "snapshot.json"
SNAPSHOT_ARCHIVE_DIR = "snapshots"


def data_dir(override: str | None = None) -> str:
    path = override or os.environ.get(ENV_DATA_DIR) or "./data"
    os.makedirs(path, exist_ok=True)
    return path


def dataset_path(base: str) -> str:
    return os.path.join(base, DATASET_FILE)


def predictions_path(base: str) -> str:
    return os.path.join(base, PREDICTIONS_FILE)


def save_dataset_meta(base: str, dataset: Dataset) -> None:
    """Persist what the CSV itself cannot carry (the epoch window)."""
    _atomic_write_json(os.path.join(base, DATASET_META_FILE), {"epoch": list(dataset.epoch)})


def load_dataset_epoch(base: str) -> tuple[str, str] | None:
    path = os.path.join(base, DATASET_META_FILE)
    if not os.path.exists(path):
        return None
    with open(path, encoding="utf-8") as fh:
        meta = json.load(fh)
    start, end = meta["epoch"]
    return (start, end)


def snapshot_path(base: str) -> str:
    return os.path.join(base, SNAPSHOT_FILE)


def fingerprint(dataset: Dataset) -> str:
    digest = hashlib.sha256()
    digest.update(f"{dataset.epoch[0]}..{dataset.epoch[1]}\n".encode())
    for r in sorted(dataset.records, key=lambda r: (r.component, r.cve_id)):
        digest.update(f"{r.component},{r.cve_id},{r.published.isoformat()}\n".encode())
    return "sha256:" + digest.hexdigest()


@dataclass(frozen=True)
class Snapshot:
    """One immutable assessment run: inputs fingerprinted, params echoed."""

    fingerprint: str
    created_at: str
    params: TrustParams
    split: SplitSpec
    assessments: Mapping[str, ComponentAssessment]
    predictions: Mapping[str, PredictionResult]

    def as_dict(self) -> dict:
        return {
            "fingerprint": self.fingerprint,
            "created_at": self.created_at,
            "params": self.params.as_dict(),
            "split": {
                "train_end": self.split.train_end,
                "validation_months": self.split.validation_months,
                "horizon_months": self.split.horizon_months,
            },
            "assessments": {
                name: {
                    "t": a.opinion.t,
                    "c": a.opinion.c,
                    "f": a.opinion.f,
                    "expectation": a.expectation,
                    "equivalent_vulns": a.equivalent_vulns,
                    "pred": self.predictions[name].pred,
                    "error": self.predictions[name].error_estimate,
                }
                for name, a in sorted(self.assessments.items())
            },
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Snapshot":
        params = TrustParams.from_dict(data["params"])
        split = SplitSpec(**data["split"])
        assessments = {}
        predictions = {}
        for name, entry in data["assessments"].items():
            opinion = Opinion(entry["t"], entry["c"], entry["f"])
            assessments[name] = ComponentAssessment(
                component=name,
                opinion=opinion,
                expectation=entry["expectation"],
                equivalent_vulns=entry["equivalent_vulns"],
            )
            predictions[name] = PredictionResult(name, entry["pred"], entry["error"])
        return cls(
            fingerprint=data["fingerprint"],
            created_at=data["created_at"],
            params=params,
            split=split,
            assessments=assessments,
            predictions=predictions,
        )


def build_snapshot(
    dataset: Dataset,
    predictions: Mapping[str, PredictionResult],
    assessments: Mapping[str, ComponentAssessment],
    params: TrustParams,
    split: SplitSpec,
) -> Snapshot:
    return Snapshot(
        fingerprint=fingerprint(dataset),
        created_at=dt.datetime.now(dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
        params=params,
        split=split,
        assessments=dict(assessments),
        predictions=dict(predictions),
    )


def _atomic_write_json(path: str, payload: dict) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_snapshot(snapshot: Snapshot, base: str) -> str:
    """Write the current snapshot and an immutable archive copy."""
    payload = snapshot.as_dict()
    current = snapshot_path(base)
    _atomic_write_json(current, payload)
    archive_dir = os.path.join(base, SNAPSHOT_ARCHIVE_DIR)
    os.makedirs(archive_dir, exist_ok=True)
    stamp = snapshot.created_at.replace(":", "").replace("-", "")
    archive = os.path.join(archive_dir, f"snapshot-{stamp}-{snapshot.fingerprint[-8:]}.json")
    if not os.path.exists(archive):
        _atomic_write_json(archive, payload)
    return current


def load_snapshot(base: str) -> Snapshot:
    with open(snapshot_path(base), encoding="utf-8") as fh:
        return Snapshot.from_dict(json.load(fh))
