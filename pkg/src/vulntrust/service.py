"""HTTP API over the current assessment snapshot.

Read endpoints serve one immutable snapshot; POST /api/recompute
rebuilds assessments from the data directory's files and swaps the
snapshot reference atomically (readers see the old or the new run,
never a mix).  Only one recompute runs at a time; concurrent attempts
get 409.  What-if assessments (POST /api/systems/assess) compute
without persisting anything.
"""

from __future__ import annotations

import json
import threading
import warnings
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from . import forecast, history, report, store
from .assessment import (
    TrustParams,
    assess_components,
    ratio_report,
    resolve_assessments,
)
from .errors import (
    MissingOpinionError,
    NotReadOnceError,
    SchemaError,
    UnknownComponentError,
    VulnTrustError,
)
from .history import Dataset, bin_monthly
from .systems import assess_system, atom_names, parse_spec


def _load_dataset(base: str) -> Dataset:
    epoch = store.load_dataset_epoch(base) or history.DEFAULT_EPOCH
    return history.ingest_csv(store.dataset_path(base), epoch=epoch)


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


class ServiceState:
    """Shared server state: the dataset, the current snapshot, one recompute at a time."""

    def __init__(self, base: str, dataset: Dataset, snapshot: store.Snapshot):
        self.base = base
        self.dataset = dataset
        self.snapshot = snapshot
        self._recompute_lock = threading.Lock()

    @classmethod
    def from_data_dir(cls, base: str | None = None) -> "ServiceState":
        base = store.data_dir(base)
        dataset = _load_dataset(base)
        snapshot = store.load_snapshot(base)
        return cls(base, dataset, snapshot)

    def recompute(self) -> store.Snapshot:
        """Re-read dataset + predictions, rebuild and persist a fresh snapshot."""
        if not self._recompute_lock.acquire(blocking=False):
            raise ApiError(409, "recompute already in progress")
        try:
            snapshot = self.snapshot
            dataset = _load_dataset(self.base)
            predictions = forecast.import_external(store.predictions_path(self.base), snapshot.split)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                assessments = assess_components(predictions, dataset, snapshot.params)
            fresh = store.build_snapshot(dataset, predictions, assessments, snapshot.params, snapshot.split)
            store.save_snapshot(fresh, self.base)
            self.dataset = dataset
            self.snapshot = fresh  # atomic reference swap
            return fresh
        finally:
            self._recompute_lock.release()

    # ── request-level computations ─────────────────────────────────

    def params_with_overrides(self, overrides: dict | None) -> TrustParams:
        if not overrides:
            return self.snapshot.params
        merged = self.snapshot.params.as_dict()
        merged.update(overrides)
        try:
            return TrustParams.from_dict(merged)
        except (TypeError, ValueError) as exc:
            raise ApiError(400, f"bad params: {exc}") from None

    def system_report(self, doc: dict, params: TrustParams) -> dict:
        snapshot = self.snapshot
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # unknown atoms resolve below or 400
            spec = parse_spec(doc, known_components=snapshot.assessments.keys())
        assessments = resolve_assessments(
            atom_names(spec.formula), snapshot.assessments, self.dataset, params
        )
        assessment = assess_system(spec, assessments, params)
        return report.system_payload(assessment, spec, assessments)


def _route_get(state: ServiceState, path: str, query: dict):
    snapshot = state.snapshot
    if path == "/api/components":
        payload = report.assessment_report(snapshot.assessments, snapshot.params)
        payload["fingerprint"] = snapshot.fingerprint
        payload["created_at"] = snapshot.created_at
        return payload
    if path.startswith("/api/components/") and path.endswith("/history"):
        name = path[len("/api/components/"):-len("/history")]
        bins = query.get("bins", ["month"])[0]
        if bins != "month":
            raise ApiError(400, f"unsupported bins {bins!r}")
        try:
            series = bin_monthly(state.dataset, name)
        except UnknownComponentError:
            raise ApiError(404, f"unknown component {name!r}") from None
        payload = {"component": name, "start": series.start, "counts": list(series.counts)}
        prediction = snapshot.predictions.get(name)
        if prediction is not None:
            payload["predicted"] = {
                "pred": prediction.pred,
                "error": prediction.error_estimate,
                "horizon_months": snapshot.split.horizon_months,
                "monthly_rate": prediction.pred / snapshot.split.horizon_months,
            }
        return payload
    if path.startswith("/api/components/"):
        name = path[len("/api/components/"):]
        assessment = snapshot.assessments.get(name)
        if assessment is None:
            raise ApiError(404, f"unknown component {name!r}")
        return report.component_payload(assessment)
    if path == "/api/stats/yearly":
        return {"yearly": {str(y): c for y, c in history.yearly_totals(state.dataset).items()}}
    if path == "/api/stats/top":
        try:
            n = int(query.get("n", ["20"])[0])
        except ValueError:
            raise ApiError(400, "n must be an integer") from None
        if n < 1:
            raise ApiError(400, "n must be >= 1")
        rows = history.top_n(state.dataset, n)
        return {"top": [{"component": c, "count": k, "rank": r} for c, k, r in rows]}
    raise ApiError(404, f"no such resource {path!r}")


def _route_post(state: ServiceState, path: str, body: dict):
    if path == "/api/systems/assess":
        doc, overrides = _split_spec_body(body)
        params = state.params_with_overrides(overrides)
        return state.system_report(doc, params)
    if path == "/api/systems/compare":
        if not isinstance(body, dict) or "a" not in body or "b" not in body:
            raise ApiError(400, "body must carry system specs 'a' and 'b'")
        params = state.params_with_overrides(body.get("params"))
        payload_a = state.system_report(body["a"], params)
        payload_b = state.system_report(body["b"], params)
        try:
            ratios = ratio_report(
                payload_a["equivalent_vulns"],
                payload_b["equivalent_vulns"],
                body.get("actual_a"),
                body.get("actual_b"),
            )
        except ZeroDivisionError as exc:
            raise ApiError(400, str(exc)) from None
        return report.comparison_payload(ratios, payload_a, payload_b)
    if path == "/api/recompute":
        fresh = state.recompute()
        return {
            "fingerprint": fresh.fingerprint,
            "created_at": fresh.created_at,
            "components": len(fresh.assessments),
        }
    raise ApiError(404, f"no such resource {path!r}")


def _split_spec_body(body) -> tuple[dict, dict | None]:
    if not isinstance(body, dict):
        raise ApiError(400, "body must be a JSON object")
    if "system" in body:
        return body["system"], body.get("params")
    doc = {k: v for k, v in body.items() if k != "params"}
    return doc, body.get("params")


def make_handler(state: ServiceState):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # keep test output quiet
            pass

        def _send(self, status: int, payload: dict) -> None:
            body = json.dumps(payload, sort_keys=True).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.end_headers()
            self.wfile.write(body)

        def _guarded(self, fn) -> None:
            try:
                self._send(200, fn())
            except ApiError as exc:
                self._send(exc.status, {"error": str(exc)})
            except (SchemaError, MissingOpinionError) as exc:
                self._send(400, {"error": str(exc)})
            except (VulnTrustError, ZeroDivisionError) as exc:
                self._send(422, {"error": str(exc)})

        def do_GET(self):
            url = urlparse(self.path)
            self._guarded(lambda: _route_get(state, url.path, parse_qs(url.query)))

        def do_POST(self):
            url = urlparse(self.path)
            try:
                length = int(self.headers.get("Content-Length", "0"))
                raw = self.rfile.read(length) if length else b"{}"
                body = json.loads(raw.decode() or "{}")
            except (ValueError, UnicodeDecodeError):
                self._send(400, {"error": "request body is not valid JSON"})
                return
            self._guarded(lambda: _route_post(state, url.path, body))

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Content-Length", "0")
            self.end_headers()

    return Handler


def make_server(state: ServiceState, host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    server = ThreadingHTTPServer((host, port), make_handler(state))
    server.daemon_threads = True
    return server


def serve(host: str = "127.0.0.1", port: int = 8321, base: str | None = None) -> None:
    state = ServiceState.from_data_dir(base)
    server = make_server(state, host, port)
    print(f"serving {len(state.snapshot.assessments)} assessments on http://{host}:{server.server_address[1]}/api/")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
