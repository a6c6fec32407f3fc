#!/usr/bin/env python3
"""Record API/CLI payload fixtures for the frontend tests.

Builds a synthetic dataset, runs the vulntrust pipeline, starts the
real HTTP service, and captures the payloads the UI tests replay
through an intercepted fetch.  Re-run whenever payload shapes change:

    cd frontend && npm run fixtures
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import tempfile
import threading
import urllib.request

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "tests", "fixtures")

PAIR_SPEC = {
    "name": "pair",
    "formula": {"and": [{"atom": "steady"}, {"atom": "spiky"}]},
}
# 1-out-of-2: the pair, or a fallback stack sharing the steady component
ONE_OF_TWO_SPEC = {
    "name": "one-of-two",
    "formula": {
        "or": [
            {"and": [{"atom": "steady"}, {"atom": "spiky"}]},
            {"and": [{"atom": "steady"}, {"atom": "fallback"}]},
        ]
    },
}
# what-if swap: the risky 'spiky' replaced by a zero-history component
SWAPPED_SPEC = {
    "name": "pair",
    "formula": {"and": [{"atom": "steady"}, {"atom": "pristine-new"}]},
}


def write_source_csv(path: str) -> None:
    rows = ["component,cve_id,published"]
    n = 0
    for year in (2014, 2015, 2016):
        for month in range(1, 13):
            rows.append(f"steady,CVE-S-{n},{year}-{month:02d}-10")
            n += 1
    for month in (1, 3, 5, 7, 9, 11):
        rows.append(f"spiky,CVE-P-{month},2015-{month:02d}-20")
        rows.append(f"spiky,CVE-Q-{month},2016-{month:02d}-20")
    rows.append("fallback,CVE-F-1,2015-04-02")
    rows.append("fallback,CVE-F-2,2016-08-02")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + "\n")


def cli(args: list[str], env: dict) -> None:
    subprocess.run([sys.executable, "-m", "vulntrust.cli", *args], check=True, env=env)


def post(url: str, body: dict) -> dict:
    req = urllib.request.Request(
        url,
        data=json.dumps(body).encode(),
        headers={"Content-Type": "application/json"},
        method="POST",
    )
    with urllib.request.urlopen(req, timeout=10) as resp:
        return json.load(resp)


def get(url: str) -> dict:
    with urllib.request.urlopen(url, timeout=10) as resp:
        return json.load(resp)


def post_expect_error(url: str, body: dict) -> dict:
    import urllib.error

    try:
        post(url, body)
    except urllib.error.HTTPError as exc:
        return {"status": exc.code, "body": json.load(exc)}
    raise RuntimeError("expected an error response")


def main() -> None:
    os.makedirs(FIXTURES, exist_ok=True)
    with tempfile.TemporaryDirectory() as workdir:
        env = dict(os.environ, VULNTRUST_DATA_DIR=os.path.join(workdir, "data"))
        source = os.path.join(workdir, "source.csv")
        write_source_csv(source)
        cli(["ingest", "--csv", source, "--epoch-start", "2014-01", "--epoch-end", "2017-09"], env)
        cli(["predict", "--backend", "average", "--train-end", "2016-03"], env)

        spec_path = os.path.join(workdir, "one_of_two.json")
        with open(spec_path, "w", encoding="utf-8") as fh:
            json.dump(ONE_OF_TWO_SPEC, fh)
        report_path = os.path.join(workdir, "report.json")
        cli(["assess", "--system", spec_path, "--out", report_path], env)
        with open(report_path, encoding="utf-8") as fh:
            cli_one_of_two = json.load(fh)["system"]

        from vulntrust.service import ServiceState, make_server

        os.environ["VULNTRUST_DATA_DIR"] = env["VULNTRUST_DATA_DIR"]
        state = ServiceState.from_data_dir()
        server = make_server(state, port=0)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        base = f"http://127.0.0.1:{server.server_address[1]}"
        try:
            fixtures = {
                "components.json": get(f"{base}/api/components"),
                "history_steady.json": get(f"{base}/api/components/steady/history?bins=month"),
                "system_pair.json": post(f"{base}/api/systems/assess", PAIR_SPEC),
                "system_one_of_two.json": post(f"{base}/api/systems/assess", ONE_OF_TWO_SPEC),
                "system_pair_swapped.json": post(f"{base}/api/systems/assess", SWAPPED_SPEC),
                "cli_one_of_two.json": cli_one_of_two,
                "error_bad_spec.json": post_expect_error(
                    f"{base}/api/systems/assess", {"name": "bad", "formula": {"or": []}}
                ),
            }
        finally:
            server.shutdown()

        for name, payload in fixtures.items():
            with open(os.path.join(FIXTURES, name), "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
                fh.write("\n")
        print(f"wrote {len(fixtures)} fixtures to {os.path.normpath(FIXTURES)}")


if __name__ == "__main__":
    main()
