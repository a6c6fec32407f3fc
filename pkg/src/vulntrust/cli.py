"""Command-line interface: ingest, predict, backtest, assess, compare, stats, serve.

Exit codes: 0 success, 1 usage error, 2 data error (unreadable or invalid
input files), 3 computation error.  The data directory comes from
VULNTRUST_DATA_DIR (default ./data); everything else is a flag.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import forecast, history, plots, report, store
from .assessment import TrustParams, assess_components, ratio_report, resolve_assessments
from .errors import (
    EmptyDatasetError,
    MissingDatesError,
    MissingPredictionError,
    NegativePredictionError,
    ParseError,
    SchemaError,
    UnknownComponentError,
    VulnTrustError,
)
from .forecast import SplitSpec
from .history import bin_monthly
from .systems import assess_system, atom_names, parse_spec


def _alpha_flag(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError("alpha must be in (0, 1]")
    return value

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_COMPUTE = 3

DATA_ERRORS = (
    ParseError,
    EmptyDatasetError,
    MissingDatesError,
    SchemaError,
    NegativePredictionError,
    MissingPredictionError,
    UnknownComponentError,
    FileNotFoundError,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vulntrust", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="load vulnerability evidence into the data directory")
    source = p_ingest.add_mutually_exclusive_group(required=True)
    source.add_argument("--csv", help="canonical component,cve_id,published CSV")
    source.add_argument("--tracker-json", help="package -> {cve_id: ...} JSON export")
    p_ingest.add_argument("--cve-dates", help="companion cve_id,published CSV (tracker mode)")
    p_ingest.add_argument("--epoch-start", default=history.DEFAULT_EPOCH[0], metavar="YYYY-MM")
    p_ingest.add_argument("--epoch-end", default=history.DEFAULT_EPOCH[1], metavar="YYYY-MM")
    p_ingest.add_argument("--filter", dest="filter_file", help="JSON package-set/window filter")

    p_predict = sub.add_parser("predict", help="write the predictions CSV for every component")
    p_predict.add_argument("--backend", choices=["average", "ewma", "external"], default="average")
    p_predict.add_argument("--alpha", type=_alpha_flag, default=forecast.DEFAULT_ALPHA)
    p_predict.add_argument("--import", dest="import_file", help="external predictions CSV to pass through")
    _add_split_flags(p_predict)
    p_predict.add_argument("--out", help="output CSV (default: data dir predictions.csv)")

    p_backtest = sub.add_parser("backtest", help="score backends on the held-out test window")
    p_backtest.add_argument("--backends", default="average,ewma", help="comma-separated backend names")
    p_backtest.add_argument("--alpha", type=_alpha_flag, default=forecast.DEFAULT_ALPHA)
    p_backtest.add_argument("--import", dest="import_file", help="external predictions CSV")
    p_backtest.add_argument("--min-total", type=int, default=10, help="qualify components with more records than this")
    _add_split_flags(p_backtest)
    p_backtest.add_argument("--out", help="report CSV (default: stdout)")

    p_assess = sub.add_parser("assess", help="compute component (and optional system) assessments")
    p_assess.add_argument("--predictions", help="predictions CSV (default: data dir predictions.csv)")
    p_assess.add_argument("--system", help="system spec JSON to assess on top of the snapshot")
    _add_param_flags(p_assess)
    _add_split_flags(p_assess)
    p_assess.add_argument("--out", help="write the report JSON here as well as stdout")

    p_compare = sub.add_parser("compare", help="compare two system specs against the current snapshot")
    p_compare.add_argument("--system-a", required=True)
    p_compare.add_argument("--system-b", required=True)
    p_compare.add_argument("--actual-a", type=float)
    p_compare.add_argument("--actual-b", type=float)
    p_compare.add_argument("--out")

    p_stats = sub.add_parser("stats", help="descriptive statistics reports (CSV, optional PNG)")
    kind = p_stats.add_mutually_exclusive_group(required=True)
    kind.add_argument("--top", type=int, metavar="N")
    kind.add_argument("--yearly", action="store_true")
    kind.add_argument("--distribution", type=int, metavar="MIN_COUNT")
    kind.add_argument("--history", metavar="COMPONENT")
    p_stats.add_argument("--window", nargs=2, metavar=("START", "END"), help="YYYY-MM YYYY-MM (top only)")
    p_stats.add_argument("--out", help="output CSV path (default: stdout)")
    p_stats.add_argument("--plot", action="store_true", help="also render a PNG figure next to the CSV")

    p_serve = sub.add_parser("serve", help="run the HTTP API")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8321)

    return parser


def _add_split_flags(parser) -> None:
    parser.add_argument("--train-end", default="2016-03", metavar="YYYY-MM")
    parser.add_argument("--validate-months", type=int, default=9)
    parser.add_argument("--horizon", type=int, default=9)


def _add_param_flags(parser) -> None:
    parser.add_argument("--lambda", dest="lambda_", type=int, default=1080)
    parser.add_argument("--certainty-floor", type=float, default=0.100)
    parser.add_argument("--certainty-ceiling", type=float, default=0.990)
    parser.add_argument("--prior-slope", type=float, default=1.05)
    parser.add_argument("--prior-intercept", type=float, default=-0.05)
    parser.add_argument("--top-group-size", type=int, default=20)
    parser.add_argument("--reference-window", nargs=2, default=list(TrustParams().reference_window),
                        metavar=("START", "END"))


def _split_from(args) -> SplitSpec:
    return SplitSpec(
        train_end=args.train_end,
        validation_months=args.validate_months,
        horizon_months=args.horizon,
    )


def _params_from(args) -> TrustParams:
    return TrustParams(
        lambda_=args.lambda_,
        certainty_floor=args.certainty_floor,
        certainty_ceiling=args.certainty_ceiling,
        prior_slope=args.prior_slope,
        prior_intercept=args.prior_intercept,
        top_group_size=args.top_group_size,
        reference_window=tuple(args.reference_window),
        horizon_months=args.horizon,
    )


def _load_dataset(base: str) -> history.Dataset:
    path = store.dataset_path(base)
    if not os.path.exists(path):
        raise EmptyDatasetError(f"no dataset at {path}; run `vulntrust ingest` first")
    epoch = store.load_dataset_epoch(base) or history.DEFAULT_EPOCH
    return history.ingest_csv(path, epoch=epoch)


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)


def cmd_ingest(args) -> int:
    base = store.data_dir()
    epoch = (args.epoch_start, args.epoch_end)
    if args.csv:
        dataset = history.ingest_csv(args.csv, epoch=epoch)
    else:
        if not args.cve_dates:
            print("vulntrust ingest: --tracker-json requires --cve-dates", file=sys.stderr)
            return EXIT_USAGE
        dataset = history.ingest_tracker_json(args.tracker_json, args.cve_dates, epoch=epoch)
    if args.filter_file:
        dataset = dataset.filtered(**history.load_filter(args.filter_file))
        if not dataset.records:
            raise EmptyDatasetError("filter removed every record")
    history.write_csv(dataset, store.dataset_path(base))
    store.save_dataset_meta(base, dataset)
    with open(os.path.join(base, store.INGEST_REPORT_FILE), "w", encoding="utf-8") as fh:
        json.dump(dataset.report.as_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    _emit({"dataset": store.dataset_path(base), "epoch": list(dataset.epoch), **dataset.report.as_dict()}, None)
    return EXIT_OK


def cmd_predict(args) -> int:
    base = store.data_dir()
    dataset = _load_dataset(base)
    split = _split_from(args)
    if args.backend == "external":
        if not args.import_file:
            print("vulntrust predict: --backend external requires --import", file=sys.stderr)
            return EXIT_USAGE
        predictions = forecast.import_external(args.import_file, split)
    else:
        backend = forecast.make_backend(args.backend, alpha=args.alpha)
        predictions = forecast.predict_all(dataset, backend, split)
    out = args.out or store.predictions_path(base)
    forecast.write_predictions(out, predictions)
    print(f"wrote {len(predictions)} predictions to {out}")
    return EXIT_OK


def cmd_backtest(args) -> int:
    base = store.data_dir()
    dataset = _load_dataset(base)
    split = _split_from(args)
    backends = {}
    for name in [n.strip() for n in args.backends.split(",") if n.strip()]:
        if name == "external":
            if not args.import_file:
                print("vulntrust backtest: external backend requires --import", file=sys.stderr)
                return EXIT_USAGE
            external = forecast.import_external(args.import_file, split)
            backends[name] = forecast.make_backend("external", external=external)
        else:
            backends[name] = forecast.make_backend(name, alpha=args.alpha)
    rows = forecast.backtest(dataset, backends, split, min_total=args.min_total)
    if args.out:
        forecast.write_backtest_report(args.out, rows)
    for name, value, scored in rows:
        print(f"{name},{value:.6f},{scored}")
    return EXIT_OK


def cmd_assess(args) -> int:
    base = store.data_dir()
    dataset = _load_dataset(base)
    split = _split_from(args)
    params = _params_from(args)
    predictions_file = args.predictions or store.predictions_path(base)
    predictions = forecast.import_external(predictions_file, split)
    assessments = assess_components(predictions, dataset, params)
    snapshot = store.build_snapshot(dataset, predictions, assessments, params, split)
    store.save_snapshot(snapshot, base)

    payload = report.assessment_report(assessments, params)
    payload["fingerprint"] = snapshot.fingerprint
    if args.system:
        with open(args.system, encoding="utf-8") as fh:
            spec = parse_spec(fh.read(), known_components=assessments.keys())
        resolved = resolve_assessments(atom_names(spec.formula), assessments, dataset, params)
        system_assessment = assess_system(spec, resolved, params)
        payload["system"] = report.system_payload(system_assessment, spec, resolved)
    _emit(payload, args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    base = store.data_dir()
    snapshot = store.load_snapshot(base)
    dataset = _load_dataset(base)
    payloads = []
    for path in (args.system_a, args.system_b):
        with open(path, encoding="utf-8") as fh:
            spec = parse_spec(fh.read(), known_components=snapshot.assessments.keys())
        resolved = resolve_assessments(
            atom_names(spec.formula), snapshot.assessments, dataset, snapshot.params
        )
        assessment = assess_system(spec, resolved, snapshot.params)
        payloads.append((assessment, spec, resolved))
    ratios = ratio_report(
        payloads[0][0].equivalent_vulns,
        payloads[1][0].equivalent_vulns,
        args.actual_a,
        args.actual_b,
    )
    payload = report.comparison_payload(
        ratios,
        report.system_payload(payloads[0][0], payloads[0][1], payloads[0][2]),
        report.system_payload(payloads[1][0], payloads[1][1], payloads[1][2]),
    )
    _emit(payload, args.out)
    return EXIT_OK


def _stats_csv_and_plot(args, dataset) -> None:
    out = args.out
    if args.top is not None:
        window = tuple(args.window) if args.window else None
        rows = history.top_n(dataset, args.top, window=window)
        if out:
            report.write_top_csv(out, rows)
        else:
            print("component,count,rank")
            for component, count, rank in rows:
                print(f"{component},{count},{rank}")
        return
    if args.yearly:
        totals = history.yearly_totals(dataset)
        if out:
            report.write_yearly_csv(out, totals)
            if args.plot:
                plots.save_yearly_totals(totals, _png_path(out))
        else:
            print("year,count")
            for year in sorted(totals):
                print(f"{year},{totals[year]}")
        return
    if args.distribution is not None:
        pairs = history.distribution_export(dataset, args.distribution)
        if out:
            report.write_distribution_csv(out, pairs)
            if args.plot:
                plots.save_distribution(pairs, _png_path(out))
        else:
            print("component,total")
            for component, total in pairs:
                print(f"{component},{total}")
        return
    series = bin_monthly(dataset, args.history)
    if out:
        report.write_history_csv(out, series.start, series.counts)
        if args.plot:
            plots.save_component_history(series.component, series.start, series.counts, _png_path(out))
    else:
        print("month,count")
        from . import months as _months

        start = _months.parse_month(series.start)
        for offset, count in enumerate(series.counts):
            print(f"{_months.format_month(start + offset)},{count}")


def _png_path(csv_path: str) -> str:
    root, _ = os.path.splitext(csv_path)
    return root + ".png"


def cmd_stats(args) -> int:
    base = store.data_dir()
    dataset = _load_dataset(base)
    if args.plot and not args.out:
        print("vulntrust stats: --plot requires --out", file=sys.stderr)
        return EXIT_USAGE
    _stats_csv_and_plot(args, dataset)
    return EXIT_OK


def cmd_serve(args) -> int:
    from .service import serve

    serve(host=args.host, port=args.port)
    return EXIT_OK


COMMANDS = {
    "ingest": cmd_ingest,
    "predict": cmd_predict,
    "backtest": cmd_backtest,
    "assess": cmd_assess,
    "compare": cmd_compare,
    "stats": cmd_stats,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except DATA_ERRORS as exc:
        print(f"vulntrust {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (VulnTrustError, ZeroDivisionError) as exc:
        print(f"vulntrust {args.command}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
