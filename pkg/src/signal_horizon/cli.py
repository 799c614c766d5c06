"""Command-line entry point: sweep, spectrum, threshold, plot.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, encodings
from .config import config_from_dict, config_to_dict, load_config, preset
from .errors import ConfigError, NumericalError
from .harness import run_sweep, threshold_report
from .pauli import enumerate_all, pauli_trace, weight_spectrum
from .serialization import (
    SCHEMA_VERSION,
    dump_json,
    format_float,
    read_results,
    records_to_csv,
    records_to_json,
    write_text,
)

log = logging.getLogger("signal_horizon")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

OUT_ENV = "SIGNAL_HORIZON_OUT"


def _resolve_config(args):
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.preset:
        return config_from_dict(preset(args.preset), allow_extended_p=args.allow_extended_p)
    if not args.config:
        raise ConfigError("one of --config or --preset is required")
    return load_config(args.config, allow_extended_p=args.allow_extended_p)


def _out_dir(args) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV) or "results")


def _manifest(command, config, outputs, started, extra=None) -> dict:
    doc = {
        "command": command,
        "artifact_version": __version__,
        "schema_version": SCHEMA_VERSION,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "wall_clock_seconds": round(time.perf_counter() - started, 3),
        "config": config_to_dict(config) if config is not None else None,
        "outputs": [str(p) for p in outputs],
    }
    if extra:
        doc.update(extra)
    return doc


def cmd_sweep(args) -> int:
    started = time.perf_counter()
    config = _resolve_config(args)
    out = _out_dir(args)
    records = run_sweep(config, workers=args.workers)
    outputs = [
        write_text(out / "results.csv", records_to_csv(records)),
        write_text(out / "results.json", records_to_json(records)),
    ]
    if args.plot:
        from .plotting import plot_results

        outputs += plot_results(records, out)
    failed = sum(r.status != "ok" for r in records)
    manifest = out / "manifest.json"
    outputs.append(manifest)
    dump_json(manifest, _manifest("sweep", config, outputs, started, {"failed_points": failed}))
    print(f"wrote {len(records)} records to {out}")
    if failed:
        print(f"{failed} sweep points failed; see the status column", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_spectrum(args) -> int:
    started = time.perf_counter()
    config = _resolve_config(args)
    spec = config.encoding
    out = _out_dir(args)
    strings = enumerate_all(spec.n)  # raises beyond the full-sweep limit
    plus, minus = encodings.prepare_pair(spec)
    delta = encodings.signal_operator(plus, minus)
    spectrum = weight_spectrum(delta)

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["weight", "W"])
    for ell, value in enumerate(spectrum):
        w.writerow([ell, format_float(float(value))])
    spectrum_path = write_text(out / "spectrum.csv", buf.getvalue())

    overlaps = [(pauli, pauli_trace(pauli, delta).real) for pauli in strings[1:]]
    order = sorted(range(len(overlaps)), key=lambda i: (-round(abs(overlaps[i][1]), 12), i))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["rank", "pauli", "weight", "overlap", "coefficient"])
    for rank, i in enumerate(order[: args.top], start=1):
        pauli, value = overlaps[i]
        w.writerow([rank, pauli.label, pauli.weight, format_float(value),
                    format_float(value / (1 << spec.n))])  # fmt: skip
    coeff_path = write_text(out / "coefficients.csv", buf.getvalue())

    outputs = [spectrum_path, coeff_path, out / "manifest.json"]
    dump_json(out / "manifest.json", _manifest("spectrum", config, outputs, started))
    print("W_l:", " ".join(format_float(float(v)) for v in spectrum))
    return EXIT_OK


THRESHOLD_FIELDS = (
    "encoding", "n", "theta", "k", "epsilon", "A_k_zero",
    "p_star", "p_star_closed_form", "sampled_crossing_p",
)  # fmt: skip


def cmd_threshold(args) -> int:
    started = time.perf_counter()
    config = _resolve_config(args)
    out = _out_dir(args)
    records = run_sweep(config, workers=args.workers)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(THRESHOLD_FIELDS)
    for k in config.k_values:
        rep = threshold_report(config, k, eps=args.eps, records=records)
        row = []
        for name in THRESHOLD_FIELDS:
            value = getattr(rep, name)
            row.append("none" if value is None else format_float(value))
        w.writerow(row)
        print(f"k={k}: p*={row[6]} (eps={row[4]})")
    path = write_text(out / "thresholds.csv", buf.getvalue())
    outputs = [path, out / "manifest.json"]
    dump_json(out / "manifest.json", _manifest("threshold", config, outputs, started))
    return EXIT_OK


def cmd_plot(args) -> int:
    from .plotting import plot_results

    started = time.perf_counter()
    results = Path(args.results)
    out = Path(args.out) if args.out else results.parent
    records = read_results(results)
    paths = plot_results(records, out)
    for p in paths:
        print(f"wrote {p}")
    manifest = out / "plot_manifest.json"
    dump_json(manifest, _manifest("plot", None, paths + [manifest], started,
                                  {"results": str(results)}))  # fmt: skip
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="signal-horizon",
        description="Locality-restricted discrimination of noisy quantum encodings.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def config_args(p):
        p.add_argument("--config", help="JSON experiment config")
        p.add_argument("--preset", choices=["fig1", "fig2"], help="built-in config")
        p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./results)")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--allow-extended-p", action="store_true",
                       help="permit p grid points up to 1.0")  # fmt: skip

    p = sub.add_parser("sweep", help="run the (p, k) sweep and write results")
    config_args(p)
    p.add_argument("--plot", action="store_true", help="also render SVG figures")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("spectrum", help="Pauli-weight spectrum of the noiseless signal")
    config_args(p)
    p.add_argument("--top", type=int, default=20, help="number of largest coefficients to list")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("threshold", help="breakdown threshold p* per k")
    config_args(p)
    p.add_argument("--eps", type=float, help="override the operational epsilon 1/sqrt(n_eval)")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("plot", help="render figures from a results file")
    p.add_argument("--results", required=True, help="results.csv or results.json")
    p.add_argument("--out", help="output directory (default: next to the results file)")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
