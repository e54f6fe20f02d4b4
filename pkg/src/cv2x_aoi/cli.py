"""Command-line front end: single runs, sweeps, experiment presets."""

from __future__ import annotations

import argparse
import json
import os
import statistics
import sys

from .analytic import AnalyticParams, p_no_collision
from .config import (ConfigError, ScenarioConfig, apply_overrides,
                     coerce_value, load_config, validate)
from .engine import run, run_sweep
from .report import emit

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _parse_seeds(text: str) -> list[int]:
    """"7" -> [7]; "1..10" -> [1, ..., 10]."""
    if ".." in text:
        lo, _, hi = text.partition("..")
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ConfigError(f"empty seed range {text!r}")
        return list(range(lo, hi + 1))
    return [int(text)]


def _parse_set(items: list[str]) -> dict:
    overrides = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        overrides[key.strip()] = value.strip()
    return overrides


def _parse_axis(items: list[str]) -> list[tuple]:
    axes = []
    for item in items:
        key, sep, values = item.partition("=")
        if not sep or not key or not values:
            raise ConfigError(f"--axis expects field=v1,v2,..., got {item!r}")
        key = key.strip()
        axes.append((key, [coerce_value(key, v) for v in values.split(",")]))
    return axes


def _base_config(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    overrides = _parse_set(args.set)
    if args.seed is not None:
        overrides["rng_seed"] = args.seed
    return apply_overrides(cfg, overrides)


def _out_dir(args) -> str:
    if args.out:
        return args.out
    return os.environ.get("CV2X_SIM_OUT", "results")


def _say(args, text: str) -> None:
    if not args.quiet:
        print(text)


def _emit_sweep(results: list[dict], out_dir: str, name: str, args) -> None:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(results, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _say(args, f"wrote {path}")


def _summarize_cells(results: list[dict], metric: str) -> list[dict]:
    """Collapse per-seed sweep results into per-cell mean/stddev rows."""
    cells: dict[tuple, list[float]] = {}
    failures: dict[tuple, int] = {}
    for res in results:
        key = tuple(sorted((k, v) for k, v in res["params"].items()
                           if k != "rng_seed"))
        if res["status"] == "ok" and res["summary"][metric] is not None:
            cells.setdefault(key, []).append(res["summary"][metric])
        else:
            failures[key] = failures.get(key, 0) + 1
    rows = []
    for key, values in cells.items():
        rows.append({
            "params": dict(key),
            "n": len(values),
            "failed": failures.get(key, 0),
            "mean": statistics.fmean(values),
            "stddev": statistics.stdev(values) if len(values) > 1 else 0.0,
        })
    return rows


def _cmd_run(args) -> int:
    cfg = validate(_base_config(args))
    report = run(cfg, backend=args.backend)
    out_dir = _out_dir(args)
    written = emit(report, out_dir, fmt=args.format)
    for path in written:
        _say(args, f"wrote {path}")
    _say(args, f"success_rate={report.success_rate!r} "
               f"mean_queue_aoi={report.mean_queue_aoi!r} "
               f"mean_receiver_aoi={report.mean_receiver_aoi!r}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    base = _base_config(args)
    axes = _parse_axis(args.axis)
    seeds = _parse_seeds(args.seeds) if args.seeds else [base.rng_seed]
    results = run_sweep(base, axes, seeds, jobs=args.jobs)
    _emit_sweep(results, _out_dir(args), "sweep.json", args)
    bad = [r for r in results if r["status"] != "ok"]
    for res in bad:
        _say(args, f"cell {res['params']} failed: {res['error']}")
    return EXIT_OK if not bad else EXIT_RUNTIME


def _cmd_table1(args) -> int:
    """Success-rate grid: Nv x RRI x access mode, mean +/- stddev over seeds."""
    base = _base_config(args)
    axes = [("num_vehicles", [30, 50]),
            ("rri", [20, 50, 100]),
            ("access_mode", ["OMA", "NOMA"])]
    seeds = _parse_seeds(args.seeds) if args.seeds else [base.rng_seed]
    results = run_sweep(base, axes, seeds, jobs=args.jobs)
    out_dir = _out_dir(args)
    _emit_sweep(results, out_dir, "table1_cells.json", args)
    rows = _summarize_cells(results, "success_rate")
    lines = ["num_vehicles,rri,access_mode,n_seeds,mean_success,stddev_success"]
    for row in rows:
        p = row["params"]
        lines.append(f"{p['num_vehicles']},{p['rri']},{p['access_mode']},"
                     f"{row['n']},{row['mean']!r},{row['stddev']!r}")
    path = os.path.join(out_dir, "table1.csv")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    _say(args, f"wrote {path}")
    if not args.quiet:
        for line in lines:
            print(line)
    return EXIT_OK


def _cmd_fig_queues(args) -> int:
    """Per-slot queue-age series (overall and per message type) across RRIs."""
    base = _base_config(args)
    seeds = _parse_seeds(args.seeds) if args.seeds else [base.rng_seed]
    out_dir = _out_dir(args)
    for rri in (20, 50, 100):
        cfg = validate(apply_overrides(base, {"rri": rri,
                                              "rng_seed": seeds[0]}))
        report = run(cfg, backend=args.backend)
        sub = os.path.join(out_dir, f"queues_rri{rri}")
        for path in emit(report, sub, fmt=args.format):
            _say(args, f"wrote {path}")
    return EXIT_OK


def _cmd_fig_aoi(args) -> int:
    """Per-slot receiver-age series: RRI x access mode grid."""
    base = _base_config(args)
    seeds = _parse_seeds(args.seeds) if args.seeds else [base.rng_seed]
    out_dir = _out_dir(args)
    for mode in ("OMA", "NOMA"):
        for rri in (20, 50, 100):
            cfg = validate(apply_overrides(
                base, {"rri": rri, "access_mode": mode,
                       "rng_seed": seeds[0]}))
            report = run(cfg, backend=args.backend)
            sub = os.path.join(out_dir, f"aoi_{mode.lower()}_rri{rri}")
            for path in emit(report, sub, fmt=args.format):
                _say(args, f"wrote {path}")
    return EXIT_OK


def _cmd_analytic(args) -> int:
    """Evaluate the closed-form non-collision probability."""
    fields = {"pi": 0.0, "p_rk": 1.0, "csr": 100.0, "nv": 30.0, "gamma": 100.0}
    for key, value in _parse_set(args.set).items():
        if key not in fields:
            raise ConfigError(f"unknown analytic parameter {key!r}; "
                              f"expected one of {sorted(fields)}")
        fields[key] = float(value)
    params = AnalyticParams(pi=fields["pi"], p_rk=fields["p_rk"],
                            csr=int(fields["csr"]), num_vehicles=int(fields["nv"]),
                            selection_window=int(fields["gamma"]))
    print(repr(p_no_collision(params)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cv2x-sim",
        description="Slot-based C-V2X mode-4 sidelink simulator with "
                    "age-of-information metrics.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seeds=False):
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--set", action="append", default=[], metavar="K=V",
                       help="override one config field (repeatable)")
        p.add_argument("--seed", type=int, help="RNG seed for a single run")
        if seeds:
            p.add_argument("--seeds", metavar="N..M",
                           help="seed range, e.g. 1..10")
        p.add_argument("--out", help="output directory "
                                     "(default $CV2X_SIM_OUT or ./results)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--quiet", action="store_true")
        p.add_argument("--jobs", type=int, default=1,
                       help="parallel worker processes for sweeps")
        p.add_argument("--backend", choices=("auto", "c", "py"),
                       default="auto", help="simulation kernel to use")

    p = sub.add_parser("run", help="single simulation run")
    common(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="Cartesian parameter sweep")
    common(p, seeds=True)
    p.add_argument("--axis", action="append", default=[],
                   metavar="FIELD=V1,V2,...",
                   help="sweep axis (repeatable)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("table1",
                       help="success-rate grid preset (Nv x RRI x mode)")
    common(p, seeds=True)
    p.set_defaults(func=_cmd_table1)

    p = sub.add_parser("fig-queues",
                       help="queue-age time-series preset across RRIs")
    common(p, seeds=True)
    p.set_defaults(func=_cmd_fig_queues)

    p = sub.add_parser("fig-aoi",
                       help="receiver-age time-series preset (RRI x mode)")
    common(p, seeds=True)
    p.set_defaults(func=_cmd_fig_aoi)

    p = sub.add_parser("analytic",
                       help="evaluate the closed-form non-collision "
                            "probability")
    p.add_argument("--set", action="append", default=[], metavar="K=V",
                   help="pi, p_rk, csr, nv, gamma")
    p.set_defaults(func=_cmd_analytic)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    main()
