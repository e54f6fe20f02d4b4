"""Parameter sweeps: Cartesian grid of config overrides x seeds."""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields

from ..config import ConfigError, ScenarioConfig, apply_overrides, validate
from .runner import run


def _run_cell(args):
    cfg, key = args
    try:
        report = run(validate(cfg))
        summary = report.summary_dict()
        status = "ok"
        error = None
    except Exception as exc:  # a failing cell must not kill the sweep
        summary, status, error = None, "error", str(exc)
    return key, {"params": dict(key), "status": status, "error": error,
                 "summary": summary}


def run_sweep(base: ScenarioConfig, axes: list, seeds: list,
              jobs: int = 1) -> list[dict]:
    """Run every combination of ``axes`` values x ``seeds``.

    ``axes`` is a list of (field_name, [values]); an empty list means a
    single cell. Results are keyed by the parameter tuple and returned in
    grid order regardless of execution order. Cell failures are reported
    per cell (status == "error") without aborting the sweep.
    """
    known = {f.name for f in fields(ScenarioConfig)}
    for name, values in axes:
        if name not in known:
            raise ConfigError(f"unknown sweep axis {name!r}")
        if not values:
            raise ConfigError(f"sweep axis {name!r} has no values")
    if not seeds:
        seeds = [base.rng_seed]

    tasks = []
    for combo in itertools.product(*[values for _, values in axes]):
        overrides = {name: value for (name, _), value in zip(axes, combo)}
        for seed in seeds:
            cfg = apply_overrides(base, {**overrides, "rng_seed": seed})
            key = tuple(sorted(overrides.items())) + (("rng_seed", seed),)
            tasks.append((cfg, key))

    if jobs <= 1:
        results = dict(_run_cell(task) for task in tasks)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = dict(pool.map(_run_cell, tasks))
    return [results[key] for _, key in tasks]
