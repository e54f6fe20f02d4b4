"""Run results: per-slot series, aggregate summary, file emission."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .config import MessageType, ValidatedConfig, config_to_dict

SERIES_COLUMNS = ("slot", "phi_bar", "delta_t", "tx", "rx_success",
                  "rx_attempts", "collisions", "drops")


@dataclass
class SimulationReport:
    config: ValidatedConfig
    seed: int
    series: dict                 # column name -> ndarray, len == sim_duration
    type_series: np.ndarray      # per-slot mean in-queue age per message type
    totals: dict                 # integer event counters over the whole run
    success_rate: float | None
    mean_queue_aoi: float        # time-averaged phi_bar after discard_slots
    mean_receiver_aoi: float     # time-averaged delta_t after discard_slots
    per_type_queue_aoi: dict     # MessageType -> mean age over nonempty slots (or None)
    est_pi: float
    mc_noncollision: float | None
    analytic_p_ncol: float | None
    state_digest: str
    trace: dict | None = field(default=None, repr=False)

    def summary_dict(self) -> dict:
        out = {
            "seed": self.seed,
            "success_rate": self.success_rate,
            "mean_queue_aoi": self.mean_queue_aoi,
            "mean_receiver_aoi": self.mean_receiver_aoi,
            "est_pi": self.est_pi,
            "mc_noncollision": self.mc_noncollision,
            "analytic_p_ncol": self.analytic_p_ncol,
            "state_digest": self.state_digest,
        }
        out.update({f"total_{k}": v for k, v in self.totals.items()})
        for msg_type in MessageType:
            value = self.per_type_queue_aoi.get(msg_type)
            out[f"queue_aoi_{msg_type.name.lower()}"] = value
        return out


def _fmt(value) -> str:
    """Serialize one cell; floats keep full round-trip precision."""
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_atomic(path: str, text: str) -> None:
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise OSError(f"writing {path}: {exc}") from exc


def series_csv_text(report: SimulationReport) -> str:
    lines = [",".join(SERIES_COLUMNS)]
    n = len(report.series["phi_bar"])
    cols = [report.series[c] for c in SERIES_COLUMNS[1:]]
    for t in range(n):
        lines.append(",".join([str(t)] + [_fmt(col[t]) for col in cols]))
    return "\n".join(lines) + "\n"


def type_series_csv_text(report: SimulationReport) -> str:
    header = ["slot"] + [f"phi_{t.name.lower()}" for t in MessageType]
    lines = [",".join(header)]
    for t in range(report.type_series.shape[0]):
        row = [str(t)] + [_fmt(report.type_series[t, k]) for k in range(4)]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def summary_csv_text(report: SimulationReport) -> str:
    summary = report.summary_dict()
    keys = list(summary)
    return (",".join(keys) + "\n"
            + ",".join(_fmt(summary[k]) for k in keys) + "\n")


def manifest_dict(report: SimulationReport) -> dict:
    from . import __version__

    return {
        "config": config_to_dict(report.config.raw),
        "seed": report.seed,
        "version": __version__,
    }


def emit(report: SimulationReport, out_dir: str, fmt: str = "csv") -> list[str]:
    """Write summary.{csv|json}, series.csv, series_types.csv, manifest.json.

    Every file is reproducible byte-for-byte from the manifest (same
    config + seed => same bytes, regardless of backend or job count).
    """
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    os.makedirs(out_dir, exist_ok=True)
    written = []

    if fmt == "csv":
        path = os.path.join(out_dir, "summary.csv")
        _write_atomic(path, summary_csv_text(report))
    else:
        path = os.path.join(out_dir, "summary.json")
        _write_atomic(path, json.dumps(report.summary_dict(), indent=2,
                                       sort_keys=True) + "\n")
    written.append(path)

    path = os.path.join(out_dir, "series.csv")
    _write_atomic(path, series_csv_text(report))
    written.append(path)

    path = os.path.join(out_dir, "series_types.csv")
    _write_atomic(path, type_series_csv_text(report))
    written.append(path)

    path = os.path.join(out_dir, "manifest.json")
    _write_atomic(path, json.dumps(manifest_dict(report), indent=2,
                                   sort_keys=True) + "\n")
    written.append(path)
    return written
