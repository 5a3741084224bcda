"""Seeded Monte Carlo sweeps, aggregation and CSV output."""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .config import ScenarioConfig
from .trial import METRICS, TrialResult, run_trial

CSV_HEADER = (
    "method", "sweep_name", "sweep_value", "metric", "mean", "stderr", "trials",
    "M", "f_u_hz", "f_d_hz", "snr_db", "nu", "kappa", "L", "pas_kind", "as_deg", "seed",
)


@dataclass(frozen=True)
class MetricsRecord:
    method: str
    sweep_value: float | None
    metric: str
    mean: float
    stderr: float
    trials: int


@dataclass(frozen=True)
class SweepPoint:
    """Records of one sweep value together with the scenario that produced them."""

    config: ScenarioConfig
    sweep_value: float | None
    records: tuple[MetricsRecord, ...]
    raw: tuple[TrialResult, ...] = ()

    def get(self, method: str, metric: str) -> MetricsRecord:
        for r in self.records:
            if r.method == method and r.metric == metric:
                return r
        raise KeyError((method, metric))


def _run_chunk(args) -> list[TrialResult]:
    cfg, trials = args
    with threadpool_limits(limits=1):
        return [run_trial(cfg, t) for t in trials]


def run_trials(cfg: ScenarioConfig, workers: int = 1) -> list[TrialResult]:
    """All trials of one scenario, in trial order whatever the worker count."""
    idx = list(range(cfg.trials))
    if workers <= 1 or cfg.trials == 1:
        return _run_chunk((cfg, idx))
    n_chunks = min(cfg.trials, 4 * workers)
    chunks = [idx[i::n_chunks] for i in range(n_chunks)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_chunk, [(cfg, c) for c in chunks]))
    out = [r for part in parts for r in part]
    return sorted(out, key=lambda r: r.trial)


def aggregate(results: list[TrialResult], cfg: ScenarioConfig, sweep_value=None) -> tuple[MetricsRecord, ...]:
    """Mean and standard error over trials of the per-trial user average."""
    records = []
    for method in cfg.methods:
        for metric in METRICS:
            if (method, metric) not in results[0].values:
                continue
            x = np.array([r.user_mean(method, metric) for r in results])
            se = float(np.std(x, ddof=1) / np.sqrt(x.size)) if x.size > 1 else 0.0
            records.append(MetricsRecord(method, sweep_value, metric, float(np.mean(x)), se, x.size))
    return tuple(records)


def run_sweep(cfg: ScenarioConfig, workers: int = 1, keep_raw: bool = False) -> list[SweepPoint]:
    points = []
    for v in cfg.sweep_values():
        sub = cfg.at(v)
        res = run_trials(sub, workers)
        points.append(SweepPoint(sub, v, aggregate(res, sub, v), tuple(res) if keep_raw else ()))
    return points


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)


def _g(x) -> str:
    return "" if x is None else f"{x:.9g}"


def csv_text(points: list[SweepPoint], sweep_name: str | None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for p in points:
        c = p.config
        kinds = sorted({u.pas for u in c.users})
        spreads = sorted({u.spread_deg for u in c.users})
        for r in p.records:
            w.writerow([
                r.method, sweep_name or "", _g(r.sweep_value), r.metric, _g(r.mean), _g(r.stderr), r.trials,
                c.array.n_antennas, _g(c.array.f_up), _g(c.array.f_down), _g(c.snr_db), c.nu, c.kappa,
                c.effective_grid_size, "|".join(kinds), "|".join(_g(s) for s in spreads), c.seed,
            ])
    return buf.getvalue()


def write_csv(points: list[SweepPoint], sweep_name: str | None, path: str | Path) -> None:
    path = Path(path)
    try:
        path.write_text(csv_text(points, sweep_name), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
