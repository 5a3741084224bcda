"""Quick invariant checks on a small default scenario."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..array import ArrayConfig, steering
from ..ccm import cf_iccm, ic_pccm, mc_iccm
from ..channel import PasModel, build_rays, synthesize, true_ccm
from ..pas import angle_grid, gains_dtft
from .config import ScenarioConfig, UserSpec
from .sweep import csv_text, run_sweep


def _steering_unit_norm() -> bool:
    cfg = ArrayConfig()
    th = np.linspace(0.0, np.pi, 97)
    return bool(np.allclose(np.linalg.norm(cfg.steering_matrix(cfg.f_up, th), axis=0), 1.0, atol=1e-12))


def _ccms_valid() -> bool:
    cfg = ArrayConfig(n_antennas=32)
    model = PasModel("uniform", np.radians(70.0), np.radians(8.0))
    rng = np.random.default_rng(3)
    h = synthesize(cfg, cfg.f_up, build_rays(model, 128, rng))
    grid = gains_dtft(h, 0.0, angle_grid(model.mean, model.spread, 48), cfg)
    ests = [
        true_ccm(cfg, cfg.f_up, model),
        ic_pccm(grid, cfg),
        cf_iccm("uniform", model.mean, model.spread, cfg),
        mc_iccm(model, cfg),
    ]
    return all(e.is_psd() for e in ests)


def _specular_exact() -> bool:
    cfg = ArrayConfig(n_antennas=16)
    u = 2.0 * 3 / 16  # on-grid: chi*u = 2*pi*3/M with chi = pi
    th = float(np.arccos(u))
    a = steering(cfg, cfg.f_up, th)
    g = gains_dtft(a, 0.0, [th], cfg)
    return bool(abs(g.gains[0] - 1.0) < 1e-12)


def _sweep_deterministic() -> bool:
    cfg = ScenarioConfig(users=(UserSpec("uniform", 60.0, 5.0), UserSpec("uniform", 110.0, 5.0)), trials=3)
    cfg = replace(cfg, sweep="snr", snr_grid_db=(10.0, 30.0))
    a = csv_text(run_sweep(cfg), "snr")
    b = csv_text(run_sweep(cfg), "snr")
    return a == b


def _metric_ranges() -> bool:
    cfg = ScenarioConfig(trials=4)
    for p in run_sweep(cfg):
        for r in p.records:
            if not np.isfinite(r.mean):
                return False
            if r.metric.startswith("eta") and not 0.0 <= r.mean <= 1.0:
                return False
            if r.metric.startswith("nmse") and r.mean < 0.0:
                return False
    return True


CHECKS = (
    ("steering vectors have unit norm", _steering_unit_norm),
    ("reconstructed covariances are Hermitian PSD", _ccms_valid),
    ("on-grid specular gain is exact", _specular_exact),
    ("efficiency and NMSE stay in range", _metric_ranges),
    ("repeated sweeps are byte-identical", _sweep_deterministic),
)


def run_selftest(out=print) -> bool:
    ok = True
    for name, check in CHECKS:
        try:
            passed = check()
        except Exception as exc:  # report, keep going
            passed = False
            name = f"{name} ({exc})"
        out(f"{'PASS' if passed else 'FAIL'}  {name}")
        ok &= passed
    return ok
