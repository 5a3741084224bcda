"""One Monte Carlo trial of the two-slot training pipeline.

Slot 0 carries orthogonal preambles; the angle estimates it yields are used
to schedule pilot groups and to demix the shared-pilot observation of slot 1.
Every method sees the same channels and the same noise draws.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from ..angles import beamspace, estimate_angles
from ..ccm import cf_iccm, ic_pccm, infer_downlink, mc_iccm
from ..channel import PasModel, build_rays, redraw_phases, synthesize, true_ccm
from ..covariance import CcmEstimate
from ..downlink import Beamformer, downlink_training, eigen_beamformer, ls_downlink, mmse_downlink, sbem_beamformer
from ..array import rotation_diag
from ..pas import estimate_gains, rotated_grid
from ..scheduler import adma_group
from ..uplink import group_observation, ls_preamble, mmse_uplink, sbem_estimate
from .config import ScenarioConfig
from .metrics import efficiency, nmse

METRICS = ("eta_ul", "eta_dl", "nmse_ul", "nmse_dl", "rank")


class TrialError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrialResult:
    """Raw per-user values keyed by ``(method, metric)``."""

    trial: int
    values: dict

    def user_mean(self, method: str, metric: str) -> float:
        return float(np.mean(self.values[method, metric]))


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


_TRUE_CACHE: dict = {}


def _true(cfg: ScenarioConfig, f: float, model: PasModel) -> CcmEstimate:
    key = (cfg.array, f, model.kind, model.mean, model.spread, cfg.quadrature_n)
    r = _TRUE_CACHE.get(key)
    if r is None:
        if len(_TRUE_CACHE) > 256:
            _TRUE_CACHE.clear()
        r = _TRUE_CACHE[key] = true_ccm(cfg.array, f, model, cfg.quadrature_n)
    return r


def _sbem_columns(h_sbem: np.ndarray, psi: float, nu: int) -> np.ndarray:
    """The ``nu`` strongest rotated DFT beams of an SBEM estimate."""
    m = h_sbem.size
    keep = np.sort(np.argsort(-np.abs(beamspace(h_sbem, psi)), kind="stable")[:nu])
    # column q of (F Phi)^H
    cols = np.exp(2j * np.pi * np.outer(np.arange(m), keep) / m) / np.sqrt(m)
    return rotation_diag(m, psi).conj()[:, None] * cols


def run_trial(cfg: ScenarioConfig, trial: int) -> TrialResult:
    try:
        return _run(cfg, trial)
    except Exception as exc:
        raise TrialError(f"trial {trial} (seed {cfg.seed}): {exc}") from exc


def _run(cfg: ScenarioConfig, trial: int) -> TrialResult:
    arr = cfg.array
    tr = cfg.training
    f_u, f_d = arr.f_up, arr.f_down
    rng = trial_rng(cfg.seed, trial)
    # downlink feedback noise gets its own stream so every method can replay it
    dl_seeds = np.random.SeedSequence(cfg.seed, spawn_key=(trial, 1)).spawn(len(cfg.users))
    ccm_methods = [m for m in cfg.methods if m != "SBEM"]
    k_users = len(cfg.users)
    models = [u.model() for u in cfg.users]
    g = cfg.channel_power

    # slot 0: orthogonal preambles
    rays = [build_rays(mod, cfg.rays, rng) for mod in models]
    h0 = [synthesize(arr, f_u, r, user=k, slot=0, scale=np.sqrt(g)) for k, r in enumerate(rays)]
    h_ini = [ls_preamble(h, tr.rho_u, rng) for h in h0]
    est0 = [estimate_angles(h, arr, tr.kappa, cfg.psi_grid) for h in h_ini]
    groups = adma_group(est0, cfg.guard)

    # slot 1: fresh phases on both links
    rays1 = [redraw_phases(r, rng) for r in rays]
    h1 = [synthesize(arr, f_u, r, user=k, slot=1, scale=np.sqrt(g)) for k, r in enumerate(rays1)]
    rays_d = [redraw_phases(r, rng) for r in rays]
    hd = [synthesize(arr, f_d, r, user=k, slot=1, scale=np.sqrt(g * cfg.mu)) for k, r in enumerate(rays_d)]

    h_sbem = [None] * k_users
    for grp in groups.groups:
        y = group_observation([h1[k] for k in grp], tr.rho_u, rng)
        for k in grp:
            h_sbem[k] = sbem_estimate(y, est0[k].psi, est0[k].bins)

    # angle update and covariance reconstruction
    est1 = [estimate_angles(h, arr, tr.kappa, cfg.psi_grid) for h in h_sbem]
    n_grid = cfg.effective_grid_size
    r_ul: dict = defaultdict(dict)
    r_dl: dict = defaultdict(dict)
    for k, (e, mod) in enumerate(zip(est1, models)):
        if "TrueCCM" in ccm_methods:
            r_ul["TrueCCM"][k] = _true(cfg, f_u, mod).scaled(g)
            r_dl["TrueCCM"][k] = _true(cfg, f_d, mod).scaled(g * cfg.mu)
        if "IC-pCCM" in ccm_methods:
            gains = estimate_gains(h_sbem[k], e.psi, rotated_grid(e, arr, n_grid), arr)
            r_ul["IC-pCCM"][k] = ic_pccm(gains, arr)
            r_dl["IC-pCCM"][k] = infer_downlink(gains, arr, cfg.mu)
        if "CF-iCCM" in ccm_methods:
            r_ul["CF-iCCM"][k] = cf_iccm(mod.kind, e.mean, e.spread, arr, f_u).scaled(g)
            r_dl["CF-iCCM"][k] = cf_iccm(mod.kind, e.mean, e.spread, arr, f_d).scaled(g * cfg.mu)
        if "MC-iCCM" in ccm_methods:
            est_model = PasModel(mod.kind, e.mean, e.spread)
            r_ul["MC-iCCM"][k] = mc_iccm(est_model, arr, f_u, cfg.quadrature_n).scaled(g)
            r_dl["MC-iCCM"][k] = mc_iccm(est_model, arr, f_d, cfg.quadrature_n).scaled(g * cfg.mu)

    values: dict = defaultdict(list)
    truth_ul = [_true(cfg, f_u, mod) for mod in models]
    truth_dl = [_true(cfg, f_d, mod) for mod in models]
    for method in cfg.methods:
        beams: list[Beamformer] = []
        for k in range(k_users):
            if method == "SBEM":
                beams.append(sbem_beamformer(h_sbem[k], est1[k].psi, arr, tr.nu, user=k))
            else:
                beams.append(eigen_beamformer(r_dl[method][k], tr.nu, user=k))
        for grp in groups.groups:
            for k in grp:
                if method == "SBEM":
                    h_ul = h_sbem[k]
                    cols_ul = _sbem_columns(h_sbem[k], est1[k].psi, tr.nu)
                else:
                    others = [r_ul[method][i] for i in grp if i != k]
                    h_ul = mmse_uplink(h_sbem[k], r_ul[method][k], others, tr.rho_u, tr.nu)
                    cols_ul = r_ul[method][k].truncate(tr.nu)[0]
                    values[method, "rank"].append(r_ul[method][k].power_rank())
                group_beams = [beams[i] for i in grp]
                obs = downlink_training(hd[k], group_beams, tr.rho_d, np.random.default_rng(dl_seeds[k]))
                if method == "SBEM":
                    h_dl = ls_downlink(obs, beams[k])
                else:
                    h_dl = mmse_downlink(obs, r_dl[method][k], group_beams, tr.rho_d)
                values[method, "eta_ul"].append(efficiency(truth_ul[k], cols_ul))
                values[method, "eta_dl"].append(efficiency(truth_dl[k], beams[k].columns))
                values[method, "nmse_ul"].append(nmse(h1[k], h_ul))
                values[method, "nmse_dl"].append(nmse(hd[k], h_dl))
    return TrialResult(trial, dict(values))
