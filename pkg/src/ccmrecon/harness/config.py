"""Scenario configuration and its JSON form (angles in degrees, frequencies in Hz)."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from ..array import SPEED_OF_LIGHT, ArrayConfig
from ..channel import DEFAULT_QUADRATURE, DEFAULT_RAYS, PasModel
from ..numerics import ContractError
from ..pas import default_grid_size
from ..angles import DEFAULT_PSI_GRID
from ..uplink import TrainingConfig

METHODS = ("IC-pCCM", "CF-iCCM", "MC-iCCM", "TrueCCM", "SBEM")
SWEEPS = ("snr", "spread", "nu")
# "antenna": channels carry unit average power per antenna, so snr_db is the
# per-antenna receive SNR.  "array": unit total channel power.
SNR_REFERENCES = ("antenna", "array")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class UserSpec:
    """One user with a single multipath component."""

    pas: str = "uniform"
    mean_deg: float = 60.0
    spread_deg: float = 10.0

    def model(self) -> PasModel:
        return PasModel(self.pas, np.radians(self.mean_deg), np.radians(self.spread_deg))


@dataclass(frozen=True)
class ScenarioConfig:
    array: ArrayConfig = field(default_factory=ArrayConfig)
    users: tuple[UserSpec, ...] = (UserSpec(),)
    snr_db: float = 10.0
    kappa: int = 16
    nu: int = 16
    grid_size: int | None = None
    methods: tuple[str, ...] = METHODS
    sweep: str | None = None
    snr_grid_db: tuple[float, ...] = (0.0, 10.0, 20.0, 30.0, 40.0)
    spread_grid_deg: tuple[float, ...] = (2.0, 5.0, 10.0, 15.0, 20.0)
    nu_grid: tuple[int, ...] = (8, 16, 24, 32, 48, 64)
    trials: int = 500
    seed: int = 1
    mu: float = 1.0
    quadrature_n: int = DEFAULT_QUADRATURE
    psi_grid: int = DEFAULT_PSI_GRID
    rays: int = DEFAULT_RAYS
    guard: float = 0.0
    snr_reference: str = "array"

    def __post_init__(self):
        if self.snr_reference not in SNR_REFERENCES:
            raise ConfigError(f"snr_reference must be one of {SNR_REFERENCES}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.methods:
            raise ConfigError("at least one method is required")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ConfigError(f"unknown methods {sorted(unknown)}")
        if self.sweep is not None and self.sweep not in SWEEPS:
            raise ConfigError(f"sweep must be one of {SWEEPS} or null")
        if not self.users:
            raise ConfigError("at least one user is required")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.mu <= 0:
            raise ConfigError("mu must be positive")
        try:
            for u in self.users:
                if u.pas not in ("uniform", "laplacian"):
                    raise ConfigError(f"scenario users need a uniform or laplacian PAS, got {u.pas!r}")
                u.model().check_open_support()
            self.training.check(self.array.n_antennas)
        except ContractError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def training(self) -> TrainingConfig:
        return TrainingConfig.from_db(self.snr_db, kappa=self.kappa, nu=self.nu, grid_size=self.grid_size)

    @property
    def channel_power(self) -> float:
        """Average ``||h||^2`` of every user's channel."""
        return float(self.array.n_antennas) if self.snr_reference == "antenna" else 1.0

    @property
    def effective_grid_size(self) -> int:
        if self.grid_size is not None:
            return self.grid_size
        return default_grid_size(self.array.n_antennas, self.kappa)

    def sweep_values(self) -> tuple:
        if self.sweep == "snr":
            return tuple(self.snr_grid_db)
        if self.sweep == "spread":
            return tuple(self.spread_grid_deg)
        if self.sweep == "nu":
            return tuple(self.nu_grid)
        return (None,)

    def at(self, value) -> "ScenarioConfig":
        """This scenario with the sweep variable pinned to ``value``."""
        if self.sweep is None or value is None:
            return self
        if self.sweep == "snr":
            return replace(self, snr_db=float(value), sweep=None)
        if self.sweep == "spread":
            users = tuple(replace(u, spread_deg=float(value)) for u in self.users)
            return replace(self, users=users, sweep=None)
        return replace(self, nu=int(value), sweep=None)

    def to_dict(self) -> dict:
        a = self.array
        d = {
            "array": {"M": a.n_antennas, "f_u_hz": a.f_up, "f_d_hz": a.f_down, "spacing_m": a.spacing, "c": a.c},
            "users": [asdict(u) for u in self.users],
            "training": {"snr_db": self.snr_db, "kappa": self.kappa, "nu": self.nu, "L": self.grid_size},
        }
        for k in ("methods", "sweep", "snr_grid_db", "spread_grid_deg", "nu_grid", "trials", "seed",
                  "mu", "quadrature_n", "psi_grid", "rays", "guard", "snr_reference"):
            v = getattr(self, k)
            d[k] = list(v) if isinstance(v, tuple) else v
        return d


def from_dict(d: dict) -> ScenarioConfig:
    d = dict(d)
    arr = d.pop("array", {}) or {}
    known_array = {"M", "f_u_hz", "f_d_hz", "spacing_m", "c"}
    if set(arr) - known_array:
        raise ConfigError(f"unknown array keys {sorted(set(arr) - known_array)}")
    try:
        array = ArrayConfig(
            n_antennas=int(arr.get("M", 128)),
            f_up=float(arr.get("f_u_hz", 2.0e9)),
            f_down=float(arr.get("f_d_hz", 2.1e9)),
            spacing=arr.get("spacing_m"),
            c=float(arr.get("c", SPEED_OF_LIGHT)),
        )
    except ContractError as exc:
        raise ConfigError(str(exc)) from exc

    users = tuple(UserSpec(**u) for u in d.pop("users", [asdict(UserSpec())]))
    tr = d.pop("training", {}) or {}
    kw = {}
    if "snr_db" in tr:
        kw["snr_db"] = float(tr["snr_db"])
    if "kappa" in tr:
        kw["kappa"] = int(tr["kappa"])
    if "nu" in tr:
        kw["nu"] = int(tr["nu"])
    if tr.get("L") is not None:
        kw["grid_size"] = int(tr["L"])

    tuples = {"methods": str, "snr_grid_db": float, "spread_grid_deg": float, "nu_grid": int}
    scalars = {"sweep": None, "trials": int, "seed": int, "mu": float, "quadrature_n": int,
               "psi_grid": int, "rays": int, "guard": float, "snr_reference": str}
    for k, cast in tuples.items():
        if k in d:
            kw[k] = tuple(cast(x) for x in d.pop(k))
    for k, cast in scalars.items():
        if k in d:
            v = d.pop(k)
            kw[k] = v if cast is None or v is None else cast(v)
    if d:
        raise ConfigError(f"unknown config keys {sorted(d)}")
    return ScenarioConfig(array=array, users=users, **kw)


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return from_dict(data)
