"""Scenario configuration: plain-text key = value files, namespaced keys,
override flags, and assembly into the typed objects the library consumes.

Key namespaces: model.*, coupling.*, integrator.*, initial.*, analysis.*,
scan.*.  Unknown keys are rejected so typos fail fast.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .integrate import IntegratorConfig
from .model import CouplingSpec, ModelParams, NetworkState

__all__ = [
    "ConfigError",
    "AnalysisOptions",
    "ScanOptions",
    "ScenarioConfig",
    "parse_config_file",
    "parse_override",
    "build_scenario",
    "scenario_to_flat",
]


class ConfigError(ValueError):
    """Invalid or unknown configuration input."""


@dataclass(frozen=True)
class AnalysisOptions:
    r_hi: float = 0.8
    r_lo: float = 0.3
    window_periods: float = 5.0
    stride_periods: float = 1.0
    persist_windows: float = 2.0
    phase_floor: float = 0.1
    transient_frac: float = 0.2
    angle_tol: float = float(np.pi / 4)


@dataclass(frozen=True)
class ScanOptions:
    kind: str = "branch"            # branch | boundary
    plane: str = "sigma"            # second parameter for boundary scans
    u_min: float = -0.7
    u_max: float = 0.05
    n_u: int = 200
    lambda_min: float = 1.0
    lambda_max: float = 6.0
    n_lambda: int = 100

    def __post_init__(self) -> None:
        if self.kind not in ("branch", "boundary"):
            raise ConfigError(f"scan.kind must be branch or boundary, got {self.kind!r}")


_DEFAULTS = {
    "model.omega": 3.0,
    "model.a": 0.8,
    "model.eta": 0.1,
    "model.sigma": 3.0,
    "model.r_m": 1.35,
    "coupling.n": 2,
    "coupling.kappa1": 0.0,
    "coupling.kappa2": 0.0,
    "integrator.t_end": 200.0,
    "integrator.sample_dt": 0.05,
    "integrator.rel_tol": 1e-8,
    "integrator.abs_tol": 1e-11,
    "integrator.dt": 1e-3,
    "integrator.noise_amplitude": 0.0,
    "integrator.rng_seed": 0,
    "initial.mode": "quiescent",
    "initial.x": None,
    "initial.y": None,
    "initial.u": None,
    "analysis.r_hi": 0.8,
    "analysis.r_lo": 0.3,
    "analysis.window_periods": 5.0,
    "analysis.stride_periods": 1.0,
    "analysis.persist_windows": 2.0,
    "analysis.phase_floor": 0.1,
    "analysis.transient_frac": 0.2,
    "analysis.angle_tol": float(np.pi / 4),
    "scan.kind": "branch",
    "scan.plane": "sigma",
    "scan.u_min": -0.7,
    "scan.u_max": 0.05,
    "scan.n_u": 200,
    "scan.lambda_min": 1.0,
    "scan.lambda_max": 6.0,
    "scan.n_lambda": 100,
}


@dataclass
class ScenarioConfig:
    """Fully resolved scenario: typed parameter objects plus the flat
    key/value mapping they were built from (echoed into run manifests)."""

    params: ModelParams
    coupling: CouplingSpec
    integrator: IntegratorConfig
    initial: NetworkState
    analysis: AnalysisOptions
    scan: ScanOptions
    flat: dict = field(default_factory=dict)


def _parse_scalar(text: str):
    t = text.strip()
    low = t.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        pass
    return t


def _parse_value(key: str, text):
    if not isinstance(text, str):
        return text
    if key in ("initial.x", "initial.y", "initial.u"):
        return [float(v) for v in text.split(",") if v.strip() != ""]
    return _parse_scalar(text)


def parse_config_file(path) -> dict:
    """Read a line-oriented ``key = value`` file; '#' starts a comment."""
    flat: dict = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = body.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        flat[key] = _parse_value(key, value)
    return flat


def parse_override(text: str) -> tuple[str, object]:
    """Parse one --set key=value override."""
    if "=" not in text:
        raise ConfigError(f"override must look like key=value, got {text!r}")
    key, _, value = text.partition("=")
    key = key.strip()
    return key, _parse_value(key, value)


def _quiescent_initial(n: int) -> NetworkState:
    # deterministic small offsets with distinct phases; noise (or the
    # deterministic flow) takes over well before the first burst
    j = np.arange(n)
    z = 0.01 * np.exp(1j * (0.8 * j + 0.3))
    return NetworkState.from_z(z, np.full(n, -0.5))


def build_scenario(*sources: dict) -> ScenarioConfig:
    """Merge defaults with the given flat mappings (later wins) and build the
    typed scenario.  Unknown keys raise ConfigError."""
    flat = dict(_DEFAULTS)
    for src in sources:
        for key, value in src.items():
            if key not in _DEFAULTS:
                raise ConfigError(f"unknown config key {key!r}")
            flat[key] = _parse_value(key, value)

    def g(key):
        return flat[key]

    try:
        params = ModelParams(omega=float(g("model.omega")), a=float(g("model.a")),
                             eta=float(g("model.eta")), sigma=float(g("model.sigma")),
                             r_m=float(g("model.r_m")))
        n = int(g("coupling.n"))
        coupling = CouplingSpec.all_to_all(n, float(g("coupling.kappa1")),
                                           float(g("coupling.kappa2")))
        integrator = IntegratorConfig(
            t_end=float(g("integrator.t_end")),
            sample_dt=float(g("integrator.sample_dt")),
            rel_tol=float(g("integrator.rel_tol")),
            abs_tol=float(g("integrator.abs_tol")),
            dt=float(g("integrator.dt")),
            noise_amplitude=float(g("integrator.noise_amplitude")),
            rng_seed=int(g("integrator.rng_seed")),
        )
        mode = str(g("initial.mode"))
        if mode == "quiescent":
            initial = _quiescent_initial(n)
        elif mode == "explicit":
            x, y, u = g("initial.x"), g("initial.y"), g("initial.u")
            if x is None or y is None or u is None:
                raise ConfigError("explicit initial condition needs initial.x/y/u")
            initial = NetworkState(np.asarray(x, dtype=float),
                                   np.asarray(y, dtype=float),
                                   np.asarray(u, dtype=float))
            if initial.n != n:
                raise ConfigError(f"initial condition has {initial.n} units, coupling has {n}")
        else:
            raise ConfigError(f"initial.mode must be quiescent or explicit, got {mode!r}")
        analysis = AnalysisOptions(
            r_hi=float(g("analysis.r_hi")), r_lo=float(g("analysis.r_lo")),
            window_periods=float(g("analysis.window_periods")),
            stride_periods=float(g("analysis.stride_periods")),
            persist_windows=float(g("analysis.persist_windows")),
            phase_floor=float(g("analysis.phase_floor")),
            transient_frac=float(g("analysis.transient_frac")),
            angle_tol=float(g("analysis.angle_tol")),
        )
        scan = ScanOptions(
            kind=str(g("scan.kind")), plane=str(g("scan.plane")),
            u_min=float(g("scan.u_min")), u_max=float(g("scan.u_max")),
            n_u=int(g("scan.n_u")),
            lambda_min=float(g("scan.lambda_min")), lambda_max=float(g("scan.lambda_max")),
            n_lambda=int(g("scan.n_lambda")),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e)) from e
    return ScenarioConfig(params=params, coupling=coupling, integrator=integrator,
                          initial=initial, analysis=analysis, scan=scan, flat=flat)


def scenario_to_flat(cfg: ScenarioConfig) -> dict:
    """Flat representation with the effective initial condition spelled out."""
    out = dict(cfg.flat)
    out["initial.x"] = list(map(float, cfg.initial.x))
    out["initial.y"] = list(map(float, cfg.initial.y))
    out["initial.u"] = list(map(float, cfg.initial.u))
    return out
