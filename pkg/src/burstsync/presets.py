"""Bundled scenario presets, one per reproduction target.

Each preset is a flat key=value mapping consumed by config.build_scenario;
CLI --set overrides take precedence.  The fig3 / fig4 / slowpassage / fig12
scenarios use eta = 0.005, which puts roughly 150 spike periods in a burst;
their published parameter lists are otherwise used verbatim.
"""

from __future__ import annotations

__all__ = ["PRESETS", "preset", "preset_names"]

_FIG3_BASE = {
    "model.omega": 0.01,
    "model.a": 0.8,
    "model.eta": 0.005,
    "model.sigma": 3.0,
    "model.r_m": 1.35,
    "coupling.n": 2,
    "coupling.kappa1": 0.001,
    "coupling.kappa2": 0.2,
    "integrator.t_end": 3200.0,
    "integrator.sample_dt": 0.05,
    "integrator.dt": 1e-3,
    "integrator.noise_amplitude": 1e-5,
    "integrator.rng_seed": 1,
}

_SCAN_BASE = {
    "model.omega": 3.0,
    "model.a": 0.8,
    "model.eta": 0.0,
    "model.sigma": 3.0,
    "model.r_m": 1.35,
    "coupling.n": 2,
}

PRESETS: dict[str, dict] = {
    # single-unit bursting and tonic spiking
    "fig2": {
        "model.omega": 3.0, "model.a": 0.8, "model.eta": 0.1,
        "model.sigma": 4.0, "model.r_m": 1.35,
        "coupling.n": 1, "coupling.kappa1": 0.0, "coupling.kappa2": 0.0,
        "integrator.t_end": 200.0, "integrator.sample_dt": 0.02,
        "integrator.noise_amplitude": 0.0,
        "initial.mode": "explicit",
        "initial.x": [0.1], "initial.y": [0.0], "initial.u": [-0.5],
    },
    "fig2_tonic": {},  # filled below from fig2
    # two units, within-burst inphase -> antiphase change
    "fig3": dict(_FIG3_BASE),
    # two units, antiphase -> inphase (imaginary coupling gain reversed)
    "fig4": {**_FIG3_BASE, "coupling.kappa2": -0.2},
    # phase-difference branch diagrams of the fast subsystem
    "fig5a": {**_SCAN_BASE, "coupling.kappa1": 0.001, "coupling.kappa2": 0.2,
              "scan.kind": "branch", "scan.u_min": -0.7, "scan.u_max": 0.05,
              "scan.n_u": 120},
    "fig5b": {**_SCAN_BASE, "coupling.kappa1": -0.001, "coupling.kappa2": 0.2,
              "scan.kind": "branch", "scan.u_min": -0.7, "scan.u_max": 0.05,
              "scan.n_u": 120},
    "fig5c": {**_SCAN_BASE, "coupling.kappa1": 0.001, "coupling.kappa2": -0.2,
              "scan.kind": "branch", "scan.u_min": -0.7, "scan.u_max": 0.05,
              "scan.n_u": 120},
    "fig5d": {**_SCAN_BASE, "coupling.kappa1": -0.001, "coupling.kappa2": -0.2,
              "scan.kind": "branch", "scan.u_min": -0.7, "scan.u_max": 0.05,
              "scan.n_u": 120},
    # two-parameter stability-boundary planes
    "fig6": {**_SCAN_BASE, "coupling.kappa1": 0.001, "coupling.kappa2": 0.2,
             "scan.kind": "boundary", "scan.plane": "sigma",
             "scan.lambda_min": 1.5, "scan.lambda_max": 6.0, "scan.n_lambda": 100},
    "fig7": {**_SCAN_BASE, "coupling.kappa1": 0.001, "coupling.kappa2": 0.2,
             "scan.kind": "boundary", "scan.plane": "r_m",
             "scan.lambda_min": 1.15, "scan.lambda_max": 1.55, "scan.n_lambda": 100},
    "fig8": {**_SCAN_BASE, "coupling.kappa1": 0.001, "coupling.kappa2": 0.2,
             "scan.kind": "boundary", "scan.plane": "kappa1",
             "scan.lambda_min": -0.06, "scan.lambda_max": 0.02, "scan.n_lambda": 100},
    "fig9": {**_SCAN_BASE, "coupling.kappa1": -0.001, "coupling.kappa2": -0.2,
             "scan.kind": "boundary", "scan.plane": "kappa1",
             "scan.lambda_min": -0.02, "scan.lambda_max": 0.06, "scan.n_lambda": 100},
    "fig10": {**_SCAN_BASE, "coupling.kappa1": 0.001, "coupling.kappa2": 0.2,
              "scan.kind": "boundary", "scan.plane": "kappa2",
              "scan.lambda_min": -0.3, "scan.lambda_max": 0.3, "scan.n_lambda": 100},
    "fig11": {**_SCAN_BASE, "coupling.kappa1": -0.001, "coupling.kappa2": 0.2,
              "scan.kind": "boundary", "scan.plane": "kappa2",
              "scan.lambda_min": -0.3, "scan.lambda_max": 0.3, "scan.n_lambda": 100},
    # three units, splay -> inphase change
    "fig12": {
        "model.omega": 0.1, "model.a": 0.8, "model.eta": 0.005,
        "model.sigma": 5.0, "model.r_m": 1.35,
        "coupling.n": 3, "coupling.kappa1": -0.001, "coupling.kappa2": -0.2,
        "integrator.t_end": 3200.0, "integrator.sample_dt": 0.05,
        "integrator.dt": 1e-3, "integrator.noise_amplitude": 1e-5,
        "integrator.rng_seed": 1,
    },
    # transverse bifurcation points, closed forms vs numeric root finding
    "table1": {**_SCAN_BASE, "coupling.kappa1": 0.0, "coupling.kappa2": 0.2},
    "table2": {**_SCAN_BASE, "coupling.kappa1": 0.0, "coupling.kappa2": -0.2},
    # full system vs frozen-u prediction of the transition point
    "slowpassage": {**_FIG3_BASE, "model.omega": 0.0003},
}

PRESETS["fig2_tonic"] = {**PRESETS["fig2"], "model.a": 1.2}


def preset_names() -> list[str]:
    return sorted(PRESETS)


def preset(name: str) -> dict:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return dict(PRESETS[name])
