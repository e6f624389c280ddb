"""Time integration producing uniformly sampled trajectories.

Two modes, mutually exclusive:

* deterministic -- adaptive embedded Runge-Kutta 5(4) (Dormand-Prince pair,
  scipy's RK45) with 4th-order dense output, resampled onto a uniform grid;
* stochastic -- fixed-step Euler-Maruyama with additive noise of amplitude
  eps on the fast variables only: each of x_j, y_j receives an independent
  increment eps*sqrt(dt)*N(0,1) per step while the slow variables are
  unperturbed.

Stochastic runs are reproducible across platforms: the noise stream comes
from numpy's Philox 4x64 counter-based generator keyed by ``rng_seed``, and
increments are consumed in step order, x-block before y-block.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import solve_ivp

from . import _fastpath
from .model import CouplingSpec, ModelParams, NetworkField, NetworkState

FloatArray = NDArray[np.float64]

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "RawSolution",
    "NumericalError",
    "integrate_deterministic",
    "integrate_deterministic_dense",
    "integrate_noisy",
    "resample",
]

_CHUNK_STEPS = 65536


class NumericalError(RuntimeError):
    """Integration failed (step-size underflow or non-finite state)."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Settings shared by both integration modes.

    rel_tol/abs_tol apply to the adaptive mode, dt to the fixed-step mode;
    sample_dt is the uniform output spacing (>= dt in fixed-step mode; it is
    snapped to the nearest integer multiple of dt).  noise_amplitude > 0
    selects the stochastic mode.
    """

    t_end: float
    sample_dt: float = 0.05
    rel_tol: float = 1e-8
    abs_tol: float = 1e-11
    dt: float = 1e-3
    noise_amplitude: float = 0.0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if not (self.t_end > 0):
            raise ValueError(f"t_end must be > 0, got {self.t_end}")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not (self.dt > 0):
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not (self.sample_dt > 0):
            raise ValueError(f"sample_dt must be > 0, got {self.sample_dt}")
        if self.noise_amplitude < 0:
            raise ValueError("noise_amplitude must be >= 0")
        if not isinstance(self.rng_seed, (int, np.integer)):
            raise ValueError("rng_seed must be an integer")

    def fixed_step_counts(self) -> tuple[int, int]:
        """(n_steps, k_sample) for the fixed-step mode; enforces sample_dt >= dt."""
        k_sample = max(1, round(self.sample_dt / self.dt))
        if self.sample_dt < self.dt * (1 - 1e-12):
            raise ValueError("fixed-step mode requires sample_dt >= dt")
        n_steps = round(self.t_end / self.dt)
        n_steps -= n_steps % k_sample
        if n_steps < k_sample:
            raise ValueError("t_end too short for one output sample")
        return n_steps, k_sample


@dataclass
class Trajectory:
    """Uniformly sampled time series of a network run.

    states has shape (n_samples, 3n) in the packed layout [x, y, u];
    meta records params/coupling/config/seed for provenance.
    """

    times: FloatArray
    states: FloatArray
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=np.float64)
        self.states = np.asarray(self.states, dtype=np.float64)
        if self.times.ndim != 1 or self.states.ndim != 2 \
                or self.states.shape[0] != self.times.shape[0]:
            raise ValueError("times and states must be (m,) and (m, 3n)")
        if self.states.shape[1] % 3 != 0:
            raise ValueError("state rows must have length 3n")
        d = np.diff(self.times)
        if len(d) and (np.any(d <= 0) or np.ptp(d) > 1e-9 * np.max(d)):
            raise ValueError("times must be strictly increasing and uniform")
        if not np.all(np.isfinite(self.states)):
            raise NumericalError("non-finite state in trajectory")

    @property
    def n(self) -> int:
        return self.states.shape[1] // 3

    @property
    def x(self) -> FloatArray:
        return self.states[:, :self.n]

    @property
    def y(self) -> FloatArray:
        return self.states[:, self.n:2 * self.n]

    @property
    def u(self) -> FloatArray:
        return self.states[:, 2 * self.n:]

    @property
    def z(self) -> NDArray[np.complex128]:
        return self.x + 1j * self.y

    def radii(self) -> FloatArray:
        return np.abs(self.z)

    def mean_radius(self) -> FloatArray:
        return self.radii().mean(axis=1)

    def u_mean(self) -> FloatArray:
        return self.u.mean(axis=1)

    def state_at(self, i: int) -> NetworkState:
        return NetworkState.from_packed(self.states[i])


@dataclass
class RawSolution:
    """Dense or fixed-step solver output prior to uniform resampling."""

    times: FloatArray
    states: FloatArray
    interpolant: Optional[Callable[[FloatArray], FloatArray]] = None
    meta: dict = field(default_factory=dict)


def _as_packed(s0) -> FloatArray:
    if isinstance(s0, NetworkState):
        return s0.packed()
    s = np.asarray(s0, dtype=np.float64)
    if s.ndim != 1 or s.size % 3 != 0:
        raise ValueError("initial state must be a NetworkState or a 3n vector")
    return s.copy()


def _meta_for(field_fn, config: IntegratorConfig) -> dict:
    meta = {"config": config, "seed": config.rng_seed}
    if isinstance(field_fn, NetworkField):
        meta["params"] = field_fn.params
        meta["coupling"] = field_fn.coupling
    return meta


def resample(raw: RawSolution, sample_dt: float,
             t0: float | None = None, t1: float | None = None) -> Trajectory:
    """Uniform grid [t0, t1] with spacing sample_dt from a raw solution.

    Dense solutions are evaluated through their interpolant (error consistent
    with the integrator order); fixed-step solutions admit only grids aligned
    with the stored times.  Requests outside the covered range raise.
    """
    if sample_dt <= 0:
        raise ValueError("sample_dt must be positive")
    lo, hi = raw.times[0], raw.times[-1]
    t0 = lo if t0 is None else t0
    t1 = hi if t1 is None else t1
    if t0 < lo - 1e-12 or t1 > hi + 1e-12:
        raise ValueError(f"requested range [{t0}, {t1}] exceeds solution range [{lo}, {hi}]")
    m = int(np.floor((t1 - t0) / sample_dt + 1e-9)) + 1
    grid = t0 + sample_dt * np.arange(m)
    if raw.interpolant is not None:
        states = np.asarray(raw.interpolant(grid)).T
    else:
        pos = (grid - lo) / (raw.times[1] - raw.times[0])
        idx = np.rint(pos).astype(int)
        if np.max(np.abs(pos - idx)) > 1e-6:
            raise ValueError("fixed-step solution can only be resampled on its own grid")
        states = raw.states[idx]
    return Trajectory(times=grid, states=states, meta=dict(raw.meta))


def integrate_deterministic_dense(field_fn, s0, config: IntegratorConfig) -> RawSolution:
    """Adaptive RK 5(4) solve with dense output, no resampling."""
    if config.noise_amplitude != 0.0:
        raise ValueError("deterministic mode requires noise_amplitude == 0")
    s = _as_packed(s0)
    sol = solve_ivp(field_fn, (0.0, config.t_end), s, method="RK45",
                    rtol=config.rel_tol, atol=config.abs_tol, dense_output=True)
    if not sol.success:
        raise NumericalError(f"adaptive integration failed: {sol.message}")
    if not np.all(np.isfinite(sol.y)):
        raise NumericalError("non-finite state during adaptive integration")
    return RawSolution(times=sol.t, states=sol.y.T, interpolant=sol.sol,
                       meta=_meta_for(field_fn, config))


def integrate_deterministic(field_fn, s0, config: IntegratorConfig) -> Trajectory:
    """Adaptive RK 5(4) run resampled at config.sample_dt.

    Bitwise deterministic for fixed inputs; local error per step bounded by
    the configured tolerances.
    """
    raw = integrate_deterministic_dense(field_fn, s0, config)
    return resample(raw, config.sample_dt)


def _euler_maruyama_python(field_fn, s: FloatArray, config: IntegratorConfig,
                           n_steps: int, k_sample: int, rng) -> FloatArray:
    n3 = s.size
    n = n3 // 3
    sq = config.noise_amplitude * np.sqrt(config.dt)
    out = np.empty((n_steps // k_sample + 1, n3))
    out[0] = s
    step = 0
    t = 0.0
    while step < n_steps:
        m = min(_CHUNK_STEPS, n_steps - step)
        xi = rng.standard_normal((m, 2 * n))
        for i in range(m):
            ds = field_fn(t, s)
            s = s + config.dt * ds
            if sq != 0.0:
                s[:2 * n] += sq * xi[i]
            step += 1
            t = step * config.dt
            if step % k_sample == 0:
                if not np.all(np.isfinite(s)):
                    raise NumericalError(f"non-finite state at t={t}")
                out[step // k_sample] = s
    return out


def _euler_maruyama_network(field_fn: NetworkField, s: FloatArray,
                            config: IntegratorConfig, n_steps: int,
                            k_sample: int, rng) -> FloatArray:
    p, k = field_fn.params, field_fn.coupling
    n = field_fn.n
    z = (s[:n] + 1j * s[n:2 * n]).astype(np.complex128)
    u = s[2 * n:].astype(np.float64).copy()
    sq = config.noise_amplitude * np.sqrt(config.dt)
    out = np.empty((n_steps // k_sample + 1, 3 * n))
    out[0] = s
    step = 0
    while step < n_steps:
        m = min(_CHUNK_STEPS, n_steps - step)
        xi = rng.standard_normal((m, 2 * n))
        _fastpath.em_network_chunk(z, u, p.omega, p.a, p.eta, p.B, p.C,
                                   k.kappa1 + 1j * k.kappa2,
                                   np.ascontiguousarray(k.c), config.dt, sq,
                                   xi, step, k_sample, out)
        step += m
    return out


def integrate_noisy(field_fn, s0, config: IntegratorConfig) -> Trajectory:
    """Fixed-step Euler-Maruyama run sampled every round(sample_dt/dt) steps.

    The trajectory is a pure function of (s0, field parameters, config,
    rng_seed).  With noise_amplitude == 0 this degenerates to the plain
    fixed-step Euler method.  The built-in network field dispatches to a
    compiled kernel when numba is available.
    """
    s = _as_packed(s0)
    n_steps, k_sample = config.fixed_step_counts()
    rng = np.random.Generator(np.random.Philox(config.rng_seed))
    if isinstance(field_fn, NetworkField) and _fastpath.HAVE_NUMBA:
        out = _euler_maruyama_network(field_fn, s, config, n_steps, k_sample, rng)
    else:
        out = _euler_maruyama_python(field_fn, s, config, n_steps, k_sample, rng)
    if not np.all(np.isfinite(out)):
        raise NumericalError("non-finite state in stochastic integration")
    times = config.dt * k_sample * np.arange(out.shape[0])
    return Trajectory(times=times, states=out, meta=_meta_for(field_fn, config))


def simulate_network(params: ModelParams, coupling: CouplingSpec, s0,
                     config: IntegratorConfig) -> Trajectory:
    """Integrate the built-in coupled-burster network; picks the mode from
    config.noise_amplitude."""
    f = NetworkField(params, coupling)
    if config.noise_amplitude > 0.0:
        return integrate_noisy(f, s0, config)
    return integrate_deterministic(f, s0, config)
