"""Core model: parameter/state types and vector fields for linearly
coupled elliptic bursters with amplitude-dependent spiking frequency.

Each unit carries a fast complex variable z = x + iy and a slow real
variable u.  The fast dynamics is a quintic normal form

    dz/dt = (u + i*omega) z + B z|z|^2 + C z|z|^4 + (k1 + i*k2) sum_k c_jk z_k
    du/dt = eta (a - |z|^2)

with B = 2 + i*zeta, C = -1 + i*gamma, zeta = sigma*r_m^2/2 and
gamma = -sigma/4, so that the angular frequency on a cycle of radius r is
Omega(r) = omega + zeta r^2 + gamma r^4 with a turning point at r = r_m.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]
ComplexArray = NDArray[np.complex128]

__all__ = [
    "ModelParams",
    "CouplingSpec",
    "NetworkState",
    "PolarPairState",
    "derive_coefficients",
    "eval_field_cartesian",
    "eval_field_polar_pair",
    "omega_of_r",
    "domega_dr",
    "to_polar",
    "to_cartesian",
    "wrap_phase",
]


def wrap_phase(angle):
    """Wrap angle(s) to the interval (-pi, pi]; odd multiples of pi map to +pi.

    Inputs within 1e-12 of the open endpoint -pi (roundoff from angles that
    are mathematically pi) are snapped to +pi so the boundary convention is
    stable under floating-point noise."""
    w = np.pi - np.mod(np.pi - np.asarray(angle, dtype=float), 2.0 * np.pi)
    return np.where(w <= -np.pi + 1e-12, np.pi, w)


@dataclass(frozen=True)
class ModelParams:
    """Single-unit constants.

    omega : base angular frequency of the fast oscillation
    a     : slow-nullcline amplitude; bursting for 0 < a < 1, tonic for a > 1
    eta   : fast/slow timescale ratio, >= 0
    sigma : magnitude of non-isochronicity (frequency-amplitude coupling)
    r_m   : radius of the frequency turning point, > 0

    The cubic/quintic coefficients are derived, never stored:
    zeta = sigma*r_m^2/2, gamma = -sigma/4, B = 2 + i*zeta, C = -1 + i*gamma.
    """

    omega: float
    a: float
    eta: float
    sigma: float
    r_m: float

    def __post_init__(self) -> None:
        vals = (self.omega, self.a, self.eta, self.sigma, self.r_m)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("model parameters must be finite")
        if self.eta < 0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")
        if self.r_m <= 0:
            raise ValueError(f"r_m must be > 0, got {self.r_m}")

    @property
    def zeta(self) -> float:
        return self.sigma * self.r_m**2 / 2.0

    @property
    def gamma(self) -> float:
        return -self.sigma / 4.0

    @property
    def B(self) -> complex:
        return 2.0 + 1j * self.zeta

    @property
    def C(self) -> complex:
        return -1.0 + 1j * self.gamma


def derive_coefficients(p: ModelParams) -> tuple[float, float, complex, complex]:
    """Return (zeta, gamma, B, C) derived from sigma and r_m."""
    return p.zeta, p.gamma, p.B, p.C


@dataclass(frozen=True)
class CouplingSpec:
    """Linear direct coupling: unit j receives (k1 + i*k2) * sum_k c[j, k] z_k.

    The connectivity matrix c is real with zero diagonal.  Entries other
    than 0/1 are allowed (weighted coupling).
    """

    kappa1: float
    kappa2: float
    c: FloatArray

    def __post_init__(self) -> None:
        c = np.asarray(self.c, dtype=np.float64)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError(f"connectivity must be square, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("connectivity must be finite")
        if np.any(np.diagonal(c) != 0.0):
            raise ValueError("connectivity diagonal must be zero")
        if not (np.isfinite(self.kappa1) and np.isfinite(self.kappa2)):
            raise ValueError("coupling gains must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @classmethod
    def all_to_all(cls, n: int, kappa1: float, kappa2: float) -> "CouplingSpec":
        """c_jk = 1 for j != k, 0 on the diagonal."""
        if n < 1:
            raise ValueError(f"need at least one unit, got n={n}")
        c = np.ones((n, n)) - np.eye(n)
        return cls(kappa1=kappa1, kappa2=kappa2, c=c)

    @property
    def n(self) -> int:
        return self.c.shape[0]


@dataclass
class NetworkState:
    """Cartesian state of n units: arrays x, y (fast) and u (slow), each length n."""

    x: FloatArray
    y: FloatArray
    u: FloatArray

    def __post_init__(self) -> None:
        self.x = np.atleast_1d(np.asarray(self.x, dtype=np.float64))
        self.y = np.atleast_1d(np.asarray(self.y, dtype=np.float64))
        self.u = np.atleast_1d(np.asarray(self.u, dtype=np.float64))
        if not (self.x.shape == self.y.shape == self.u.shape) or self.x.ndim != 1:
            raise ValueError("x, y, u must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))
                and np.all(np.isfinite(self.u))):
            raise ValueError("state entries must be finite")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def z(self) -> ComplexArray:
        return self.x + 1j * self.y

    def packed(self) -> FloatArray:
        """Flat layout [x_1..x_n, y_1..y_n, u_1..u_n] used by the integrators."""
        return np.concatenate([self.x, self.y, self.u])

    @classmethod
    def from_packed(cls, s: FloatArray) -> "NetworkState":
        s = np.asarray(s, dtype=np.float64)
        if s.ndim != 1 or s.size % 3 != 0:
            raise ValueError(f"packed state length must be 3n, got {s.size}")
        n = s.size // 3
        return cls(x=s[:n].copy(), y=s[n:2 * n].copy(), u=s[2 * n:].copy())

    @classmethod
    def from_z(cls, z: ComplexArray, u: FloatArray) -> "NetworkState":
        z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        return cls(x=z.real.copy(), y=z.imag.copy(), u=np.asarray(u, dtype=np.float64).copy())


@dataclass
class PolarPairState:
    """Polar state of a pair: radii r1, r2 > 0, phases theta1, theta2, slow u1, u2."""

    r1: float
    r2: float
    theta1: float
    theta2: float
    u1: float
    u2: float

    def __post_init__(self) -> None:
        if self.r1 <= 0 or self.r2 <= 0:
            raise ValueError(f"radii must be positive, got ({self.r1}, {self.r2})")

    def to_network(self) -> NetworkState:
        z = np.array([self.r1 * np.exp(1j * self.theta1),
                      self.r2 * np.exp(1j * self.theta2)])
        return NetworkState.from_z(z, np.array([self.u1, self.u2]))


def omega_of_r(r, p: ModelParams):
    """Instantaneous angular frequency Omega(r) = omega + zeta r^2 + gamma r^4."""
    r = np.asarray(r, dtype=float)
    r2 = r * r
    return p.omega + p.zeta * r2 + p.gamma * r2 * r2


def domega_dr(r, p: ModelParams):
    """Slope dOmega/dr = sigma r (r_m^2 - r^2); vanishes at the turning point r_m."""
    r = np.asarray(r, dtype=float)
    return p.sigma * r * (p.r_m**2 - r * r)


def to_polar(s: NetworkState) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Per-unit (r, theta, u) with theta = arg z in (-pi, pi].

    Raises ValueError when any radius is zero (phase undefined there).
    """
    z = s.z
    r = np.abs(z)
    if np.any(r == 0.0):
        raise ValueError("phase undefined at zero radius")
    return r, np.angle(z), s.u.copy()


def to_cartesian(r, theta, u) -> NetworkState:
    """Inverse of to_polar."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    return NetworkState.from_z(r * np.exp(1j * theta), np.atleast_1d(u))


def _coupling_sum(z: ComplexArray, k: CouplingSpec) -> ComplexArray:
    return (k.kappa1 + 1j * k.kappa2) * (k.c @ z)


def eval_field_cartesian(s: NetworkState, p: ModelParams, k: CouplingSpec) -> NetworkState:
    """Time derivative of the full coupled system, returned as a NetworkState.

    dz_j = (u_j + i*omega) z_j + B z_j |z_j|^2 + C z_j |z_j|^4 + (k1+i*k2) sum_k c_jk z_k
    du_j = eta (a - |z_j|^2)
    """
    if s.n != k.n:
        raise ValueError(f"state has {s.n} units but coupling is {k.n}x{k.n}")
    z = s.z
    r2 = z.real * z.real + z.imag * z.imag
    dz = (s.u + 1j * p.omega) * z + p.B * z * r2 + p.C * z * r2 * r2 + _coupling_sum(z, k)
    du = p.eta * (p.a - r2)
    out = NetworkState.__new__(NetworkState)
    out.x, out.y, out.u = dz.real, dz.imag, du
    return out


def field_packed(s: FloatArray, p: ModelParams, k: CouplingSpec) -> FloatArray:
    """Vector field on the packed layout [x, y, u]; no validation (hot path)."""
    n = k.n
    z = s[:n] + 1j * s[n:2 * n]
    u = s[2 * n:]
    r2 = z.real * z.real + z.imag * z.imag
    dz = (u + 1j * p.omega) * z + p.B * z * r2 + p.C * z * r2 * r2 + _coupling_sum(z, k)
    return np.concatenate([dz.real, dz.imag, p.eta * (p.a - r2)])


class NetworkField:
    """Packed-layout vector field of the coupled-burster network.

    Callable as f(t, s) for the integrators; carries the parameters so the
    stochastic integrator can dispatch to its compiled kernel.
    """

    def __init__(self, params: ModelParams, coupling: CouplingSpec):
        self.params = params
        self.coupling = coupling
        self.n = coupling.n

    def __call__(self, t: float, s: FloatArray) -> FloatArray:
        return field_packed(s, self.params, self.coupling)


def eval_field_polar_pair(s: PolarPairState, p: ModelParams, k: CouplingSpec) -> PolarPairState:
    """Time derivative of the two-unit system in polar coordinates.

    For all-to-all connectivity this is, with psi = theta2 - theta1,

      dr1     = u1 r1 + 2 r1^3 - r1^5 + r2 (k1 cos psi - k2 sin psi)
      dtheta1 = Omega(r1) + (r2/r1)(k1 sin psi + k2 cos psi)
      du1     = eta (a - r1^2)

    and symmetrically for unit 2.  Weighted 2x2 connectivity scales the
    coupling terms by c12 / c21.
    """
    if k.n != 2:
        raise ValueError("polar pair field requires a 2-unit coupling")
    k1, k2 = k.kappa1, k.kappa2
    c12, c21 = k.c[0, 1], k.c[1, 0]
    r1, r2 = s.r1, s.r2
    psi = s.theta2 - s.theta1  # phase of unit 2 seen from unit 1
    dr1 = s.u1 * r1 + 2 * r1**3 - r1**5 + c12 * r2 * (k1 * np.cos(psi) - k2 * np.sin(psi))
    dth1 = omega_of_r(r1, p) + c12 * (r2 / r1) * (k1 * np.sin(psi) + k2 * np.cos(psi))
    dr2 = s.u2 * r2 + 2 * r2**3 - r2**5 + c21 * r1 * (k1 * np.cos(-psi) - k2 * np.sin(-psi))
    dth2 = omega_of_r(r2, p) + c21 * (r1 / r2) * (k1 * np.sin(-psi) + k2 * np.cos(-psi))
    du1 = p.eta * (p.a - r1 * r1)
    du2 = p.eta * (p.a - r2 * r2)
    out = PolarPairState.__new__(PolarPairState)
    out.r1, out.r2 = float(dr1), float(dr2)
    out.theta1, out.theta2 = float(dth1), float(dth2)
    out.u1, out.u2 = float(du1), float(du2)
    return out
