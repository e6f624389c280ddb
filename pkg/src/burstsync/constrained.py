"""Burst-synchrony-constrained reductions of the two-unit system.

Setting u1 = u2 = u with du = eta*(a - (r1^2 + r2^2)/2) and phi = theta1 -
theta2 gives a four-dimensional system in (r1, r2, phi, u).  The linear
change of variables r_l = (r1 + r2)/2, r_t = (r1 - r2)/2 separates motion
along and across the equal-amplitude manifold; the subspaces {r_t = 0,
phi = 0} (inphase) and {r_t = 0, phi = pi} (antiphase) are invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import CouplingSpec, ModelParams, wrap_phase

__all__ = [
    "ReducedState",
    "LTState",
    "eval_reduced_field",
    "eval_lt_field",
    "lt_fast_rhs",
    "r1r2_to_lt",
    "lt_to_r1r2",
    "eval_subspace_field",
]


@dataclass
class ReducedState:
    """Constrained pair state: radii r1, r2 > 0, wrapped phase difference phi,
    shared slow variable u."""

    r1: float
    r2: float
    phi: float
    u: float

    def __post_init__(self) -> None:
        if self.r1 <= 0 or self.r2 <= 0:
            raise ValueError(f"radii must be positive, got ({self.r1}, {self.r2})")
        self.phi = float(wrap_phase(self.phi))


@dataclass
class LTState:
    """Longitudinal/transverse coordinates: r_l = (r1+r2)/2, r_t = (r1-r2)/2."""

    r_l: float
    r_t: float
    phi: float
    u: float

    def __post_init__(self) -> None:
        if self.r_l <= abs(self.r_t):
            raise ValueError(f"need r_l > |r_t|, got r_l={self.r_l}, r_t={self.r_t}")
        self.phi = float(wrap_phase(self.phi))


def eval_reduced_field(s: ReducedState, p: ModelParams, k: CouplingSpec):
    """Derivatives (dr1, dr2, dphi, du) of the constrained (r1, r2, phi, u) system.

    Assumes the all-to-all pair; derivatives are returned unwrapped.
    """
    if s.r1 <= 0 or s.r2 <= 0:
        raise ValueError("radii must be positive")
    k1, k2 = k.kappa1, k.kappa2
    r1, r2, phi, u = s.r1, s.r2, s.phi, s.u
    cos, sin = np.cos(phi), np.sin(phi)
    dr1 = u * r1 + 2 * r1**3 - r1**5 + k1 * r2 * cos + k2 * r2 * sin
    dr2 = u * r2 + 2 * r2**3 - r2**5 + k1 * r1 * cos - k2 * r1 * sin
    dphi = (0.5 * p.sigma * p.r_m**2 * (r1**2 - r2**2)
            - 0.25 * p.sigma * (r1**4 - r2**4)
            - k1 * (r1**2 + r2**2) / (r1 * r2) * sin
            - k2 * (r1**2 - r2**2) / (r1 * r2) * cos)
    du = p.eta * (p.a - 0.5 * (r1**2 + r2**2))
    return dr1, dr2, dphi, du


def lt_fast_rhs(r_l: float, r_t: float, phi: float, u: float,
                p: ModelParams, k: CouplingSpec):
    """Fast part (dr_l, dr_t, dphi) of the longitudinal/transverse system with
    u treated as a parameter.  Singular on r_l^2 = r_t^2."""
    k1, k2 = k.kappa1, k.kappa2
    cos, sin = np.cos(phi), np.sin(phi)
    rl2, rt2 = r_l * r_l, r_t * r_t
    denom = rl2 - rt2
    if denom == 0.0:
        raise ZeroDivisionError("singular state: r_l^2 == r_t^2")
    drl = (u * r_l + 2 * r_l**3 + 6 * r_l * rt2 - r_l**5 - 10 * r_l**3 * rt2
           - 5 * r_l * rt2 * rt2 + k1 * r_l * cos - k2 * r_t * sin)
    drt = (u * r_t + 6 * rl2 * r_t + 2 * r_t**3 - 5 * rl2 * rl2 * r_t
           - 10 * rl2 * r_t**3 - r_t**5 - k1 * r_t * cos + k2 * r_l * sin)
    dphi = (2 * p.sigma * p.r_m**2 * r_l * r_t
            - 2 * p.sigma * r_l * r_t * (rl2 + rt2)
            - 2 * k1 * (rl2 + rt2) / denom * sin
            - 4 * k2 * r_l * r_t / denom * cos)
    return drl, drt, dphi


def eval_lt_field(s: LTState, p: ModelParams, k: CouplingSpec):
    """Derivatives (dr_l, dr_t, dphi, du) of the four-dimensional reduction."""
    if s.r_l**2 == s.r_t**2:
        raise ZeroDivisionError("singular state: r_l^2 == r_t^2")
    drl, drt, dphi = lt_fast_rhs(s.r_l, s.r_t, s.phi, s.u, p, k)
    du = p.eta * (p.a - (s.r_l**2 + s.r_t**2))
    return drl, drt, dphi, du


def r1r2_to_lt(s: ReducedState) -> LTState:
    return LTState(r_l=0.5 * (s.r1 + s.r2), r_t=0.5 * (s.r1 - s.r2), phi=s.phi, u=s.u)


def lt_to_r1r2(s: LTState) -> ReducedState:
    return ReducedState(r1=s.r_l + s.r_t, r2=s.r_l - s.r_t, phi=s.phi, u=s.u)


def eval_subspace_field(r_l: float, u: float, phi: float,
                        p: ModelParams, k: CouplingSpec) -> float:
    """Scalar radial derivative on the r_t = 0 subspace:
    dr_l = (u + 2 k1 cos(phi)) r_l + 2 r_l^3 - r_l^5, with phi in {0, pi}."""
    if r_l < 0:
        raise ValueError(f"r_l must be >= 0, got {r_l}")
    if phi not in (0.0, np.pi):
        raise ValueError(f"phi must be 0 or pi, got {phi}")
    return (u + 2 * k.kappa1 * np.cos(phi)) * r_l + 2 * r_l**3 - r_l**5
