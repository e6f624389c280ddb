"""Bifurcation diagrams as data: one-parameter branch diagrams in the slow
variable u, and two-parameter stability-boundary curves in the (u, sigma),
(u, r_m), (u, kappa1) and (u, kappa2) planes with region labels

    a = antiphase only, b = bistable, c = inphase only.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from .model import CouplingSpec, ModelParams, wrap_phase
from .stability import (ANTIPHASE, INPHASE, BranchError, FastEquilibrium, classify,
                        find_fast_equilibria, jacobian_antiphase, jacobian_inphase,
                        solve_branch_r, trace_det)

FloatArray = NDArray[np.float64]

__all__ = [
    "BranchDiagram",
    "RegionBoundary",
    "NoSignChangeError",
    "branch_diagram",
    "det_zero_bisect",
    "boundary_scan",
    "link_columns",
    "PLANES",
]

PLANES = ("sigma", "r_m", "kappa1", "kappa2")

_DET_FLOOR = 1e-13  # |det| below this everywhere counts as degenerate


class NoSignChangeError(ValueError):
    """Determinant does not change sign over the requested window."""


@dataclass
class BranchDiagram:
    """Equilibria of the fast subsystem on a u grid, linked into branches.

    points[i] lists the equilibria at us[i]; branch_ids[i][k] is a stable
    identifier linking points[i][k] to the nearest-phi point of the previous
    column."""

    us: FloatArray
    points: list[list[FastEquilibrium]]
    branch_ids: list[list[int]]


@dataclass
class RegionBoundary:
    """Per-lambda stability boundaries u_in(lambda), u_anti(lambda) (NaN when
    the crossing is absent) plus probed interval labels.

    regions[i] is a list of (label, u_lo, u_hi) with label in
    {"a", "b", "c", "none"} covering the scan window at lambdas[i]."""

    plane: str
    lambdas: FloatArray
    u_in: FloatArray
    u_anti: FloatArray
    regions: list[list[tuple[str, float, float]]]
    u_window: tuple[float, float]


def _resolve(plane: str, lam: float, p: ModelParams,
             k: CouplingSpec) -> tuple[ModelParams, CouplingSpec]:
    """Parameter set with the scanned quantity replaced by lam."""
    lam = float(lam)
    if plane == "sigma":
        return replace(p, sigma=lam), k
    if plane == "r_m":
        return replace(p, r_m=lam), k
    if plane == "kappa1":
        return p, CouplingSpec(kappa1=lam, kappa2=k.kappa2, c=k.c)
    if plane == "kappa2":
        return p, CouplingSpec(kappa1=k.kappa1, kappa2=lam, c=k.c)
    raise ValueError(f"unknown plane {plane!r}; expected one of {PLANES}")


def _branch_det(u: float, branch: str, p: ModelParams, k: CouplingSpec) -> float:
    phi = 0.0 if branch == INPHASE else np.pi
    r = solve_branch_r(u, phi, p, k)
    jac = jacobian_inphase if branch == INPHASE else jacobian_antiphase
    return trace_det(jac(u, r, p, k))[1]


def det_zero_bisect(branch: str, u_window: tuple[float, float],
                    p: ModelParams, k: CouplingSpec,
                    tol: float = 1e-8, n_scan: int = 128) -> float:
    """Root of det along the phi = 0 (inphase) or phi = pi (antiphase) branch.

    Scans the window for a sign change, bisects to |du| < tol, and verifies
    |det(u*)| < tol.  Raises NoSignChangeError when det keeps one sign (or is
    identically zero, as it is for uncoupled units)."""
    if branch not in (INPHASE, ANTIPHASE):
        raise ValueError(f"branch must be inphase or antiphase, got {branch!r}")
    lo, hi = u_window
    if not lo < hi:
        raise ValueError(f"bad window {u_window}")
    us = np.linspace(lo, hi, n_scan)
    dets = np.array([_branch_det(u, branch, p, k) for u in us])
    if np.all(np.abs(dets) < _DET_FLOOR):
        raise NoSignChangeError("determinant is identically zero on the window")
    sign = np.sign(dets)
    idx = np.flatnonzero((sign[:-1] != 0) & (sign[1:] != 0) & (sign[:-1] != sign[1:]))
    if idx.size == 0:
        exact = np.flatnonzero(np.abs(dets) < _DET_FLOOR)
        if exact.size:
            return float(us[exact[0]])
        raise NoSignChangeError(f"no det sign change for {branch} branch in {u_window}")
    a, b = us[idx[0]], us[idx[0] + 1]
    fa = dets[idx[0]]
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = _branch_det(m, branch, p, k)
        if fm == 0.0:
            return float(m)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    u_star = 0.5 * (a + b)
    # a couple of secant polish steps so |det| itself drops below tol
    for _ in range(8):
        f = _branch_det(u_star, branch, p, k)
        if abs(f) < tol:
            break
        h = max(1e-9, 0.25 * tol)
        df = (_branch_det(u_star + h, branch, p, k) - _branch_det(u_star - h, branch, p, k)) / (2 * h)
        if df == 0.0:
            break
        u_star -= f / df
    return float(u_star)


def _probe_label(u: float, p: ModelParams, k: CouplingSpec) -> str:
    def stable(branch):
        try:
            phi = 0.0 if branch == INPHASE else np.pi
            r = solve_branch_r(u, phi, p, k)
            jac = jacobian_inphase if branch == INPHASE else jacobian_antiphase
            return classify(*trace_det(jac(u, r, p, k))).startswith("stable")
        except BranchError:
            return False

    s_in, s_anti = stable(INPHASE), stable(ANTIPHASE)
    if s_in and s_anti:
        return "b"
    if s_in:
        return "c"
    if s_anti:
        return "a"
    return "none"


def boundary_scan(plane: str, lambdas, p: ModelParams, k: CouplingSpec,
                  u_window: tuple[float, float] = (-0.95, 0.45),
                  tol: float = 1e-8) -> RegionBoundary:
    """Stability-boundary curves over a grid of the second parameter.

    For each lambda the inphase and antiphase det-zero points are located by
    bisection along the spiking branch; absent crossings are recorded as NaN
    gaps.  The window intervals cut by the crossings are labelled by probing
    the transverse stability of both states at interior points."""
    lambdas = np.asarray(lambdas, dtype=float)
    u_in = np.full(lambdas.shape, np.nan)
    u_anti = np.full(lambdas.shape, np.nan)
    regions: list[list[tuple[str, float, float]]] = []
    for i, lam in enumerate(lambdas):
        p2, k2 = _resolve(plane, lam, p, k)
        for branch, dest in ((INPHASE, u_in), (ANTIPHASE, u_anti)):
            try:
                dest[i] = det_zero_bisect(branch, u_window, p2, k2, tol=tol)
            except (NoSignChangeError, BranchError):
                pass
        cuts = sorted(v for v in (u_in[i], u_anti[i]) if np.isfinite(v))
        edges = [u_window[0], *cuts, u_window[1]]
        row = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            if hi - lo <= 0:
                continue
            row.append((_probe_label(0.5 * (lo + hi), p2, k2), float(lo), float(hi)))
        regions.append(row)
    return RegionBoundary(plane=plane, lambdas=lambdas, u_in=u_in, u_anti=u_anti,
                          regions=regions, u_window=u_window)


def link_columns(us: FloatArray, points: list[list[FastEquilibrium]]) -> list[list[int]]:
    """Assign branch ids by nearest-(phi, r_l, r_t) matching between adjacent
    u columns; unmatched points open new branches."""
    ids: list[list[int]] = []
    next_id = 0
    for col, eqs in enumerate(points):
        if col == 0 or not ids[-1]:
            col_ids = list(range(next_id, next_id + len(eqs)))
            next_id += len(eqs)
        else:
            prev_eqs, prev_ids = points[col - 1], ids[-1]
            col_ids = []
            taken: set[int] = set()
            for e in eqs:
                best, best_d = None, np.inf
                for pi_, pe in enumerate(prev_eqs):
                    if pi_ in taken:
                        continue
                    d = abs(float(wrap_phase(e.phi - pe.phi))) + abs(e.r_l - pe.r_l) \
                        + abs(e.r_t - pe.r_t)
                    if d < best_d:
                        best, best_d = pi_, d
                if best is not None and best_d < 0.5:
                    taken.add(best)
                    col_ids.append(prev_ids[best])
                else:
                    col_ids.append(next_id)
                    next_id += 1
        ids.append(col_ids)
    return ids


def branch_diagram(u_range: tuple[float, float], p: ModelParams, k: CouplingSpec,
                   n_u: int = 200, seeds=None,
                   progress: Callable[[int, int], None] | None = None) -> BranchDiagram:
    """Equilibria of the fast subsystem over a u grid, with nearest-phi
    branch linking between adjacent columns."""
    lo, hi = u_range
    if not lo < hi:
        raise ValueError(f"bad u range {u_range}")
    us = np.linspace(lo, hi, n_u)
    points: list[list[FastEquilibrium]] = []
    for col, u in enumerate(us):
        points.append(find_fast_equilibria(float(u), p, k, seeds=seeds))
        if progress is not None:
            progress(col + 1, n_u)
    return BranchDiagram(us=us, points=points, branch_ids=link_columns(us, points))
