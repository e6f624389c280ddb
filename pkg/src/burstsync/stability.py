"""Stability of the fast subsystem (u frozen, eta = 0).

On the equal-amplitude subspace the spiking branch satisfies
u = r^4 - 2r^2 - 2 k1 cos(phi).  Transverse stability of the inphase
(phi = 0) and antiphase (phi = pi) states is governed by the 2x2 blocks

    J_in   = [[u + 6r^2 - 5r^4 - k1,            k2 r],
              [2 sigma r_m^2 r - 2 sigma r^3 - 4 k2 / r,  -2 k1]]

    J_anti = same with (k1, k2) -> (-k1, -k2).

For k1 = 0 the transverse bifurcation condition det = 0 reduces to
sigma r^2 (r_m^2 - r^2) = +-2 k2, solvable in closed form; its first-order
expansion gives r_in/anti = r_m (1 -+ k2/(sigma r_m^4)) and the matching
slow-variable values u_in/anti.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .constrained import lt_fast_rhs
from .model import CouplingSpec, ModelParams, wrap_phase

__all__ = [
    "BranchError",
    "FastEquilibrium",
    "AsymptoticPoints",
    "solve_branch_r",
    "jacobian_inphase",
    "jacobian_antiphase",
    "trace_det",
    "classify",
    "classify_eigenvalues",
    "asymptotic_points",
    "exact_det_zero",
    "lt_fast_jacobian",
    "find_fast_equilibria",
]

INPHASE = "inphase"
ANTIPHASE = "antiphase"
GENERAL = "general"

#: boundary tolerance for the 2x2 trace/determinant classification
HYPERBOLICITY_TOL = 1e-12
#: |Re eigenvalue| below which a numeric 3x3 classification is nonhyperbolic
#: (looser than the 2x2 tolerance: finite-difference Jacobian noise)
NUMERIC_EIG_TOL = 1e-7


class BranchError(ValueError):
    """Requested branch point does not exist (parameter beyond a fold)."""


@dataclass(frozen=True)
class FastEquilibrium:
    """Equilibrium of the 3-d fast subsystem (r_l, r_t, phi) at frozen u."""

    u: float
    r_l: float
    r_t: float
    phi: float
    branch: str                     # inphase | antiphase | general
    jacobian: NDArray[np.float64]   # numeric 3x3
    classification: str
    residual: float

    @property
    def is_stable(self) -> bool:
        return self.classification in ("stable-node", "stable-focus")


@dataclass(frozen=True)
class AsymptoticPoints:
    """First-order (in k2) transverse bifurcation points for k1 = 0."""

    r_in: float
    r_anti: float
    u_in: float
    u_anti: float


def solve_branch_r(u: float, phi: float, p: ModelParams, k: CouplingSpec) -> float:
    """Upper (spiking-amplitude) root of u = r^4 - 2r^2 - 2 k1 cos(phi).

    The closed form r^2 = 1 + sqrt(1 + u + 2 k1 cos(phi)) is polished with
    Newton steps until |u - (r^4 - 2r^2 - 2 k1 cos(phi))| < 1e-12.
    """
    shift = 2.0 * k.kappa1 * np.cos(phi)
    disc = 1.0 + u + shift
    if disc < 0.0:
        raise BranchError(f"no real branch radius at u={u} (below the fold)")
    r = float(np.sqrt(1.0 + np.sqrt(disc)))
    for _ in range(4):
        res = r**4 - 2.0 * r**2 - shift - u
        if abs(res) < 1e-12:
            break
        dres = 4.0 * r**3 - 4.0 * r
        if dres == 0.0:
            break
        r -= res / dres
    return r


def jacobian_inphase(u: float, r: float, p: ModelParams, k: CouplingSpec) -> NDArray[np.float64]:
    """Transverse (r_t, phi) block at the inphase state r_t = 0, phi = 0."""
    if r <= 0:
        raise ValueError(f"radius must be positive, got {r}")
    return np.array([
        [u + 6 * r**2 - 5 * r**4 - k.kappa1, k.kappa2 * r],
        [2 * p.sigma * p.r_m**2 * r - 2 * p.sigma * r**3 - 4 * k.kappa2 / r,
         -2 * k.kappa1],
    ])


def jacobian_antiphase(u: float, r: float, p: ModelParams, k: CouplingSpec) -> NDArray[np.float64]:
    """Transverse (r_t, phi) block at the antiphase state r_t = 0, phi = pi."""
    if r <= 0:
        raise ValueError(f"radius must be positive, got {r}")
    return np.array([
        [u + 6 * r**2 - 5 * r**4 + k.kappa1, -k.kappa2 * r],
        [2 * p.sigma * p.r_m**2 * r - 2 * p.sigma * r**3 + 4 * k.kappa2 / r,
         2 * k.kappa1],
    ])


def trace_det(block: NDArray[np.float64]) -> tuple[float, float]:
    b = np.asarray(block, dtype=float)
    if b.shape != (2, 2):
        raise ValueError(f"expected a 2x2 block, got shape {b.shape}")
    return float(b[0, 0] + b[1, 1]), float(b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0])


def classify(tr: float, det: float, tol: float = HYPERBOLICITY_TOL) -> str:
    """Planar classification from trace and determinant.

    det < 0 -> saddle; det > 0 with tr < 0 -> stable node/focus depending on
    tr^2 vs 4 det (ties count as node); tr > 0 analogues.  Within tol of the
    det = 0 or tr = 0 boundaries -> nonhyperbolic.
    """
    if abs(det) < tol or (det > 0 and abs(tr) < tol):
        return "nonhyperbolic"
    if det < 0:
        return "saddle"
    shape = "node" if tr * tr >= 4.0 * det else "focus"
    return f"stable-{shape}" if tr < 0 else f"unstable-{shape}"


def classify_eigenvalues(eigs: NDArray[np.complex128], tol: float = NUMERIC_EIG_TOL) -> str:
    """Classification from an eigenvalue set of any dimension."""
    re = np.real(eigs)
    if np.any(np.abs(re) < tol):
        return "nonhyperbolic"
    if np.all(re < 0):
        return "stable-focus" if np.any(np.abs(np.imag(eigs)) > tol) else "stable-node"
    if np.all(re > 0):
        return "unstable-focus" if np.any(np.abs(np.imag(eigs)) > tol) else "unstable-node"
    return "saddle"


def asymptotic_points(p: ModelParams, k: CouplingSpec) -> AsymptoticPoints:
    """First-order (in k2) bifurcation radii and slow-variable values, k1 = 0.

    r_in  = r_m (1 - k2/(sigma r_m^4)),  r_anti = r_m (1 + k2/(sigma r_m^4))
    u_in  = r_m^2 (r_m^2 - 2) + (4 k2/(sigma r_m^2)) (1 - r_m^2),
    u_anti = same with the correction negated.
    """
    if k.kappa1 != 0.0:
        raise ValueError("first-order points are defined for kappa1 = 0")
    if p.sigma <= 0:
        raise ValueError("sigma must be positive")
    if k.kappa2 == 0.0:
        raise ValueError("kappa2 must be nonzero")
    d = k.kappa2 / (p.sigma * p.r_m**4)
    u_base = p.r_m**2 * (p.r_m**2 - 2.0)
    corr = 4.0 * k.kappa2 / (p.sigma * p.r_m**2) * (1.0 - p.r_m**2)
    return AsymptoticPoints(
        r_in=p.r_m * (1.0 - d),
        r_anti=p.r_m * (1.0 + d),
        u_in=u_base + corr,
        u_anti=u_base - corr,
    )


def exact_det_zero(p: ModelParams, k: CouplingSpec, branch: str) -> tuple[float, float]:
    """Exact det = 0 point for k1 = 0: solves sigma r^2 (r_m^2 - r^2) = +-2 k2
    as a quadratic in r^2, takes the root nearest r_m, and maps to
    u = r^4 - 2 r^2.  Returns (r*, u*)."""
    if k.kappa1 != 0.0:
        raise ValueError("closed-form det zero requires kappa1 = 0")
    if branch not in (INPHASE, ANTIPHASE):
        raise ValueError(f"branch must be inphase or antiphase, got {branch!r}")
    rhs = 2.0 * k.kappa2 if branch == INPHASE else -2.0 * k.kappa2
    # s^2 - r_m^2 s + rhs/sigma = 0, s = r^2; upper root is the one near r_m^2
    disc = p.r_m**4 - 4.0 * rhs / p.sigma
    if disc < 0.0:
        raise BranchError(f"no real det-zero radius for kappa2={k.kappa2}")
    s = 0.5 * (p.r_m**2 + np.sqrt(disc))
    r = float(np.sqrt(s))
    return r, float(s * s - 2.0 * s)


def lt_fast_jacobian(r_l: float, r_t: float, phi: float, u: float,
                     p: ModelParams, k: CouplingSpec, h: float = 1e-6) -> NDArray[np.float64]:
    """Central finite-difference Jacobian of the 3-d fast field."""
    s0 = np.array([r_l, r_t, phi], dtype=float)
    J = np.empty((3, 3))
    for j in range(3):
        sp = s0.copy(); sp[j] += h
        sm = s0.copy(); sm[j] -= h
        fp = np.asarray(lt_fast_rhs(sp[0], sp[1], sp[2], u, p, k))
        fm = np.asarray(lt_fast_rhs(sm[0], sm[1], sm[2], u, p, k))
        J[:, j] = (fp - fm) / (2.0 * h)
    return J


def _batch_rhs(S: NDArray[np.float64], u: float, p: ModelParams, k: CouplingSpec):
    """Vectorized fast field over rows (r_l, r_t, phi) of S."""
    rl, rt, ph = S[:, 0], S[:, 1], S[:, 2]
    k1, k2 = k.kappa1, k.kappa2
    cos, sin = np.cos(ph), np.sin(ph)
    rl2, rt2 = rl * rl, rt * rt
    denom = rl2 - rt2
    out = np.empty_like(S)
    out[:, 0] = (u * rl + 2 * rl**3 + 6 * rl * rt2 - rl**5 - 10 * rl**3 * rt2
                 - 5 * rl * rt2 * rt2 + k1 * rl * cos - k2 * rt * sin)
    out[:, 1] = (u * rt + 6 * rl2 * rt + 2 * rt**3 - 5 * rl2 * rl2 * rt
                 - 10 * rl2 * rt**3 - rt**5 - k1 * rt * cos + k2 * rl * sin)
    out[:, 2] = (2 * p.sigma * p.r_m**2 * rl * rt - 2 * p.sigma * rl * rt * (rl2 + rt2)
                 - 2 * k1 * (rl2 + rt2) / denom * sin - 4 * k2 * rl * rt / denom * cos)
    return out


def _default_seed_grid(n_rl: int = 20, n_rt: int = 11, n_phi: int = 24) -> NDArray[np.float64]:
    rl = np.linspace(0.2, 1.6, n_rl)
    rt = np.linspace(-0.5, 0.5, n_rt)
    phi = np.linspace(-np.pi, np.pi, n_phi, endpoint=False) + np.pi / n_phi
    G = np.array(np.meshgrid(rl, rt, phi, indexing="ij")).reshape(3, -1).T
    return G[np.abs(G[:, 1]) < G[:, 0] - 0.05]


def find_fast_equilibria(u: float, p: ModelParams, k: CouplingSpec,
                         seeds: NDArray[np.float64] | None = None,
                         tol: float = 1e-12, max_iter: int = 50,
                         dedup_dist: float = 1e-6) -> list[FastEquilibrium]:
    """All equilibria of the fast (r_l, r_t, phi) subsystem found from a seed
    grid by damped Newton iteration with finite-difference Jacobians.

    Symmetric-subspace seeds from the branch equation are always included, so
    the inphase and antiphase states appear whenever they exist.  Converged
    points closer than dedup_dist (phi wrapped) are merged; each survivor is
    classified from the numeric 3x3 Jacobian.
    """
    if seeds is None:
        seeds = _default_seed_grid()
    seeds = np.asarray(seeds, dtype=float).reshape(-1, 3).copy()
    sym = []
    for phi0 in (0.0, np.pi):
        try:
            sym.append([solve_branch_r(u, phi0, p, k), 0.0, phi0])
        except BranchError:
            pass
    if sym:
        seeds = np.vstack([np.asarray(sym), seeds])

    S = seeds.copy()
    active = np.ones(len(S), dtype=bool)
    converged = np.zeros(len(S), dtype=bool)
    h = 1e-7
    eye_h = np.eye(3) * h
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        Sa = S[idx]
        F = _batch_rhs(Sa, u, p, k)
        good = np.all(np.isfinite(F), axis=1)
        done = good & (np.max(np.abs(F), axis=1) < tol)
        converged[idx[done]] = True
        active[idx[done | ~good]] = False
        keep = good & ~done
        idx = idx[keep]
        if idx.size == 0:
            continue
        Sa = S[idx]
        F = F[keep]
        J = np.empty((idx.size, 3, 3))
        for j in range(3):
            J[:, :, j] = (_batch_rhs(Sa + eye_h[j], u, p, k)
                          - _batch_rhs(Sa - eye_h[j], u, p, k)) / (2.0 * h)
        try:
            step = np.linalg.solve(J, F[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            step = np.array([np.linalg.lstsq(Jj, Fj, rcond=None)[0]
                             for Jj, Fj in zip(J, F)])
        # damp oversized steps; reject iterates outside the chart (margin
        # keeps finite-difference stencils clear of the r_l = |r_t| line)
        norm = np.max(np.abs(step), axis=1, keepdims=True)
        step = np.where(norm > 0.5, step * (0.5 / norm), step)
        Snew = Sa - step
        ok = (Snew[:, 0] > np.abs(Snew[:, 1]) + 1e-6) & (Snew[:, 0] < 3.0)
        S[idx[ok]] = Snew[ok]
        active[idx[~ok]] = False

    found: list[FastEquilibrium] = []
    conv = S[converged]
    if conv.size:
        conv[:, 2] = wrap_phase(conv[:, 2])
        res_all = np.max(np.abs(_batch_rhs(conv, u, p, k)), axis=1)
        keep = res_all <= 1e-10
        conv, res_all = conv[keep], res_all[keep]
        # coarse dedup by rounding (fast), exact pairwise merge on survivors
        key = np.column_stack([conv[:, :2], np.cos(conv[:, 2]), np.sin(conv[:, 2])])
        _, uniq = np.unique(np.round(key / max(dedup_dist, 1e-9)), axis=0,
                            return_index=True)
        for ui in sorted(uniq):
            rl, rt, phi = (float(v) for v in conv[ui])
            dup = False
            for e in found:
                dphi = float(wrap_phase(phi - e.phi))
                if max(abs(rl - e.r_l), abs(rt - e.r_t), abs(dphi)) < max(dedup_dist, 1e-9):
                    dup = True
                    break
            if dup:
                continue
            J = lt_fast_jacobian(rl, rt, phi, u, p, k)
            cls = classify_eigenvalues(np.linalg.eigvals(J))
            if abs(rt) < 1e-8 and abs(phi) < 1e-8:
                branch = INPHASE
            elif abs(rt) < 1e-8 and abs(wrap_phase(phi - np.pi)) < 1e-8:
                branch = ANTIPHASE
            else:
                branch = GENERAL
            found.append(FastEquilibrium(u=u, r_l=rl, r_t=rt, phi=phi, branch=branch,
                                         jacobian=J, classification=cls,
                                         residual=float(res_all[ui])))
    found.sort(key=lambda e: (e.phi, e.r_l))
    return found
