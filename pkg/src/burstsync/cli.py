"""Command-line front end.

Subcommands: simulate, scan, reproduce, analytic-points, presets.  Global
flags: --config PATH, --seed N, --out DIR, --workers N, --set key=value
(repeatable).  Outputs are plot-ready CSV plus JSON summaries; every output
embeds the hash of (command, resolved config, seed, version), so identical
inputs yield identical files.

Exit codes: 0 success, 1 reproduction-comparison failure, 2 configuration
error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import (ConfigError, ScenarioConfig, build_scenario, parse_config_file,
                     parse_override, scenario_to_flat)
from .integrate import NumericalError, Trajectory, simulate_network
from .model import CouplingSpec, ModelParams
from .presets import PRESETS, preset, preset_names
from .scan import (BranchDiagram, NoSignChangeError, RegionBoundary, boundary_scan,
                   det_zero_bisect, link_columns)
from .stability import (ANTIPHASE, INPHASE, BranchError, asymptotic_points,
                        exact_det_zero, find_fast_equilibria)
from .synchrony import (NoBurstsError, detect_transitions, pairwise_distance,
                        segment_bursts, slow_passage_offset, spike_peaks)

EXIT_OK = 0
EXIT_COMPARISON = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


# ---------------------------------------------------------------- output ---

def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def _csv_field(s: str) -> str:
    if any(ch in s for ch in ",\"\n"):
        return '"' + s.replace('"', '""') + '"'
    return s


def write_csv(path: Path, header: list[str], rows, comments: dict) -> None:
    lines = [f"# {k}: {v}" for k, v in comments.items()]
    lines.append(",".join(_csv_field(h) for h in header))
    for row in rows:
        lines.append(",".join(_csv_field(_fmt(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, obj: dict) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o)}")


def manifest_hash(command: str, flat: dict, seed) -> str:
    payload = json.dumps({"command": command, "config": flat, "seed": seed,
                          "version": __version__},
                         sort_keys=True, default=_json_default)
    return hashlib.sha256(payload.encode()).hexdigest()


class RunContext:
    """Collects outputs and writes the manifest at the end of a command."""

    def __init__(self, command: str, cfg_flat: dict, seed, out_dir: Path):
        self.command = command
        self.flat = dict(cfg_flat)
        self.seed = seed
        self.out_dir = out_dir
        self.hash = manifest_hash(command, self.flat, seed)
        self.outputs: list[str] = []
        self.t0 = time.perf_counter()
        out_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        self.outputs.append(name)
        return self.out_dir / name

    def comments(self) -> dict:
        return {"manifest_hash": self.hash, "tool_version": __version__}

    def finish(self) -> None:
        write_json(self.out_dir / "manifest.json", {
            "command": self.command,
            "config": self.flat,
            "seed": self.seed,
            "tool_version": __version__,
            "wall_time_s": round(time.perf_counter() - self.t0, 3),
            "outputs": self.outputs,
            "manifest_hash": self.hash,
        })


# ----------------------------------------------------------- scenario io ---

def resolve_scenario(args, preset_name: str | None = None) -> ScenarioConfig:
    sources = []
    if preset_name is not None:
        sources.append(preset(preset_name))
    if args.config:
        sources.append(parse_config_file(args.config))
    overrides = dict(parse_override(s) for s in (args.set or []))
    if args.seed is not None:
        overrides["integrator.rng_seed"] = args.seed
    sources.append(overrides)
    return build_scenario(*sources)


def run_scenario(cfg: ScenarioConfig) -> Trajectory:
    return simulate_network(cfg.params, cfg.coupling, cfg.initial, cfg.integrator)


def synchrony_summary(traj: Trajectory, cfg: ScenarioConfig) -> dict:
    """Burst/label/transition summary of a trajectory (n >= 2)."""
    a = cfg.analysis
    try:
        report = detect_transitions(traj, params=cfg.params, r_hi=a.r_hi, r_lo=a.r_lo,
                                    window_periods=a.window_periods,
                                    stride_periods=a.stride_periods,
                                    persist_windows=a.persist_windows,
                                    phase_floor=a.phase_floor,
                                    transient_frac=a.transient_frac,
                                    angle_tol=a.angle_tol)
    except NoBurstsError:
        return {"burst_count": 0, "bursts": [], "transition_counts": {}}
    bursts = []
    counts: dict[str, int] = {}
    for b in report.bursts:
        seg = b.segment
        events = []
        for e in b.events:
            key = f"{e.from_label}->{e.to_label}"
            counts[key] = counts.get(key, 0) + 1
            events.append({"t": e.t, "u_mean": e.u_mean, "from": e.from_label,
                           "to": e.to_label})
        bursts.append({
            "start_t": float(traj.times[seg.start]),
            "end_t": float(traj.times[seg.end - 1]),
            "u_start": seg.u_start,
            "u_end": seg.u_end,
            "labels": b.labels,
            "events": events,
            "d": {f"d_{i+1}_{j+1}": v for (i, j), v in b.d_summary.items()},
        })
    return {"burst_count": len(bursts), "bursts": bursts, "transition_counts": counts}


# ------------------------------------------------------------- commands ----

def cmd_presets(args) -> int:
    if args.name:
        flat = preset(args.name)
        for key in sorted(flat):
            print(f"{key} = {flat[key]}")
    else:
        for name in preset_names():
            print(name)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = resolve_scenario(args, args.preset)
    ctx = RunContext("simulate", scenario_to_flat(cfg), cfg.integrator.rng_seed,
                     Path(args.out))
    traj = run_scenario(cfg)
    n = traj.n
    header = ["t"]
    for j in range(n):
        header += [f"x{j+1}", f"y{j+1}", f"u{j+1}"]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    header += [f"d_{i+1}_{j+1}" for i, j in pairs]
    dists = [pairwise_distance(traj, i, j) for i, j in pairs]
    rows = []
    for m in range(len(traj.times)):
        row = [traj.times[m]]
        for j in range(n):
            row += [traj.x[m, j], traj.y[m, j], traj.u[m, j]]
        row += [d[m] for d in dists]
        rows.append(row)
    write_csv(ctx.path("trajectory.csv"), header, rows,
              {**ctx.comments(), "schema": "trajectory-v1"})

    summary: dict = {"n": n, "manifest_hash": ctx.hash}
    if n >= 2:
        summary.update(synchrony_summary(traj, cfg))
    else:
        segs = segment_bursts(traj, cfg.analysis.r_hi, cfg.analysis.r_lo)
        summary["burst_count"] = len(segs)
        summary["bursts"] = [{"start_t": float(traj.times[s.start]),
                              "end_t": float(traj.times[s.end - 1]),
                              "u_start": s.u_start, "u_end": s.u_end}
                             for s in segs]
    write_json(ctx.path("summary.json"), summary)
    ctx.finish()
    print(f"wrote {ctx.out_dir}/trajectory.csv ({len(rows)} samples, n={n})")
    return EXIT_OK


def _branch_column(task):
    u, p, k = task
    return find_fast_equilibria(u, p, k)


def _boundary_column(task):
    plane, lam, p, k, window = task
    return boundary_scan(plane, [lam], p, k, u_window=window)


def _run_branch(cfg: ScenarioConfig, workers: int) -> BranchDiagram:
    s = cfg.scan
    us = np.linspace(s.u_min, s.u_max, s.n_u)
    if workers > 1:
        tasks = [(float(u), cfg.params, cfg.coupling) for u in us]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            points = list(ex.map(_branch_column, tasks, chunksize=max(1, len(us) // (4 * workers))))
    else:
        points = [find_fast_equilibria(float(u), cfg.params, cfg.coupling) for u in us]
    return BranchDiagram(us=us, points=points, branch_ids=link_columns(us, points))


def _run_boundary(cfg: ScenarioConfig, workers: int,
                  u_window=(-0.95, 0.45)) -> RegionBoundary:
    s = cfg.scan
    lams = np.linspace(s.lambda_min, s.lambda_max, s.n_lambda)
    if workers > 1:
        tasks = [(s.plane, float(l), cfg.params, cfg.coupling, u_window) for l in lams]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_boundary_column, tasks, chunksize=max(1, len(lams) // (4 * workers))))
        return RegionBoundary(
            plane=s.plane, lambdas=lams,
            u_in=np.array([p.u_in[0] for p in parts]),
            u_anti=np.array([p.u_anti[0] for p in parts]),
            regions=[p.regions[0] for p in parts],
            u_window=u_window)
    return boundary_scan(s.plane, lams, cfg.params, cfg.coupling, u_window=u_window)


def _region_string(row) -> str:
    return "|".join(f"{label}:{_fmt(lo)}:{_fmt(hi)}" for label, lo, hi in row)


def cmd_scan(args) -> int:
    cfg = resolve_scenario(args, args.preset)
    ctx = RunContext("scan", scenario_to_flat(cfg), cfg.integrator.rng_seed,
                     Path(args.out))
    if cfg.scan.kind == "branch":
        diag = _run_branch(cfg, args.workers)
        rows = []
        for u, eqs, ids in zip(diag.us, diag.points, diag.branch_ids):
            for e, bid in zip(eqs, ids):
                rows.append([u, e.r_l, e.r_t, e.phi, e.classification,
                             int(e.is_stable), bid, e.residual])
        write_csv(ctx.path("branch.csv"),
                  ["u", "r_l", "r_t", "phi", "classification", "stable",
                   "branch_id", "residual"],
                  rows, {**ctx.comments(), "schema": "branch-v1"})
        print(f"wrote {ctx.out_dir}/branch.csv ({len(rows)} points)")
    else:
        rb = _run_boundary(cfg, args.workers)
        rows = [[lam, rb.u_in[i], rb.u_anti[i], _region_string(rb.regions[i])]
                for i, lam in enumerate(rb.lambdas)]
        write_csv(ctx.path("boundary.csv"),
                  [rb.plane, "u_in", "u_anti", "regions"],
                  rows, {**ctx.comments(), "schema": "boundary-v1"})
        print(f"wrote {ctx.out_dir}/boundary.csv ({len(rows)} rows)")
    ctx.finish()
    return EXIT_OK


def cmd_analytic_points(args) -> int:
    cfg = resolve_scenario(args, args.preset)
    ctx = RunContext("analytic-points", scenario_to_flat(cfg),
                     cfg.integrator.rng_seed, Path(args.out))
    out = analytic_points_payload(cfg.params, cfg.coupling)
    for key in ("r_in", "r_anti", "u_in", "u_anti"):
        print(f"{key:7s} = {_fmt(out['first_order'][key])}")
    for branch in (INPHASE, ANTIPHASE):
        r, u = out["exact"][branch]["r"], out["exact"][branch]["u"]
        print(f"exact {branch:9s} r* = {_fmt(r)}   u* = {_fmt(u)}")
    out["manifest_hash"] = ctx.hash
    write_json(ctx.path("analytic_points.json"), out)
    ctx.finish()
    return EXIT_OK


def analytic_points_payload(p: ModelParams, k: CouplingSpec) -> dict:
    k0 = CouplingSpec(kappa1=0.0, kappa2=k.kappa2, c=k.c)
    ap = asymptotic_points(p, k0)
    payload = {
        "first_order": {"r_in": ap.r_in, "r_anti": ap.r_anti,
                        "u_in": ap.u_in, "u_anti": ap.u_anti},
        "exact": {},
    }
    for branch in (INPHASE, ANTIPHASE):
        r, u = exact_det_zero(p, k0, branch)
        payload["exact"][branch] = {"r": r, "u": u}
    return payload


# ------------------------------------------------------------ reproduce ----

class Check:
    """One named pass/fail comparison inside a reproduction report."""

    def __init__(self):
        self.items: list[dict] = []

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.items.append({"name": name, "pass": bool(ok), "detail": detail})
        print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  [{detail}]" if detail else ""))

    def close(self, name, value, expect, tol, fmt=_fmt) -> None:
        ok = abs(value - expect) <= tol
        self.add(name, ok, f"got {fmt(value)}, want {fmt(expect)} +- {fmt(tol)}")

    @property
    def ok(self) -> bool:
        return all(i["pass"] for i in self.items)


def _scenario_for(name: str, args, extra: dict | None = None) -> ScenarioConfig:
    sources = [preset(name)]
    if extra:
        sources.append(extra)
    if args.config:
        sources.append(parse_config_file(args.config))
    overrides = dict(parse_override(s) for s in (args.set or []))
    sources.append(overrides)
    return build_scenario(*sources)


def _reproduce_table(name: str, args, chk: Check) -> None:
    cfg = _scenario_for(name, args)
    p, k = cfg.params, cfg.coupling
    pay = analytic_points_payload(p, k)
    fo = pay["first_order"]
    # published comparison values (4 decimals; the numeric rows carry 3-4)
    if k.kappa2 > 0:
        table = {"r_in": 1.3229, "r_anti": 1.3771, "u_in": -0.4438, "u_anti": -0.2032}
        numeric = {INPHASE: (1.3210, -0.4433), ANTIPHASE: (1.376, -0.2027)}
    else:
        table = {"r_in": 1.3771, "r_anti": 1.3229, "u_in": -0.2032, "u_anti": -0.4438}
        numeric = {INPHASE: (1.376, -0.2027), ANTIPHASE: (1.3210, -0.4433)}
    for key, want in table.items():
        chk.close(f"{name}: first-order {key}", fo[key], want, 1e-4)
    for branch, (r_want, u_want) in numeric.items():
        got = pay["exact"][branch]
        chk.close(f"{name}: det-zero r ({branch})", got["r"], r_want, 2e-3)
        chk.close(f"{name}: det-zero u ({branch})", got["u"], u_want, 2e-3)
        u_bis = det_zero_bisect(branch, (-0.95, 0.45), p,
                                CouplingSpec(0.0, k.kappa2, k.c))
        chk.close(f"{name}: bisection matches closed form ({branch})",
                  u_bis, got["u"], 1e-8)
    if name == "table2":
        ref = analytic_points_payload(p, CouplingSpec(0.0, -k.kappa2, k.c))
        swapped = (fo["r_in"] == ref["first_order"]["r_anti"]
                   and fo["r_anti"] == ref["first_order"]["r_in"]
                   and fo["u_in"] == ref["first_order"]["u_anti"]
                   and fo["u_anti"] == ref["first_order"]["u_in"])
        chk.add("table2: values swap exactly under kappa2 -> -kappa2", swapped)


def _burst_onset_offset_checks(name, traj, cfg, chk: Check) -> None:
    r = traj.radii()[:, 0]
    u = traj.u[:, 0]
    segs = segment_bursts(traj, cfg.analysis.r_hi, cfg.analysis.r_lo)
    chk.add(f"{name}: alternates active/quiescent (>=2 bursts)", len(segs) >= 2,
            f"{len(segs)} complete bursts")
    onset_ok, term_ok = True, True
    for seg in segs:
        i = seg.start
        while i > 0 and r[i - 1] >= 0.5:
            i -= 1
        while i < seg.end and r[i] < 0.5:
            i += 1
        if u[i] <= 0:
            onset_ok = False
        peaks = spike_peaks(traj, 0, height=0.5)
        peaks = peaks[(peaks >= seg.start) & (peaks < seg.end)]
        tall = peaks[traj.x[peaks, 0] >= 0.95]
        if tall.size == 0:
            term_ok = False
            continue
        last_tall = tall[-1]
        # full-height spiking must persist to the fold, with a fast collapse
        if u[last_tall] > -0.9 or np.sum(peaks > last_tall) > 4:
            term_ok = False
    chk.add(f"{name}: spike onset at u > 0 in every burst (delayed onset)", onset_ok)
    chk.add(f"{name}: full-height spiking persists to the fold", term_ok)


def _reproduce_fig2(args, chk: Check) -> dict:
    cfg = _scenario_for("fig2", args)
    traj = run_scenario(cfg)
    _burst_onset_offset_checks("fig2", traj, cfg, chk)
    cfg_t = _scenario_for("fig2_tonic", args)
    traj_t = run_scenario(cfg_t)
    half = len(traj_t.times) // 2
    rmin = float(traj_t.radii()[half:, 0].min())
    chk.add("fig2: tonic spiking for a=1.2 (radius stays above 0.5)", rmin > 0.5,
            f"min radius {rmin:.3f} over second half")
    return {"tonic_min_radius": rmin}


def _transition_gate(name: str, args, chk: Check, *, preset_name: str,
                     from_label: str, to_label: str, n_seeds: int,
                     u_limit: float | None, min_fraction: float = 0.9) -> dict:
    """Multi-seed statistical gate: every complete burst should show exactly
    one from->to transition (and none in reverse), at u below u_limit."""
    seeds = [args.seed] if args.seed is not None else list(range(1, n_seeds + 1))
    total = good = 0
    per_seed = []
    event_us: list[float] = []
    for seed in seeds:
        cfg = _scenario_for(preset_name, args, {"integrator.rng_seed": seed})
        traj = run_scenario(cfg)
        a = cfg.analysis
        try:
            report = detect_transitions(traj, params=cfg.params, r_hi=a.r_hi,
                                        r_lo=a.r_lo, window_periods=a.window_periods,
                                        stride_periods=a.stride_periods,
                                        persist_windows=a.persist_windows,
                                        phase_floor=a.phase_floor,
                                        transient_frac=a.transient_frac,
                                        angle_tol=a.angle_tol)
        except NoBurstsError:
            per_seed.append({"seed": seed, "bursts": 0, "good": 0})
            continue
        n_ok = 0
        for b_idx in range(len(report.bursts)):
            fwd = report.count_events(from_label, to_label, b_idx)
            rev = report.count_events(to_label, from_label, b_idx)
            matching = [e.u_mean for e in report.bursts[b_idx].events
                        if e.from_label == from_label and e.to_label == to_label]
            event_us.extend(matching)
            u_ok = u_limit is None or all(u <= u_limit for u in matching)
            n_ok += (fwd == 1 and rev == 0 and u_ok)
        total += len(report.bursts)
        good += n_ok
        per_seed.append({"seed": seed, "bursts": len(report.bursts), "good": n_ok})
    frac = good / total if total else 0.0
    chk.add(f"{name}: >= 1 complete burst over {len(seeds)} seed(s)", total >= 1,
            f"{total} bursts")
    chk.add(f"{name}: {from_label}->{to_label} once per burst in >= "
            f"{int(min_fraction * 100)}% of bursts",
            total >= 1 and frac >= min_fraction, f"{good}/{total}")
    return {"bursts": total, "good": good, "fraction": frac, "per_seed": per_seed,
            "event_u_min": min(event_us) if event_us else None,
            "event_u_max": max(event_us) if event_us else None}


def _reproduce_fig5(name: str, args, chk: Check) -> dict:
    cfg = _scenario_for(name, args)
    diag = _run_branch(cfg, args.workers)
    stable_in = [u for u, eqs in zip(diag.us, diag.points) for e in eqs
                 if e.branch == INPHASE and e.is_stable]
    stable_anti = [u for u, eqs in zip(diag.us, diag.points) for e in eqs
                   if e.branch == ANTIPHASE and e.is_stable]
    chk.add(f"{name}: stable inphase and antiphase branches both present",
            bool(stable_in) and bool(stable_anti))
    if not (stable_in and stable_anti):
        return {}
    lo = max(min(stable_in), min(stable_anti))
    hi = min(max(stable_in), max(stable_anti))
    chk.add(f"{name}: bistable overlap contains u=-0.32",
            lo <= -0.32 <= hi, f"overlap [{lo:.4f}, {hi:.4f}]")
    if cfg.coupling.kappa2 > 0:
        chk.add(f"{name}: inphase stable on the high-u (burst onset) side, "
                f"antiphase toward the fold",
                max(stable_in) > max(stable_anti) and min(stable_anti) < min(stable_in),
                f"in [{min(stable_in):.3f},{max(stable_in):.3f}] "
                f"anti [{min(stable_anti):.3f},{max(stable_anti):.3f}]")
    else:
        chk.add(f"{name}: antiphase stable on the high-u (burst onset) side, "
                f"inphase toward the fold",
                max(stable_anti) > max(stable_in) and min(stable_in) < min(stable_anti),
                f"in [{min(stable_in):.3f},{max(stable_in):.3f}] "
                f"anti [{min(stable_anti):.3f},{max(stable_anti):.3f}]")
    return {"stable_in": [min(stable_in), max(stable_in)],
            "stable_anti": [min(stable_anti), max(stable_anti)]}


def _band_width(rb: RegionBoundary) -> np.ndarray:
    return np.abs(rb.u_anti - rb.u_in)


def _labels_at(plane, lam, p, k, window=(-0.95, 0.45)) -> set[str]:
    rb = boundary_scan(plane, [lam], p, k, u_window=window)
    return {label for label, _, _ in rb.regions[0]}


def _reproduce_boundary(name: str, args, chk: Check) -> dict:
    cfg = _scenario_for(name, args)
    rb = _run_boundary(cfg, args.workers)
    p, k = cfg.params, cfg.coupling
    width = _band_width(rb)
    finite = np.isfinite(width)
    if name == "fig6":
        w = width[finite]
        chk.add("fig6: bistable band narrows as sigma grows",
                np.all(np.diff(w) < 1e-6) and w[-1] < 0.6 * w[0],
                f"width {w[0]:.4f} -> {w[-1]:.4f}")
    elif name == "fig7":
        mid = 0.5 * (rb.u_in + rb.u_anti)[finite]
        chk.add("fig7: band position shifts along u with r_m",
                np.all(np.diff(mid) > 0) and mid[-1] - mid[0] > 0.5,
                f"center {mid[0]:.3f} -> {mid[-1]:.3f}")
    elif name == "fig8":
        seen = set().union(*(set(l for l, _, _ in row) for row in rb.regions))
        chk.add("fig8: regions a, b, c all occur in the plane",
                {"a", "b", "c"} <= seen, f"saw {sorted(seen)}")
        chk.add("fig8: strongly inhibitory kappa1 leaves antiphase only",
                _labels_at("kappa1", -0.06, p, k) == {"a"})
        chk.add("fig8: weakly inhibitory kappa1 still bistable",
                "b" in _labels_at("kappa1", -0.005, p, k))
    elif name == "fig9":
        chk.add("fig9: bistable band extends above kappa1=0",
                "b" in _labels_at("kappa1", 0.005, p, k))
        chk.add("fig9: strongly excitatory kappa1 leaves inphase only",
                _labels_at("kappa1", 0.06, p, k) == {"c"})
    elif name == "fig10":
        # the inphase-only window is asymmetric: excitatory kappa1 keeps the
        # inphase state stable for all negative and very weak positive kappa2
        ok = all(_labels_at("kappa2", v, p, k) == {"c"}
                 for v in (-0.004, -0.002, 0.0, 0.0004))
        chk.add("fig10: negative/weak kappa2 with excitatory kappa1 leaves inphase only", ok)
        chk.add("fig10: strong kappa2 restores the bistable band",
                "b" in _labels_at("kappa2", 0.2, p, k))
    elif name == "fig11":
        ok = all(_labels_at("kappa2", v, p, k) == {"a"}
                 for v in (0.004, 0.002, 0.0, -0.0004))
        chk.add("fig11: positive/weak kappa2 with inhibitory kappa1 leaves antiphase only", ok)
        chk.add("fig11: strong kappa2 restores the bistable band",
                "b" in _labels_at("kappa2", 0.2, p, k))
    return {"u_in": rb.u_in, "u_anti": rb.u_anti}


def _reproduce_slowpassage(args, chk: Check) -> dict:
    cfg = _scenario_for("slowpassage", args)
    u_in_pred = asymptotic_points(
        cfg.params, CouplingSpec(0.0, cfg.coupling.kappa2, cfg.coupling.c)).u_in
    offsets = {}
    for eps in (1e-5, 1e-3):
        seeds = [args.seed] if args.seed is not None else [1, 2, 3]
        deltas = []
        for seed in seeds:
            cfg_e = _scenario_for("slowpassage", args,
                                  {"integrator.noise_amplitude": eps,
                                   "integrator.rng_seed": seed})
            traj = run_scenario(cfg_e)
            a = cfg_e.analysis
            report = detect_transitions(traj, params=cfg_e.params, r_hi=a.r_hi,
                                        r_lo=a.r_lo, transient_frac=a.transient_frac)
            deltas.append(slow_passage_offset(report, u_in_pred))
        offsets[eps] = float(np.mean(deltas))
    chk.add("slowpassage: transition delayed past the frozen-u point (du < 0)",
            offsets[1e-5] < 0, f"du = {offsets[1e-5]:.4f}")
    chk.add("slowpassage: larger noise shrinks the delay",
            abs(offsets[1e-3]) < abs(offsets[1e-5]),
            f"|du| {abs(offsets[1e-3]):.4f} (1e-3) vs {abs(offsets[1e-5]):.4f} (1e-5)")
    return {"delta_u": offsets, "u_in_predicted": float(u_in_pred)}


REPRODUCE_TARGETS = ("table1", "table2", "fig2", "fig3", "fig4",
                     "fig5a", "fig5b", "fig5c", "fig5d",
                     "fig6", "fig7", "fig8", "fig9", "fig10", "fig11",
                     "fig12", "slowpassage")


def cmd_reproduce(args) -> int:
    target = args.target
    if target not in REPRODUCE_TARGETS:
        print(f"unknown reproduce target {target!r}; known: {', '.join(REPRODUCE_TARGETS)}",
              file=sys.stderr)
        return EXIT_CONFIG
    chk = Check()
    detail: dict = {}
    ctx = RunContext(f"reproduce-{target}", preset(target) if target in PRESETS else {},
                     args.seed, Path(args.out))
    if target in ("table1", "table2"):
        _reproduce_table(target, args, chk)
    elif target == "fig2":
        detail = _reproduce_fig2(args, chk)
    elif target == "fig3":
        u_lim = asymptotic_points(ModelParams(0.01, 0.8, 0.005, 3.0, 1.35),
                                  CouplingSpec.all_to_all(2, 0.0, 0.2)).u_in
        detail = _transition_gate("fig3", args, chk, preset_name="fig3",
                                  from_label="inphase", to_label="antiphase",
                                  n_seeds=10, u_limit=u_lim)
    elif target == "fig4":
        u_lim = asymptotic_points(ModelParams(0.01, 0.8, 0.005, 3.0, 1.35),
                                  CouplingSpec.all_to_all(2, 0.0, -0.2)).u_anti
        detail = _transition_gate("fig4", args, chk, preset_name="fig4",
                                  from_label="antiphase", to_label="inphase",
                                  n_seeds=10, u_limit=u_lim)
    elif target == "fig12":
        detail = _transition_gate("fig12", args, chk, preset_name="fig12",
                                  from_label="splay", to_label="inphase",
                                  n_seeds=5, u_limit=None)
    elif target.startswith("fig5"):
        detail = _reproduce_fig5(target, args, chk)
    elif target in ("fig6", "fig7", "fig8", "fig9", "fig10", "fig11"):
        detail = _reproduce_boundary(target, args, chk)
    elif target == "slowpassage":
        detail = _reproduce_slowpassage(args, chk)
    report = {"target": target, "pass": chk.ok, "checks": chk.items,
              "detail": detail, "manifest_hash": ctx.hash}
    write_json(ctx.path("report.json"), report)
    ctx.finish()
    print(f"{'PASS' if chk.ok else 'FAIL'}  reproduce {target}")
    return EXIT_OK if chk.ok else EXIT_COMPARISON


# ---------------------------------------------------------------- parser ---

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="burstsync",
        description="Coupled elliptic-burster simulation and synchrony analysis.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    def add_common(sp):
        sp.add_argument("--config", metavar="PATH", help="key = value scenario file")
        sp.add_argument("--seed", type=int, default=None, help="override rng seed")
        sp.add_argument("--out", default="out", metavar="DIR", help="output directory")
        sp.add_argument("--workers", type=int, default=1, help="worker processes for scans")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one config key (repeatable)")

    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="integrate a scenario and analyse synchrony")
    sp.add_argument("--preset", choices=preset_names(), default=None)
    add_common(sp)
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("scan", help="branch diagram or two-parameter boundary scan")
    sp.add_argument("--preset", choices=preset_names(), default=None)
    add_common(sp)
    sp.set_defaults(fn=cmd_scan)

    sp = sub.add_parser("reproduce", help="run a bundled scenario and compare "
                                          "against its expected outcomes")
    sp.add_argument("target", metavar="TARGET",
                    help=f"one of: {', '.join(REPRODUCE_TARGETS)}")
    add_common(sp)
    sp.set_defaults(fn=cmd_reproduce)

    sp = sub.add_parser("analytic-points", help="closed-form transverse bifurcation points")
    sp.add_argument("--preset", choices=preset_names(), default="table1")
    add_common(sp)
    sp.set_defaults(fn=cmd_analytic_points)

    sp = sub.add_parser("presets", help="list bundled presets or dump one")
    sp.add_argument("name", nargs="?", default=None)
    sp.set_defaults(fn=cmd_presets)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except KeyError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, BranchError, NoSignChangeError, NoBurstsError) as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
