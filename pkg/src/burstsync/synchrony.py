"""Trajectory post-processing: burst segmentation, phase-difference
classification, and within-burst synchrony-transition detection.

Labels are assigned to sliding windows whose length is tied to the
estimated spike period (so long bursts contain many windows).  A label
counts as established only when it persists for a configurable number of
window-lengths; transitions are reported between consecutive established
synchronized labels (inphase / antiphase / splay), with "mixed" stretches
treated as transitional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.signal import find_peaks

from .model import ModelParams, omega_of_r, wrap_phase
from .integrate import Trajectory

FloatArray = NDArray[np.float64]

__all__ = [
    "BurstSegment",
    "TransitionEvent",
    "BurstAnalysis",
    "SynchronyReport",
    "NoBurstsError",
    "pairwise_distance",
    "segment_bursts",
    "phase_difference_series",
    "classify_synchrony",
    "detect_transitions",
    "slow_passage_offset",
    "spike_peaks",
]

INPHASE = "inphase"
ANTIPHASE = "antiphase"
SPLAY = "splay"
MIXED = "mixed"
SYNC_LABELS = (INPHASE, ANTIPHASE, SPLAY)


class NoBurstsError(ValueError):
    """Trajectory contains no complete burst after the transient discard."""


@dataclass(frozen=True)
class BurstSegment:
    """Half-open sample range [start, end) of one active phase."""

    start: int
    end: int
    mean_radius: FloatArray
    u_start: float
    u_end: float

    @property
    def n_samples(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class TransitionEvent:
    t: float
    u_mean: float
    from_label: str
    to_label: str
    burst_index: int


@dataclass
class BurstAnalysis:
    segment: BurstSegment
    window_times: FloatArray
    labels: list[str]
    events: list[TransitionEvent]
    d_summary: dict


@dataclass
class SynchronyReport:
    bursts: list[BurstAnalysis] = field(default_factory=list)

    @property
    def events(self) -> list[TransitionEvent]:
        return [e for b in self.bursts for e in b.events]

    def count_events(self, from_label: str, to_label: str, burst_index=None) -> int:
        return sum(1 for e in self.events
                   if e.from_label == from_label and e.to_label == to_label
                   and (burst_index is None or e.burst_index == burst_index))


def pairwise_distance(traj: Trajectory, i: int, j: int) -> FloatArray:
    """Euclidean distance sqrt((x_i-x_j)^2 + (y_i-y_j)^2 + (u_i-u_j)^2) per sample."""
    n = traj.n
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"invalid unit pair ({i}, {j}) for n={n}")
    return np.sqrt((traj.x[:, i] - traj.x[:, j])**2
                   + (traj.y[:, i] - traj.y[:, j])**2
                   + (traj.u[:, i] - traj.u[:, j])**2)


def segment_bursts(traj: Trajectory, r_hi: float = 0.8, r_lo: float = 0.3) -> list[BurstSegment]:
    """Hysteresis detector on the mean radius: a burst opens on an upward
    crossing of r_hi and closes on a downward crossing of r_lo.  Partial
    bursts at the record edges are discarded.

    Each segment is trimmed to the longest contiguous span where every
    unit's radius exceeds r_lo, so the advertised per-unit radius bound
    holds throughout every segment.  When that span covers less than 80% of
    the raw envelope the units were not jointly active for most of the burst
    (alternating or mid-burst desynchronized bursts) and the segment is
    discarded."""
    if not (r_hi > r_lo > 0):
        raise ValueError(f"need r_hi > r_lo > 0, got ({r_hi}, {r_lo})")
    rm = traj.mean_radius()
    rmin = traj.radii().min(axis=1)
    um = traj.u_mean()
    segs: list[BurstSegment] = []
    # armed only once the signal has been seen below r_lo, so a record that
    # begins mid-burst never yields a leading partial segment
    armed = rm[0] < r_lo
    start = None
    for i, v in enumerate(rm):
        if start is None:
            if not armed:
                if v < r_lo:
                    armed = True
            elif v > r_hi:
                start = i
        elif v < r_lo:
            first, last = _longest_true_run(rmin[start:i] > r_lo)
            if first >= 0 and (last - first + 1) >= 0.8 * (i - start):
                first += start
                last += start
                segs.append(BurstSegment(start=first, end=last + 1,
                                         mean_radius=rm[first:last + 1].copy(),
                                         u_start=float(um[first]),
                                         u_end=float(um[last])))
            start = None
    return segs


def _longest_true_run(mask: NDArray[np.bool_]) -> tuple[int, int]:
    """(first, last) indices of the longest run of True; (-1, -1) if none."""
    best = (-1, -1)
    best_len = 0
    s = None
    for i, v in enumerate(mask):
        if v and s is None:
            s = i
        elif not v and s is not None:
            if i - s > best_len:
                best, best_len = (s, i - 1), i - s
            s = None
    if s is not None and len(mask) - s > best_len:
        best = (s, len(mask) - 1)
    return best


def phase_difference_series(traj: Trajectory, i: int, j: int,
                            floor: float = 0.1) -> tuple[FloatArray, NDArray[np.bool_]]:
    """Wrapped phase difference arg z_i - arg z_j per sample, with a validity
    mask marking samples where either radius is below ``floor`` (NaN there)."""
    n = traj.n
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"invalid unit pair ({i}, {j}) for n={n}")
    z = traj.z
    valid = (np.abs(z[:, i]) > floor) & (np.abs(z[:, j]) > floor)
    phi = wrap_phase(np.angle(z[:, i]) - np.angle(z[:, j]))
    phi = np.where(valid, phi, np.nan)
    return phi, valid


def _order_parameter(thetas: FloatArray) -> FloatArray:
    """Kuramoto order parameter per sample; NaN rows propagate."""
    return np.abs(np.exp(1j * thetas).mean(axis=1))


def classify_synchrony(window, angle_tol: float = np.pi / 4) -> str:
    """Label one window of phase data.

    ``window`` is either a 1-d array of pairwise phase differences (two-unit
    case) or an (m, n) array of per-unit phases; NaN entries are ignored.

    Two units: median |phi| < angle_tol -> inphase; median |wrap(phi - pi)|
    < angle_tol -> antiphase; else mixed.  Three units: median order
    parameter R > 0.9 -> inphase; R < 0.2 with every pairwise difference
    within pi/6 of +-2pi/3 -> splay; else mixed.  More units: R > 0.9 ->
    inphase, else mixed.
    """
    w = np.asarray(window, dtype=float)
    if w.ndim == 1:
        phi = w[np.isfinite(w)]
        if phi.size == 0:
            return MIXED
        if np.median(np.abs(wrap_phase(phi))) < angle_tol:
            return INPHASE
        if np.median(np.abs(wrap_phase(phi - np.pi))) < angle_tol:
            return ANTIPHASE
        return MIXED
    if w.ndim != 2:
        raise ValueError("window must be 1-d (phase differences) or 2-d (phases)")
    n = w.shape[1]
    if n < 2:
        raise ValueError("synchrony labels need at least two units")
    valid = np.all(np.isfinite(w), axis=1)
    w = w[valid]
    if w.shape[0] == 0:
        return MIXED
    if n == 2:
        return classify_synchrony(wrap_phase(w[:, 0] - w[:, 1]), angle_tol)
    R = float(np.median(_order_parameter(w)))
    if R > 0.9:
        return INPHASE
    if n == 3 and R < 0.2:
        for i in range(3):
            for j in range(i + 1, 3):
                d = np.median(np.abs(wrap_phase(w[:, i] - w[:, j])))
                if abs(d - 2 * np.pi / 3) > np.pi / 6:
                    return MIXED
        return SPLAY
    return MIXED


def _estimate_spike_period(seg: BurstSegment, params: ModelParams) -> float:
    r_bar = float(np.mean(seg.mean_radius))
    om = float(omega_of_r(r_bar, params))
    if om <= 0:
        raise ValueError("non-positive spiking frequency; cannot size windows")
    return 2.0 * np.pi / om


def _runs(labels: list[str]) -> list[tuple[str, int, int]]:
    """(label, first, last) for maximal constant runs."""
    out = []
    s = 0
    for i in range(1, len(labels) + 1):
        if i == len(labels) or labels[i] != labels[s]:
            out.append((labels[s], s, i - 1))
            s = i
    return out


def detect_transitions(traj: Trajectory, params: ModelParams | None = None,
                       r_hi: float = 0.8, r_lo: float = 0.3,
                       window_periods: float = 5.0, stride_periods: float = 1.0,
                       persist_windows: float = 2.0, phase_floor: float = 0.1,
                       transient_frac: float = 0.2,
                       angle_tol: float = np.pi / 4) -> SynchronyReport:
    """Per-burst sliding-window synchrony labels and transition events.

    The leading ``transient_frac`` of the record is discarded (bursts must
    start after it).  Window length is ``window_periods`` spike periods,
    estimated from the amplitude-dependent frequency at the burst's mean
    radius; windows slide by ``stride_periods`` periods.  A label is
    established once it holds for ``persist_windows`` window-lengths, and a
    TransitionEvent is emitted between consecutive established synchronized
    labels, stamped at the center of the first window of the new label.
    """
    if params is None:
        params = traj.meta.get("params")
        if params is None:
            raise ValueError("model parameters required (pass params= or set traj.meta)")
    n = traj.n
    if n < 2:
        raise ValueError("synchrony analysis needs at least two units")
    segs = segment_bursts(traj, r_hi=r_hi, r_lo=r_lo)
    t_min = traj.times[0] + transient_frac * (traj.times[-1] - traj.times[0])
    segs = [s for s in segs if traj.times[s.start] >= t_min]
    if not segs:
        raise NoBurstsError("no complete burst after transient discard")

    dt = traj.times[1] - traj.times[0]
    z = traj.z
    radii = np.abs(z)
    thetas = np.where(radii > phase_floor, np.angle(z), np.nan)
    u_mean = traj.u_mean()

    report = SynchronyReport()
    for b_idx, seg in enumerate(segs):
        period = _estimate_spike_period(seg, params)
        wlen = max(3, int(round(window_periods * period / dt)))
        stride = max(1, int(round(stride_periods * period / dt)))
        starts = list(range(seg.start, seg.end - wlen + 1, stride))
        labels = [classify_synchrony(thetas[s:s + wlen], angle_tol) for s in starts]
        wtimes = traj.times[np.asarray(starts, dtype=int)] if starts else np.empty(0)

        persist_evals = max(1, math.ceil(persist_windows * wlen / stride))
        events: list[TransitionEvent] = []
        prev = None  # last established synchronized label and its burst
        for lab, first, last in _runs(labels):
            if last - first + 1 < persist_evals or lab not in SYNC_LABELS:
                continue
            if prev is not None and lab != prev:
                c = starts[first] + wlen // 2
                events.append(TransitionEvent(t=float(traj.times[c]),
                                              u_mean=float(u_mean[c]),
                                              from_label=prev, to_label=lab,
                                              burst_index=b_idx))
            prev = lab

        d_summary = {}
        for i in range(n):
            for j in range(i + 1, n):
                d = pairwise_distance(traj, i, j)[seg.start:seg.end]
                d_summary[(i, j)] = {"mean": float(d.mean()), "max": float(d.max())}
        report.bursts.append(BurstAnalysis(segment=seg, window_times=wtimes,
                                           labels=labels, events=events,
                                           d_summary=d_summary))
    return report


def slow_passage_offset(report: SynchronyReport, u_predicted: float,
                        from_label: str = INPHASE, to_label: str = ANTIPHASE) -> float:
    """Mean over bursts of (u at the matching transition) - u_predicted.

    Negative values mean the transition happened at a more negative slow
    variable than the frozen-u prediction (slow-passage delay)."""
    us = [e.u_mean for e in report.events
          if e.from_label == from_label and e.to_label == to_label]
    if not us:
        raise NoBurstsError(f"no {from_label}->{to_label} transition in report")
    return float(np.mean(us) - u_predicted)


def spike_peaks(traj: Trajectory, unit: int = 0, height: float = 0.5):
    """Indices of spike maxima of x_unit(t) exceeding ``height``."""
    idx, _ = find_peaks(traj.x[:, unit], height=height)
    return idx
