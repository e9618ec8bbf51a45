"""Passages of a trajectory through equilibrium neighbourhoods."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .integrate import Trajectory


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class VisitEvent:
    label: str
    entry: float
    exit: float
    min_distance: float
    complete: bool = True  # False when the visit is cut by either end of the trajectory

    @property
    def dwell(self) -> float:
        return self.exit - self.entry

    def to_dict(self) -> dict:
        return {"equilibrium": self.label, "t_in": self.entry, "t_out": self.exit, "min_dist": self.min_distance}


def _as_points(equilibria) -> tuple[list[str], np.ndarray]:
    labels, pts = [], []
    for k, e in enumerate(equilibria):
        if hasattr(e, "coordinates"):
            labels.append(e.label)
            pts.append(e.coordinates)
        else:
            lab, p = e
            labels.append(str(lab))
            pts.append(p)
    return labels, np.atleast_2d(np.array(pts, dtype=float))


def _crossing(t0: float, t1: float, d0: float, d1: float, h: float) -> float:
    if d1 == d0:
        return t1
    return t0 + (h - d0) / (d1 - d0) * (t1 - t0)


def detect_visits(traj: Trajectory, equilibria: Sequence, h: float) -> list[VisitEvent]:
    """One event per maximal interval with max-norm distance below ``h``.

    ``equilibria`` holds :class:`EquilibriumInfo` objects or ``(label, point)``
    pairs. Crossing times are interpolated linearly between samples.
    """
    labels, pts = _as_points(equilibria)
    if h <= 0:
        raise ValueError("h must be positive")
    if len(pts) > 1:
        gaps = [np.max(np.abs(p - q)) for i, p in enumerate(pts) for q in pts[i + 1:]]
        if h >= 0.5 * min(gaps):
            raise ValueError(f"h={h} must be below half the smallest equilibrium spacing {min(gaps):.6g}")
    events: list[VisitEvent] = []
    if len(traj) == 0:
        return events
    t = traj.t
    for lab, p in zip(labels, pts):
        d = np.max(np.abs(traj.x - p), axis=1)
        inside = d < h
        if not inside.any():
            continue
        edges = np.diff(inside.astype(np.int8))
        starts = list(np.flatnonzero(edges == 1) + 1)
        stops = list(np.flatnonzero(edges == -1) + 1)  # first index outside
        if inside[0]:
            starts.insert(0, 0)
        if inside[-1]:
            stops.append(len(t))
        for s, e in zip(starts, stops):
            t_in = t[0] if s == 0 else _crossing(t[s - 1], t[s], d[s - 1], d[s], h)
            t_out = t[-1] if e == len(t) else _crossing(t[e - 1], t[e], d[e - 1], d[e], h)
            complete = s > 0 and e < len(t)
            events.append(VisitEvent(lab, float(t_in), float(t_out), float(d[s:e].min()), complete))
    events.sort(key=lambda ev: ev.entry)
    return events


def visit_sequence(events: Sequence[VisitEvent]) -> list[str]:
    return [e.label for e in events]


def follows_cycle(labels: Sequence[str], order: Sequence[str]) -> bool:
    """True when ``labels`` walks ``order`` cyclically, starting anywhere."""
    if not labels:
        return False
    try:
        k = list(order).index(labels[0])
    except ValueError:
        return False
    m = len(order)
    return all(lab == order[(k + i) % m] for i, lab in enumerate(labels))


@dataclass(frozen=True)
class ContractionEstimate:
    ratio: float
    slopes: tuple[float, ...]  # per position within a loop
    residuals: tuple[float, ...]  # rms residual of each fit
    loops: int
    series: tuple[tuple[float, ...], ...]  # dwell times per position, by loop


def contraction_estimate(events: Sequence[VisitEvent], period: int | None = None, skip: int = 0) -> ContractionEstimate:
    """Geometric growth rate of dwell times per loop.

    Complete events are grouped by position ``k mod period`` (``period``
    defaults to the number of distinct labels). For each position the slope
    of ``ln(dwell)`` against loop index is fitted by least squares; the
    ratio is ``exp`` of the mean slope. ``skip`` drops leading loops.
    """
    ev = [e for e in events if e.complete]
    if period is None:
        period = len({e.label for e in ev}) or 1
    loops = len(ev) // period - skip
    if loops < 3:
        raise InsufficientDataError(f"need at least 3 complete loops, have {max(loops, 0)}")
    ev = ev[skip * period:(skip + loops) * period]
    slopes, resid, series = [], [], []
    idx = np.arange(loops, dtype=float)
    for pos in range(period):
        dw = np.array([ev[k * period + pos].dwell for k in range(loops)])
        if np.any(dw <= 0):
            raise InsufficientDataError("non-positive dwell time")
        y = np.log(dw)
        coef = np.polyfit(idx, y, 1)
        slopes.append(float(coef[0]))
        resid.append(float(np.sqrt(np.mean((np.polyval(coef, idx) - y) ** 2))))
        series.append(tuple(float(v) for v in dw))
    return ContractionEstimate(float(np.exp(np.mean(slopes))), tuple(slopes), tuple(resid), loops, tuple(series))


def write_event_log(events: Sequence[VisitEvent], path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps([e.to_dict() for e in events], indent=2) + "\n")
    return path


def read_event_log(path: str | Path) -> list[VisitEvent]:
    return [
        VisitEvent(d["equilibrium"], d["t_in"], d["t_out"], d["min_dist"])
        for d in json.loads(Path(path).read_text())
    ]


__all__ = [
    "InsufficientDataError",
    "VisitEvent",
    "ContractionEstimate",
    "detect_visits",
    "visit_sequence",
    "follows_cycle",
    "contraction_estimate",
    "write_event_log",
    "read_event_log",
]
