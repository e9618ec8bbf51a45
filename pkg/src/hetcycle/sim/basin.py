"""Monte Carlo estimate of how many nearby starts are attracted to a cycle."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np

from ..glv.cycles import GlvCycle
from .events import VisitEvent, detect_visits
from .integrate import Trajectory, integrate, resume


def connection_point(cycle: GlvCycle, j: int, eps: float = 1e-6, t_end: float = 200.0) -> np.ndarray:
    """A point on the connection leaving geometric node ``j``, midway between its ends.

    Starts on the unstable direction inside the connection's invariant
    subspace and keeps the sample whose distances to both ends are closest.
    """
    g = len(cycle.geometry)
    geo = cycle.geometry[j % g]
    p = cycle.equilibria[j % g].coordinates
    q = cycle.equilibria[(j + 1) % g].coordinates
    x0 = p.copy()
    x0[geo.expanding] += eps
    tr = integrate(cycle.system, x0, t_end)
    d1 = np.max(np.abs(tr.x - p), axis=1)
    d2 = np.max(np.abs(tr.x - q), axis=1)
    return tr.x[int(np.argmin(np.abs(d1 - d2)))].copy()


def box_start(point: np.ndarray, delta: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from the ``delta`` max-norm box around ``point``, clipped to the orthant."""
    lo = np.maximum(point - delta, 0.0)
    return rng.uniform(lo, point + delta)


@dataclass(frozen=True)
class SampleOutcome:
    index: int
    x0: tuple[float, ...]
    converged: bool
    loops: int
    closeness: tuple[float, ...]  # per completed loop: largest of the per-visit minimum distances
    reason: str
    t_final: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "converged": self.converged,
            "loops": self.loops,
            "closeness": list(self.closeness),
            "reason": self.reason,
            "t_final": self.t_final,
        }


@dataclass(frozen=True)
class BasinResult:
    delta: float
    seed: int
    point: tuple[float, ...]
    outcomes: tuple[SampleOutcome, ...]

    @property
    def fraction(self) -> float:
        return sum(o.converged for o in self.outcomes) / len(self.outcomes)

    def to_dict(self) -> dict[str, Any]:
        return {
            "delta": self.delta,
            "seed": self.seed,
            "point": list(self.point),
            "samples": len(self.outcomes),
            "fraction": self.fraction,
            "outcomes": [o.to_dict() for o in self.outcomes],
        }


def loop_closeness(events: list[VisitEvent], period: int) -> list[float]:
    done = [e for e in events if e.complete]
    return [max(e.min_distance for e in done[k * period:(k + 1) * period]) for k in range(len(done) // period)]


def ordered_tail(labels: list[str], order: list[str]) -> int:
    """Index where the final stretch of visits that walks ``order`` cyclically begins."""
    start = 0
    m = len(order)
    for i in range(1, len(labels)):
        if order.index(labels[i]) != (order.index(labels[i - 1]) + 1) % m:
            start = i
    return start


def follow(
    cycle: GlvCycle,
    x0: np.ndarray,
    delta: float,
    loops: int = 5,
    h: float = 0.1,
    t_max: float = 20000.0,
    chunk: float = 250.0,
    transit_limit: float = 200.0,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> tuple[bool, int, list[float], str, Trajectory]:
    """Integrate in log coordinates until convergence is established or ruled out.

    Early passes may miss an ``h``-ball (a weakly contracting direction leaves
    the orbit wide of an equilibrium), so breaks in the visit order are
    tolerated within the first loop's worth of visits.
    """
    labels = cycle.labels
    period = len(labels)
    traj = integrate(cycle.system, x0, chunk, rtol, atol, log_coordinates=True)
    while True:
        events = detect_visits(traj, cycle.equilibria, h)
        start = ordered_tail([e.label for e in events], labels)
        if start > period:
            closeness = loop_closeness(events[start:], period)
            return False, len(closeness), closeness, "left cycle order", traj
        events = events[start:]
        closeness = loop_closeness(events, period)
        t_now = float(traj.t[-1])
        if len(closeness) >= loops:
            if closeness[-1] < delta / 10 and closeness[-1] < closeness[0]:
                return True, len(closeness), closeness, "converged", traj
            return False, len(closeness), closeness, "not approaching", traj
        last_out = events[-1].exit if events else float(traj.t[0])
        inside = bool(events) and not events[-1].complete
        if not inside and t_now - last_out > transit_limit:
            return False, len(closeness), closeness, "escaped", traj
        if traj.status != "ok":
            return False, len(closeness), closeness, traj.status, traj
        if t_now >= t_max:
            return False, len(closeness), closeness, "timeout", traj
        step = min(max(chunk, t_now), t_max - t_now)
        traj = resume(cycle.system, traj, t_now + step)


def _run_sample(args: tuple) -> SampleOutcome:
    cycle, point, delta, seq, index, kw = args
    rng = np.random.default_rng(seq)
    x0 = box_start(point, delta, rng)
    ok, nloops, close, reason, traj = follow(cycle, x0, delta, **kw)
    return SampleOutcome(index, tuple(float(v) for v in x0), ok, nloops, tuple(close), reason, float(traj.t[-1]))


def basin_sample(
    cycle: GlvCycle,
    n_samples: int,
    seed: int,
    delta: float = 1e-3,
    connection: int = 0,
    workers: int | None = None,
    **kw: Any,
) -> BasinResult:
    """Fraction of starts in a ``delta`` box around a connection point that converge.

    A start converges when its visits follow the cycle order for at least
    ``loops`` full loops and the last loop stays within ``delta / 10`` of
    every equilibrium it passes. Each sample has its own generator spawned
    from ``seed``, so results do not depend on ``workers``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    point = connection_point(cycle, connection)
    seqs = np.random.SeedSequence(seed).spawn(n_samples)
    jobs = [(cycle, point, delta, s, i, kw) for i, s in enumerate(seqs)]
    if workers and workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            outcomes = list(ex.map(_run_sample, jobs))
    else:
        outcomes = [_run_sample(j) for j in jobs]
    outcomes.sort(key=lambda o: o.index)
    return BasinResult(delta, seed, tuple(float(v) for v in point), tuple(outcomes))
