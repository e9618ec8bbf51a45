"""Adaptive Dormand-Prince 5(4) integration of GLV systems."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numba
import numpy as np

from ..glv.system import GlvSystem

# status codes returned by the kernel
OK, STEP_UNDERFLOW, NONFINITE, UNBOUNDED, MAX_STEPS = 0, 1, 2, 3, 4
STATUS = {OK: "ok", STEP_UNDERFLOW: "step_underflow", NONFINITE: "nonfinite", UNBOUNDED: "unbounded", MAX_STEPS: "max_steps"}


class IntegrationError(RuntimeError):
    def __init__(self, message: str, trajectory: "Trajectory | None" = None):
        super().__init__(message)
        self.trajectory = trajectory


@dataclass(eq=False)
class Trajectory:
    t: np.ndarray
    x: np.ndarray  # shape (samples, n)
    steps: int = 0
    rejected: int = 0
    max_error: float = 0.0  # largest accepted scaled error estimate (<= 1)
    status: str = "ok"
    meta: dict = field(default_factory=dict)
    log_x: np.ndarray | None = None  # natural log of the state, for log-coordinate runs

    @property
    def n(self) -> int:
        return self.x.shape[1]

    def __len__(self) -> int:
        return self.t.size

    @property
    def final(self) -> np.ndarray:
        return self.x[-1]

    def concat(self, other: "Trajectory") -> "Trajectory":
        """Append a continuation that starts at this trajectory's last sample."""
        return Trajectory(
            np.concatenate([self.t, other.t[1:]]),
            np.concatenate([self.x, other.x[1:]]),
            self.steps + other.steps,
            self.rejected + other.rejected,
            max(self.max_error, other.max_error),
            other.status,
            {**self.meta, **other.meta},
            None if self.log_x is None or other.log_x is None else np.concatenate([self.log_x, other.log_x[1:]]),
        )

    @classmethod
    def empty(cls, n: int) -> "Trajectory":
        return cls(np.empty(0), np.empty((0, n)))


_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.zeros((7, 7))
_A[1, 0] = 1 / 5
_A[2, :2] = [3 / 40, 9 / 40]
_A[3, :3] = [44 / 45, -56 / 15, 32 / 9]
_A[4, :4] = [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]
_A[5, :5] = [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]
_A[6, :6] = [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]
# fifth-order weights minus embedded fourth-order weights
_E = np.array([71 / 57600, 0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])


@numba.njit(cache=True)
def _f(r, a, x, out, logspace):
    n = x.size
    for i in range(n):
        s = r[i]
        if logspace:
            # x holds ln of the state; growth rates are the log-derivatives
            for j in range(n):
                s += a[i, j] * np.exp(x[j])
            out[i] = s
        else:
            for j in range(n):
                s += a[i, j] * x[j]
            out[i] = x[i] * s


@numba.njit(cache=True)
def _dopri(r, a, x0, t0, t_end, rtol, atol, h0, max_step, max_steps, bound, A, E, logspace):
    n = x0.size
    cap = 1024
    ts = np.empty(cap)
    xs = np.empty((cap, n))
    ts[0] = t0
    xs[0] = x0
    cnt = 1
    k = np.empty((7, n))
    y = x0.copy()
    ynew = np.empty(n)
    tmp = np.empty(n)
    t = t0
    _f(r, a, y, k[0], logspace)
    # initial step from the usual derivative-scale heuristic
    h = h0
    if h <= 0.0:
        d0 = 0.0
        d1 = 0.0
        for i in range(n):
            if y[i] == -np.inf:
                continue
            sc = atol + rtol * abs(y[i])
            d0 = max(d0, abs(y[i]) / sc)
            d1 = max(d1, abs(k[0, i]) / sc)
        h = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h = min(h, max_step, t_end - t0)
    steps = 0
    rejected = 0
    max_err = 0.0
    status = 0
    while t < t_end:
        if steps + rejected >= max_steps:
            status = 4
            break
        if t + h > t_end:
            h = t_end - t
        if h < 1e-14 * max(1.0, abs(t)):
            status = 1
            break
        for s in range(1, 7):
            for i in range(n):
                acc = y[i]
                for q in range(s):
                    acc += h * A[s, q] * k[q, i]
                tmp[i] = acc
            _f(r, a, tmp, k[s], logspace)
        # stage 7 input is the 5th-order solution
        for i in range(n):
            ynew[i] = tmp[i]
        err = 0.0
        finite = True
        for i in range(n):
            e = 0.0
            for q in range(7):
                e += E[q] * k[q, i]
            e *= h
            if np.isnan(ynew[i]) or ynew[i] == np.inf or (not logspace and ynew[i] == -np.inf):
                finite = False
                continue
            if ynew[i] == -np.inf:
                # a coordinate that is exactly zero stays zero
                continue
            sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
            v = abs(e) / sc
            if v > err:
                err = v
        if not finite:
            status = 2
            break
        if err <= 1.0:
            t += h
            steps += 1
            if err > max_err:
                max_err = err
            for i in range(n):
                y[i] = ynew[i]
                k[0, i] = k[6, i]
            if cnt == ts.size:
                ts2 = np.empty(2 * cnt)
                xs2 = np.empty((2 * cnt, n))
                ts2[:cnt] = ts
                xs2[:cnt] = xs
                ts = ts2
                xs = xs2
            ts[cnt] = t
            xs[cnt] = y
            cnt += 1
            if bound > 0.0:
                big = 0.0
                for i in range(n):
                    big = max(big, np.exp(y[i]) if logspace else abs(y[i]))
                if big > bound:
                    status = 3
                    break
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            rejected += 1
            fac = max(0.2, 0.9 * err ** -0.2)
        h = min(h * fac, max_step)
    return ts[:cnt].copy(), xs[:cnt].copy(), steps, rejected, max_err, status


def integrate(
    sys: GlvSystem,
    x0,
    t_end: float,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    *,
    t0: float = 0.0,
    max_step: float = 0.5,
    first_step: float = 0.0,
    max_steps: int = 50_000_000,
    bound: float | None = None,
    log_coordinates: bool = False,
) -> Trajectory:
    """Integrate from ``x0`` at ``t0`` to ``t_end``, keeping every accepted step.

    ``max_step`` caps the spacing between samples so neighbourhood crossings
    are resolved. ``bound`` stops the run with status ``unbounded`` when the
    max-norm of the state exceeds it.

    With ``log_coordinates`` the kernel integrates ``ln x`` instead; the
    tolerances then bound the *relative* error of every coordinate and
    coordinates far below the double-precision floor keep evolving instead
    of underflowing to zero. Long runs near a cycle need this.
    """
    x0 = np.array(x0, dtype=float)
    if x0.shape != (sys.n,):
        raise ValueError(f"x0 must have {sys.n} entries")
    if np.any(x0 < 0) or not np.all(np.isfinite(x0)):
        raise ValueError("x0 must lie in the nonnegative orthant")
    if not (rtol > 0 and atol > 0 and max_step > 0):
        raise ValueError("rtol, atol and max_step must be positive")
    if t_end < t0:
        raise ValueError("t_end must be >= t0")
    if log_coordinates:
        with np.errstate(divide="ignore"):
            y0 = np.log(x0)
    else:
        y0 = x0
    return _run(sys, y0, t0, t_end, rtol, atol, max_step, first_step, max_steps, bound, log_coordinates)


def _run(sys, y0, t0, t_end, rtol, atol, max_step, first_step, max_steps, bound, logspace) -> Trajectory:
    meta = {"rtol": rtol, "atol": atol, "log_coordinates": bool(logspace)}
    if t_end == t0:
        ts, ys, steps, rej, err, code = np.array([t0]), y0[None, :].copy(), 0, 0, 0.0, OK
    else:
        ts, ys, steps, rej, err, code = _dopri(
            np.ascontiguousarray(sys.r), np.ascontiguousarray(sys.a), np.array(y0, dtype=float),
            float(t0), float(t_end), float(rtol), float(atol), float(first_step), float(max_step),
            int(max_steps), float(bound or 0.0), _A, _E, bool(logspace),
        )
    if logspace:
        traj = Trajectory(ts, np.exp(ys), steps, rej, err, STATUS[code], meta, ys)
    else:
        traj = Trajectory(ts, ys, steps, rej, err, STATUS[code], meta)
    if code == STEP_UNDERFLOW:
        raise IntegrationError(f"step size underflow at t={ts[-1]:.6g}: problem looks stiff", traj)
    if code == NONFINITE:
        raise IntegrationError(f"non-finite state after t={ts[-1]:.6g}: solution blew up", traj)
    return traj


def resume(sys: GlvSystem, traj: Trajectory, t_end: float, max_step: float = 0.5, bound: float | None = None) -> Trajectory:
    """Continue ``traj`` to ``t_end`` with its own tolerances and coordinates; returns the joined run."""
    logspace = traj.log_x is not None
    y0 = traj.log_x[-1] if logspace else traj.x[-1]
    more = _run(
        sys, y0, float(traj.t[-1]), t_end, traj.meta["rtol"], traj.meta["atol"],
        max_step, 0.0, 50_000_000, bound, logspace,
    )
    return traj.concat(more)


def export_csv(traj: Trajectory, path: str | Path, n: int | None = None) -> Path:
    """Write ``t,x1..xn`` rows at 17 significant digits."""
    path = Path(path)
    n = traj.x.shape[1] if traj.x.ndim == 2 and traj.x.shape[1] else (n or 0)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t"] + [f"x{i + 1}" for i in range(n)])
        for t, x in zip(traj.t, traj.x):
            w.writerow([f"{t:.17g}"] + [f"{v:.17g}" for v in x])
    return path


def read_csv(path: str | Path) -> Trajectory:
    with open(path) as fh:
        n = len(fh.readline().strip().split(",")) - 1
        if not fh.readline().strip():
            return Trajectory.empty(n)
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return Trajectory(data[:, 0], data[:, 1:])
