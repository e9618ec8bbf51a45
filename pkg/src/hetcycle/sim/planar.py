"""Where a trajectory of a two-species subsystem ends up."""

from __future__ import annotations

import numpy as np

from ..glv.system import GlvSystem
from .integrate import Trajectory, integrate


def final_attractor(sys: GlvSystem, traj: Trajectory, i: int, j: int, tol: float = 1e-3) -> str:
    """Label of the equilibrium of the ``(x_i, x_j)`` plane the run settled at.

    Returns ``xi<i>``, ``xi<j>``, ``xi*(i,j)``, ``infinity`` for runs stopped
    by the size bound, or ``undecided``.
    """
    if traj.status == "unbounded":
        return "infinity"
    x = traj.final
    s = sys.scales
    cand = {
        f"xi{i + 1}": np.eye(sys.n)[i] * s[i],
        f"xi{j + 1}": np.eye(sys.n)[j] * s[j],
    }
    S = [i, j]
    try:
        xs = np.linalg.solve(sys.a[np.ix_(S, S)], -sys.r[S])
        if np.all(xs > 0):
            p = np.zeros(sys.n)
            p[S] = xs
            cand[f"xi*({min(i, j) + 1},{max(i, j) + 1})"] = p
    except np.linalg.LinAlgError:
        pass
    for label, p in cand.items():
        if np.max(np.abs(x - p)) < tol:
            return label
    return "undecided"


def planar_run(sys: GlvSystem, i: int, j: int, x0, t_end: float = 200.0, bound: float = 1e6) -> tuple[str, Trajectory]:
    traj = integrate(sys, x0, t_end, bound=bound)
    return final_attractor(sys, traj, i, j), traj
