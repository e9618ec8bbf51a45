"""Sufficient conditions for heteroclinic connections in planar and 3-species GLV subsystems.

All checks work in normal form: axis equilibria rescaled to 1, so that on a
triple ``(i, j, k)`` the subsystem reads

    y_i' = r_i y_i (1 - y_i + b1 y_j + g1 y_k)
    y_j' = r_j y_j (1 - y_j + b2 y_k + g2 y_i)
    y_k' = r_k y_k (1 - y_k + b3 y_i + g3 y_j)

i.e. ``b1 = k_ij, g1 = k_ik, g2 = k_ji, b2 = k_jk, b3 = k_ki, g3 = k_kj`` with
``k_pq`` from :meth:`GlvSystem.normal_coef` (equal to ``a_pq`` under unit rates
and ``a_ii = -1``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .system import GlvSystem

DEGENERATE_TOL = 1e-12


class NoBoxError(ValueError):
    pass


@dataclass(frozen=True)
class Inequality:
    """``value > 0`` (sense '>') or ``value < 0`` (sense '<')."""

    label: str
    value: float
    sense: str = ">"

    @property
    def holds(self) -> bool:
        return self.value > 0 if self.sense == ">" else self.value < 0

    @property
    def near_boundary(self) -> bool:
        return abs(self.value) <= DEGENERATE_TOL

    def to_dict(self) -> dict[str, Any]:
        return {"label": self.label, "value": self.value, "sense": self.sense, "holds": self.holds}


@dataclass(frozen=True)
class ConnectionReport:
    kind: str
    indices: tuple[int, ...]
    inequalities: tuple[Inequality, ...]
    connections: tuple[tuple[str, str], ...] = ()
    attractor: str | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def satisfied(self) -> bool:
        return all(q.holds for q in self.inequalities)

    @property
    def degenerate(self) -> bool:
        return any(q.near_boundary for q in self.inequalities)

    @property
    def failed(self) -> tuple[Inequality, ...]:
        return tuple(q for q in self.inequalities if not q.holds)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "indices": [i + 1 for i in self.indices],
            "satisfied": self.satisfied,
            "degenerate": self.degenerate,
            "inequalities": [q.to_dict() for q in self.inequalities],
            "failed": [q.label for q in self.failed],
            "connections": [list(c) for c in self.connections],
            "attractor": self.attractor,
            "notes": list(self.notes),
        }


def _ax(i: int) -> str:
    return f"xi{i + 1}"


def _plane(i: int, j: int) -> str:
    return f"xi*({min(i, j) + 1},{max(i, j) + 1})"


def _distinct(idx: Sequence[int], n: int) -> None:
    if len(set(idx)) != len(idx) or any(not 0 <= i < n for i in idx):
        raise ValueError(f"indices must be distinct and in range: {[i + 1 for i in idx]}")


def roles(sys: GlvSystem, triple: Sequence[int]) -> dict[str, float]:
    """Normal-form couplings ``b1, g1, g2, b2, b3, g3`` for an ordered triple."""
    i, j, k = triple
    _distinct(triple, sys.n)
    c = sys.normal_coef
    return {"b1": c(i, j), "g1": c(i, k), "g2": c(j, i), "b2": c(j, k), "b3": c(k, i), "g3": c(k, j)}


def planar_case(b1: float, g2: float) -> str:
    """Phase-portrait case a..e of the planar subsystem, or '?' on a boundary."""
    p, q = 1 + b1, 1 + g2
    if p < 0 and q > 0:
        return "a"
    if p > 0 and q < 0:
        return "b"
    if p > 0 and q > 0:
        if b1 * g2 < 1:
            return "c"
        if b1 * g2 > 1:
            return "d"
    if p < 0 and q < 0:
        return "e"
    return "?"


def check_connection_2d(sys: GlvSystem, i: int, j: int) -> ConnectionReport:
    """Classify the ``(x_i, x_j)`` plane; axis equilibria are always ``xi_i``, ``xi_j``."""
    _distinct((i, j), sys.n)
    if not (sys.r[i] > 0 and sys.r[j] > 0):
        raise ValueError("growth rates must be positive")
    b1, g2 = sys.normal_coef(i, j), sys.normal_coef(j, i)
    case = planar_case(b1, g2)
    p = Inequality("1+b1", 1 + b1, "<" if case in "ae" else ">")
    q = Inequality("1+g2", 1 + g2, "<" if case in "be" else ">")
    ineq = [p, q]
    if case in "cd?":
        ineq.append(Inequality("1-b1*g2", 1 - b1 * g2, "<" if case == "d" else ">"))
    xi, xj, star = _ax(i), _ax(j), _plane(i, j)
    conn, attr = {
        "a": (((xi, xj),), xj),
        "b": (((xj, xi),), xi),
        "c": (((xi, star), (xj, star)), star),
        "d": ((), "infinity"),
        "e": (((star, xi), (star, xj)), f"{xi}|{xj}"),
        "?": ((), None),
    }[case]
    kind = f"tlv2-case-{case}" if case != "?" else "tlv2-degenerate"
    return ConnectionReport(kind, (i, j), tuple(ineq), conn, attr)


def _tlv30_inequalities(c: dict[str, float]) -> list[Inequality]:
    b1, g1, g2, b2, b3, g3 = (c[k] for k in ("b1", "g1", "g2", "b2", "b3", "g3"))
    return [
        Inequality("1+b1", 1 + b1, ">"),
        Inequality("b1", b1, "<"),
        Inequality("1+g1", 1 + g1, "<"),
        Inequality("1+b2", 1 + b2, ">"),
        Inequality("1+g2", 1 + g2, ">"),
        Inequality("1+b3", 1 + b3, ">"),
        Inequality("1+g3", 1 + g3, ">"),
        Inequality("1-b2*g3", 1 - b2 * g3, ">"),
        Inequality("1-b1*g2", 1 - b1 * g2, ">"),
        Inequality("1-b2*g3+b1(1+b2)+g1(1+g3)", 1 - b2 * g3 + b1 * (1 + b2) + g1 * (1 + g3), "<"),
        Inequality("1-b1*g2+b3(1+b1)+g3(1+g2)", 1 - b1 * g2 + b3 * (1 + b1) + g3 * (1 + g2), ">"),
    ]


def check_tlv30(sys: GlvSystem, triple: Sequence[int]) -> ConnectionReport:
    """Two planar equilibria; the one in the ``(j, k)`` plane attracts everything.

    The range ``-1 < b1 < 0`` counts as one condition split into two entries,
    so the ten conditions appear as eleven inequalities.
    """
    c = roles(sys, triple)
    i, j, k = triple
    s1, s2 = _plane(i, j), _plane(j, k)
    conn = (
        (_ax(i), _ax(k)), (_ax(i), s1), (_ax(j), s1), (_ax(j), s2), (_ax(k), s2), (s1, s2),
    )
    return ConnectionReport("tlv30", tuple(triple), tuple(_tlv30_inequalities(c)), conn, s2)


def _tlv3_inequalities(c: dict[str, float]) -> list[Inequality]:
    b1, g1, g2, b2, b3, g3 = (c[k] for k in ("b1", "g1", "g2", "b2", "b3", "g3"))
    return [
        Inequality("1+b1", 1 + b1, ">"),
        Inequality("1+g1", 1 + g1, "<"),
        Inequality("1+b2", 1 + b2, "<"),
        Inequality("1+g2", 1 + g2, ">"),
        Inequality("1+b3", 1 + b3, ">"),
        Inequality("1+g3", 1 + g3, ">"),
        Inequality("1-b1*g2", 1 - b1 * g2, ">"),
        Inequality("1-b1*g2+b3(1+b1)+g3(1+g2)", 1 - b1 * g2 + b3 * (1 + b1) + g3 * (1 + g2), ">"),
    ]


def check_tlv3(sys: GlvSystem, triple: Sequence[int]) -> ConnectionReport:
    """One planar equilibrium in the ``(i, j)`` plane feeding the axis equilibrium ``xi_k``."""
    c = roles(sys, triple)
    i, j, k = triple
    s = _plane(i, j)
    conn = ((_ax(i), s), (_ax(i), _ax(k)), (_ax(j), s), (_ax(j), _ax(k)), (s, _ax(k)))
    return ConnectionReport("tlv3", tuple(triple), tuple(_tlv3_inequalities(c)), conn, _ax(k))


@dataclass(frozen=True)
class Interior3D:
    """Solution of ``(I - B) y = 1`` for the normal-form triple, with Cramer numerators."""

    triple: tuple[int, ...]
    numerators: tuple[float, float, float]
    determinant: float
    degenerate: bool
    point: np.ndarray | None  # original coordinates, only when all positive

    @property
    def exists(self) -> bool:
        return self.point is not None


def interior_equilibrium_3d(sys: GlvSystem, triple: Sequence[int]) -> Interior3D:
    c = roles(sys, triple)
    b1, g1, g2, b2, b3, g3 = (c[k] for k in ("b1", "g1", "g2", "b2", "b3", "g3"))
    A = np.array([[1.0, -b1, -g1], [-g2, 1.0, -b2], [-b3, -g3, 1.0]])
    det = float(np.linalg.det(A))
    nums = []
    for col in range(3):
        Ak = A.copy()
        Ak[:, col] = 1.0
        nums.append(float(np.linalg.det(Ak)))
    degenerate = abs(det) <= DEGENERATE_TOL
    point = None
    if not degenerate:
        y = np.array(nums) / det
        if np.all(y > 0):
            point = np.zeros(sys.n)
            idx = list(triple)
            point[idx] = y * sys.scales[idx]
    return Interior3D(tuple(triple), tuple(nums), det, degenerate, point)


@dataclass(frozen=True)
class Box:
    """Forward-invariant box ``[0, hi_1] x [0, hi_2] x [0, hi_3]`` on a triple."""

    triple: tuple[int, ...]
    normal_bounds: tuple[float, float, float]
    bounds: tuple[float, float, float]
    case: str


def invariant_box(sys: GlvSystem, triple: Sequence[int], x1_hat: float = 1.1, margin: float = 0.1) -> Box:
    """Bounds whose outer faces the flow crosses inward.

    Needs ``b1, g1 <= 0`` so the first face works for any ``x1_hat >= 1``;
    the other two bounds depend on the signs of ``b2`` and ``g3`` and take
    ``margin`` on top of the minimal value so the inequalities are strict.
    """
    if x1_hat < 1:
        raise ValueError("x1_hat must be >= 1")
    c = roles(sys, triple)
    b1, g1, g2, b2, b3, g3 = (c[k] for k in ("b1", "g1", "g2", "b2", "b3", "g3"))
    if b1 > 0 or g1 > 0:
        raise NoBoxError(f"first face is not inward for b1={b1}, g1={g1}")
    s = lambda y: max(0.0, y)  # noqa: E731
    h1 = x1_hat
    if b2 <= 0 and g3 <= 0:
        case = "b2<=0,g3<=0"
        h2 = 1 + h1 * s(g2) + margin
        h3 = 1 + h1 * s(b3) + margin
    elif b2 <= 0 < g3:
        case = "b2<=0,g3>0"
        h2 = 1 + h1 * s(g2) + margin
        h3 = 1 + h1 * s(b3) + h2 * g3 + margin
    elif g3 <= 0 < b2:
        case = "b2>0,g3<=0"
        h3 = 1 + h1 * s(b3) + margin
        h2 = 1 + h1 * s(g2) + h3 * b2 + margin
    else:
        case = "b2>0,g3>0"
        if b2 * g3 >= 1:
            raise NoBoxError(f"b2*g3 = {b2 * g3} >= 1: trajectories can diverge in the (j,k) plane")
        q = 1 + h1 * s(b3) + h1 * s(g2) + margin
        h2 = q * (1 + b2) / (1 - b2 * g3)
        h3 = q * (1 + g3) / (1 - b2 * g3)
    normal = (float(h1), float(h2), float(h3))
    scale = sys.scales[list(triple)]
    return Box(tuple(triple), normal, tuple(float(v) for v in np.array(normal) * scale), case)


def verify_box(sys: GlvSystem, box: Box, n_points: int = 100, seed: int = 0) -> dict[str, Any]:
    """Sample each outer face and check the normal velocity is negative there."""
    rng = np.random.default_rng(seed)
    idx = list(box.triple)
    hi = np.array(box.bounds)
    worst = []
    for face in range(3):
        pts = rng.uniform(0, 1, size=(n_points, 3)) * hi
        pts[:, face] = hi[face]
        vmax = -np.inf
        for p in pts:
            x = np.zeros(sys.n)
            x[idx] = p
            vmax = max(vmax, float(sys.rhs(x)[idx[face]]))
        worst.append(vmax)
    return {"inward": all(v < 0 for v in worst), "max_normal_velocity": worst}
