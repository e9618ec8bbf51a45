"""Assemble GLV heteroclinic cycles into :class:`CycleSpec` objects."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from ..core import CycleSpec, NodeSpec, require_valid
from .connections import ConnectionReport, Inequality, check_connection_2d, check_tlv3, check_tlv30
from .system import EquilibriumInfo, GlvSystem, equilibrium_on_support


@dataclass(frozen=True)
class NodeGeometry:
    """Which axes play which role at one equilibrium of the cycle."""

    support: tuple[int, ...]
    expanding: int
    contracting: tuple[int, ...]
    transverse: tuple[int, ...]

    def shifted(self, k: int, n: int) -> "NodeGeometry":
        f = lambda ax: tuple((a + k) % n for a in ax)  # noqa: E731
        return NodeGeometry(f(self.support), (self.expanding + k) % n, f(self.contracting), f(self.transverse))


@dataclass(frozen=True, eq=False)
class GlvCycle:
    system: GlvSystem
    geometry: tuple[NodeGeometry, ...]
    equilibria: tuple[EquilibriumInfo, ...]
    spec: CycleSpec

    @property
    def labels(self) -> list[str]:
        return [eq.label for eq in self.equilibria]

    @property
    def points(self) -> np.ndarray:
        return np.array([eq.coordinates for eq in self.equilibria])

    @property
    def symmetry_order(self) -> int:
        """Geometric equilibria per node of the (symmetry-reduced) spec."""
        return len(self.geometry) // self.spec.m


def cycle_from_geometry(
    sys: GlvSystem, geometry: Sequence[NodeGeometry], reduced: int | None = None, labels: Sequence[str] | None = None
) -> GlvCycle:
    """Classify eigenvalues along the given geometry and derive slot permutations.

    With ``reduced = m`` only the first ``m`` nodes enter the spec; the
    permutation of the last one targets geometric node ``m``, which must be
    the symmetric image of node 0 with slots listed in the same order.
    """
    geometry = tuple(geometry)
    g = len(geometry)
    m = g if reduced is None else reduced
    if g % m:
        raise ValueError("reduced size must divide the number of equilibria")
    eqs = []
    for idx, geo in enumerate(geometry):
        eq = equilibrium_on_support(sys, geo.support, labels[idx] if labels else None)
        off = set(range(sys.n)) - set(geo.support)
        roles = set(geo.contracting) | set(geo.transverse) | {geo.expanding}
        if roles != off or len(geo.contracting) + len(geo.transverse) + 1 != len(off):
            raise ValueError(f"{eq.label}: roles must partition the off-support axes")
        eq.classes.update({geo.expanding: "expanding"})
        eq.classes.update({k: "contracting" for k in geo.contracting})
        eq.classes.update({k: "transverse" for k in geo.transverse})
        eq.classes.update({k: "radial" for k in geo.support})
        eqs.append(eq)

    nodes = []
    for j in range(m):
        geo, eq, nxt = geometry[j], eqs[j], geometry[(j + 1) % g]
        outgoing = list(geo.contracting) + list(geo.transverse)
        incoming = [nxt.expanding] + list(nxt.transverse)
        if sorted(outgoing) != sorted(incoming):
            raise ValueError(f"{eq.label}: outgoing axes {outgoing} do not match next incoming {incoming}")
        perm = [incoming.index(ax) for ax in outgoing]
        lam = eq.axis_eigenvalues
        nodes.append(
            NodeSpec(
                eq.label,
                lam[geo.expanding],
                [lam[k] for k in geo.contracting],
                [lam[k] for k in geo.transverse],
                eq.radial_abscissa,
                perm,
            )
        )
    spec = CycleSpec(tuple(nodes))
    require_valid(spec)
    return GlvCycle(sys, geometry, tuple(eqs), spec)


def circulant(first_row: Sequence[float]) -> np.ndarray:
    """``a_ij = row[(j - i) mod n]``: equivariant under the cyclic coordinate shift."""
    row = np.asarray(first_row, dtype=float)
    n = row.size
    return np.array([[row[(j - i) % n] for j in range(n)] for i in range(n)])


def homoclinic_glv(c1: float, c2: float, c3: float, c4: float) -> GlvCycle:
    """Five-species cycle of planar equilibria ``x*(j,j+1)`` related by the cyclic shift.

    ``a_{i,i+k} = c_k``. At ``x*(1,2)`` the expanding axis is 3, the
    transverse 4 and the contracting 5; the spec has a single node.
    """
    sys = GlvSystem(np.ones(5), circulant([-1.0, c1, c2, c3, c4]))
    base = NodeGeometry((0, 1), 2, (4,), (3,))
    geometry = [base.shifted(k, 5) for k in range(5)]
    return cycle_from_geometry(sys, geometry, reduced=1)


def example1() -> GlvCycle:
    return homoclinic_glv(-0.5, -2.0, -0.5, 0.5)


def example2_system() -> GlvSystem:
    a = np.full((5, 5), -1.02)
    np.fill_diagonal(a, -1.0)
    for (i, j), v in {
        (1, 3): -3, (2, 3): -3, (3, 4): -3, (4, 5): -3,
        (4, 3): 1, (5, 4): 1, (1, 5): 1,
        (1, 2): 0.5, (2, 1): 0.5,
        (3, 1): -0.75, (3, 2): 0.75,
    }.items():
        a[i - 1, j - 1] = v
    return GlvSystem(np.ones(5), a)


def example2() -> GlvCycle:
    """Cycle ``xi1 -> xi*(1,2) -> xi3 -> xi4 -> xi5 -> xi1``."""
    geometry = [
        NodeGeometry((0,), 1, (4,), (2, 3)),
        NodeGeometry((0, 1), 2, (), (3, 4)),
        NodeGeometry((2,), 3, (0, 1), (4,)),
        NodeGeometry((3,), 4, (2,), (0, 1)),
        NodeGeometry((4,), 0, (3,), (1, 2)),
    ]
    return cycle_from_geometry(example2_system(), geometry)


def _group(name: str, items: list[Inequality], notes: Sequence[str] = ()) -> ConnectionReport:
    return ConnectionReport(name, (), tuple(items), notes=tuple(notes))


def example1_conditions(cycle: GlvCycle | None = None) -> dict[str, ConnectionReport]:
    """Connection conditions of the shift-symmetric example on the triple (1,2,3)."""
    sys = (cycle or example1()).system
    return {"connection_in_x1x2x3": check_tlv30(sys, (0, 1, 2))}


def example2_conditions(cycle: GlvCycle | None = None) -> dict[str, Any]:
    """Existence conditions of the mixed example, evaluated as listed.

    The conditions for ``xi*(1,2) -> xi3`` are listed with ``a12*a21 > 1``;
    the three-species connection conditions they come from, and the existence of
    ``xi*(1,2)`` itself, need ``a12*a21 < 1``. Both are evaluated and the
    disagreement is reported under ``conflicts``.
    """
    sys = (cycle or example2()).system
    a = lambda i, j: float(sys.a[i - 1, j - 1])  # noqa: E731
    out: dict[str, Any] = {}
    out["planar_equilibrium_and_xi1_connection"] = _group(
        "planar_equilibrium_and_xi1_connection",
        [
            Inequality("1+a21", 1 + a(2, 1), ">"),
            Inequality("1+a12", 1 + a(1, 2), ">"),
            Inequality("1-a12*a21", 1 - a(1, 2) * a(2, 1), ">"),
        ],
    )
    axis = []
    for j in (3, 4, 5):
        k = j % 5 + 1
        axis += [
            Inequality(f"1+a{k}{j}", 1 + a(k, j), ">"),
            Inequality(f"1+a{j}{k}", 1 + a(j, k), "<"),
        ]
    out["axis_connections"] = _group("axis_connections", axis)
    listed = [
        Inequality("1+a12", 1 + a(1, 2), ">"),
        Inequality("1+a13", 1 + a(1, 3), "<"),
        Inequality("1+a21", 1 + a(2, 1), ">"),
        Inequality("1+a23", 1 + a(2, 3), "<"),
        Inequality("1+a31", 1 + a(3, 1), ">"),
        Inequality("1+a32", 1 + a(3, 2), ">"),
        Inequality("a12*a21-1", a(1, 2) * a(2, 1) - 1, ">"),
        Inequality(
            "1-a12*a21+a31(1+a12)+a32(1+a21)",
            1 - a(1, 2) * a(2, 1) + a(3, 1) * (1 + a(1, 2)) + a(3, 2) * (1 + a(2, 1)),
            ">",
        ),
    ]
    out["planar_to_xi3_listed"] = _group("planar_to_xi3_listed", listed)
    out["planar_to_xi3_three_species"] = check_tlv3(sys, (0, 1, 2))
    cyc = cycle or example2()
    # every transverse eigenvalue negative except the one at xi1 along x3
    trans = []
    for eq in cyc.equilibria:
        for k, cls in sorted(eq.classes.items()):
            if cls == "transverse":
                sense = ">" if (eq.label, k) == ("xi1", 2) else "<"
                trans.append(Inequality(f"{eq.label} x{k + 1}", eq.axis_eigenvalues[k], sense))
    out["transverse_negative"] = _group("transverse_negative", trans)
    conflicts = []
    if out["planar_to_xi3_listed"].satisfied != out["planar_to_xi3_three_species"].satisfied:
        conflicts.append(
            "product condition: the listed conditions require a12*a21 > 1 "
            f"(value {a(1, 2) * a(2, 1):g}) while the three-species connection conditions and the planar "
            "equilibrium need a12*a21 < 1"
        )
    out["conflicts"] = conflicts
    return out


def pair_connections(sys: GlvSystem, pairs: Sequence[tuple[int, int]]) -> list[ConnectionReport]:
    return [check_connection_2d(sys, i, j) for i, j in pairs]
