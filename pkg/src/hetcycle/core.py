"""Cycle data model, basic transition matrices and their cyclic products.

Slot conventions used throughout the package (all indices 0-based):

* incoming slots of node ``j``: ``0`` is the expanding coordinate ``w``,
  ``1..n_t`` are the transverse coordinates ``z_1..z_{n_t}``;
* outgoing slots of node ``j``: ``0..n_c-1`` are the contracting
  coordinates, ``n_c..n_c+n_t-1`` the transverse ones (same order as the
  incoming transverse slots).

``out_permutation[k]`` is the incoming slot at node ``j+1`` occupied by
outgoing slot ``k`` of node ``j``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np


class InvalidCycleError(ValueError):
    """Raised when an operation receives a cycle that violates its invariants."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid cycle")


@dataclass(frozen=True)
class NodeSpec:
    """Classified spectrum of one equilibrium of the cycle."""

    node_id: str
    expanding: float
    contracting: tuple[float, ...] = ()
    transverse: tuple[float, ...] = ()
    radial_abscissa: float = -1.0
    out_permutation: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "node_id", str(self.node_id))
        object.__setattr__(self, "expanding", float(self.expanding))
        object.__setattr__(self, "contracting", tuple(float(c) for c in self.contracting))
        object.__setattr__(self, "transverse", tuple(float(t) for t in self.transverse))
        object.__setattr__(self, "radial_abscissa", float(self.radial_abscissa))
        object.__setattr__(self, "out_permutation", tuple(int(p) for p in self.out_permutation))

    @property
    def n_c(self) -> int:
        return len(self.contracting)

    @property
    def n_t(self) -> int:
        return len(self.transverse)

    @property
    def dim_in(self) -> int:
        return 1 + self.n_t

    @property
    def dim_out(self) -> int:
        return self.n_c + self.n_t

    def scaled(self, factor: float) -> "NodeSpec":
        """Same node with every eigenvalue multiplied by ``factor``."""
        return NodeSpec(
            self.node_id,
            self.expanding * factor,
            tuple(c * factor for c in self.contracting),
            tuple(t * factor for t in self.transverse),
            self.radial_abscissa * factor,
            self.out_permutation,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.node_id,
            "expanding": self.expanding,
            "contracting": list(self.contracting),
            "transverse": list(self.transverse),
            "radial_abscissa": self.radial_abscissa,
            "out_permutation": list(self.out_permutation),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "NodeSpec":
        return cls(
            node_id=data.get("id", ""),
            expanding=data["expanding"],
            contracting=data.get("contracting", []),
            transverse=data.get("transverse", []),
            radial_abscissa=data.get("radial_abscissa", -1.0),
            out_permutation=data["out_permutation"],
        )


@dataclass(frozen=True)
class CycleSpec:
    """Cyclic sequence of nodes; node ``j`` connects to node ``(j+1) % m``."""

    nodes: tuple[NodeSpec, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))

    @property
    def m(self) -> int:
        return len(self.nodes)

    @property
    def dims(self) -> tuple[int, ...]:
        """Incoming dimensions ``d_j = 1 + n_j^t``."""
        return tuple(node.dim_in for node in self.nodes)

    def rotated(self, k: int) -> "CycleSpec":
        """The same geometric cycle listed from node ``k`` onwards."""
        k %= self.m
        return CycleSpec(self.nodes[k:] + self.nodes[:k])

    def to_dict(self) -> dict[str, Any]:
        return {"nodes": [node.to_dict() for node in self.nodes]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CycleSpec":
        try:
            nodes = data["nodes"]
        except (KeyError, TypeError) as exc:
            raise InvalidCycleError(["document has no 'nodes' list"]) from exc
        try:
            return cls(tuple(NodeSpec.from_dict(n) for n in nodes))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidCycleError([f"malformed node entry: {exc!r}"]) from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "CycleSpec":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path: str | Path) -> "CycleSpec":
        return cls.from_json(Path(path).read_text())


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_cycle(spec: CycleSpec) -> ValidationResult:
    """Check node and chain invariants; violations are returned, not raised."""
    out: list[str] = []
    if spec.m == 0:
        return ValidationResult(("cycle has no nodes",))
    for j, node in enumerate(spec.nodes):
        tag = f"node {j + 1} ({node.node_id})"
        values = (node.expanding, node.radial_abscissa) + node.contracting + node.transverse
        if not all(math.isfinite(v) for v in values):
            out.append(f"{tag}: non-finite eigenvalue")
        if not node.expanding > 0:
            out.append(f"{tag}: expanding eigenvalue {node.expanding!r} must be > 0")
        perm = node.out_permutation
        if len(perm) != node.dim_out:
            out.append(
                f"{tag}: out_permutation has {len(perm)} entries, expected n^c+n^t = {node.dim_out}"
            )
        elif sorted(perm) != list(range(node.dim_out)):
            out.append(f"{tag}: out_permutation {list(perm)} is not a bijection onto 0..{node.dim_out - 1}")
        nxt = spec.nodes[(j + 1) % spec.m]
        k = (j + 1) % spec.m + 1
        if node.dim_out != nxt.dim_in:
            out.append(
                f"{tag}: n_{j + 1}^c+n_{j + 1}^t ≠ 1+n_{k}^t "
                f"({node.n_c}+{node.n_t} = {node.dim_out} vs 1+{nxt.n_t} = {nxt.dim_in})"
            )
    return ValidationResult(tuple(out))


def require_valid(spec: CycleSpec) -> None:
    result = validate_cycle(spec)
    if not result.ok:
        raise InvalidCycleError(result.violations)


def basic_matrix(spec: CycleSpec, j: int) -> np.ndarray:
    """Basic transition matrix of node ``j``, shape ``d_{j+1} x d_j``.

    Acts on log-coordinates ``(ln|w|, ln|z_1|, ...)`` at the incoming section
    of node ``j`` and returns the log-coordinates at the incoming section of
    node ``j+1`` in that node's slot order. The first column holds
    ``-c/e`` for contracting and ``-t/e`` for transverse rows.
    """
    require_valid(spec)
    node = spec.nodes[j % spec.m]
    e = node.expanding
    raw = np.zeros((node.dim_out, node.dim_in))
    for d, c in enumerate(node.contracting):
        raw[d, 0] = -c / e
    for k, t in enumerate(node.transverse):
        raw[node.n_c + k, 0] = -t / e
        raw[node.n_c + k, 1 + k] = 1.0
    out = np.empty_like(raw)
    out[list(node.out_permutation)] = raw
    return out


def partial_product(spec: CycleSpec, l: int, j: int) -> np.ndarray:
    """``M_j ... M_{l+1} M_l`` taken cyclically from node ``l`` to node ``j``."""
    m = spec.m
    l %= m
    j %= m
    steps = (j - l) % m + 1
    prod = basic_matrix(spec, l)
    for k in range(1, steps):
        prod = basic_matrix(spec, (l + k) % m) @ prod
    return prod


def transition_product(spec: CycleSpec, j: int = 0) -> np.ndarray:
    """Cyclic product ``M_{j-1} ... M_{j+1} M_j`` (square, ``d_j x d_j``)."""
    return partial_product(spec, j, j - 1)


def all_basic_matrices(spec: CycleSpec) -> list[np.ndarray]:
    return [basic_matrix(spec, j) for j in range(spec.m)]


def nodes_from_lists(
    ids: Iterable[str],
    expanding: Sequence[float],
    contracting: Sequence[Sequence[float]],
    transverse: Sequence[Sequence[float]],
    permutations: Sequence[Sequence[int]],
    radial: Sequence[float] | None = None,
) -> CycleSpec:
    """Convenience constructor from parallel per-node lists."""
    ids = list(ids)
    radial = list(radial) if radial is not None else [-1.0] * len(ids)
    return CycleSpec(
        tuple(
            NodeSpec(i, e, c, t, r, p)
            for i, e, c, t, r, p in zip(ids, expanding, contracting, transverse, radial, permutations)
        )
    )
