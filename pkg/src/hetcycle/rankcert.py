"""Structural nondegeneracy of cycle transition matrices.

Every basic matrix has the form ``P_j [b | E]`` where ``P_j`` permutes rows,
``b`` is a free first column and ``E`` is the fixed 0/1 block that carries
the transverse coordinates through. The determinant of the cyclic product
is a polynomial in all ``b`` entries; exhibiting one ``b`` for which the
product is a permutation matrix shows that polynomial is not identically
zero, so the product is invertible for almost every ``b``.

The certificate splits each section's basis into a "kept" group (``h = 1``)
of fixed size and routes the kept coordinates one-to-one around the cycle.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .core import CycleSpec, NodeSpec, require_valid

RANK_TOL = 1e-12


class CertificationError(RuntimeError):
    pass


def structural_matrix(node: NodeSpec, b: Sequence[float], dtype: Any = float) -> np.ndarray:
    """Basic matrix of ``node`` with first column ``b`` given in unpermuted row order."""
    rows, cols = node.dim_out, node.dim_in
    if len(b) != rows:
        raise ValueError(f"need {rows} first-column entries, got {len(b)}")
    raw = np.zeros((rows, cols), dtype=dtype)
    raw[:, 0] = b
    for k in range(node.n_t):
        raw[node.n_c + k, 1 + k] = 1
    out = np.empty_like(raw)
    out[list(node.out_permutation)] = raw
    return out


def minimal_rotation(spec: CycleSpec) -> int:
    """First node with the smallest incoming dimension."""
    dims = spec.dims
    return dims.index(min(dims))


@dataclass(frozen=True)
class SplitStep:
    node: int  # index in the original spec
    case: str
    h_in: tuple[int, ...]
    h_out: tuple[int, ...]
    b: tuple[int, ...]  # synthetic first column, unpermuted rows


@dataclass(frozen=True)
class SplitTrace:
    rotation: int
    kept: int
    steps: tuple[SplitStep, ...]

    @property
    def vectors(self) -> list[tuple[int, ...]]:
        """``h`` for each node of the rotated cycle (plus the wrap-around image)."""
        return [s.h_in for s in self.steps] + [self.steps[-1].h_out]


def split_vectors(spec: CycleSpec) -> SplitTrace:
    """Run the kept/dropped splitting around the cycle starting at a minimal node."""
    require_valid(spec)
    rot = minimal_rotation(spec)
    rs = spec.rotated(rot)
    n1 = rs.dims[0]
    h = (1,) * n1
    steps = []
    for j, node in enumerate(rs.nodes):
        d_in, d_out = node.dim_in, node.dim_out
        b = [0] * d_out
        if d_out == d_in:
            case = "I"
            tilde = list(h)
            b[0] = 1
        elif d_out > d_in:
            case = "II"
            k = d_out - d_in
            tilde = [0] * k + list(h)
            b[k] = 1
        elif d_out == d_in - 1:
            if h[0] == 0:
                case = "III"
                tilde = list(h[1:])
            else:
                case = "IV"
                zeros = [s for s in range(1, d_in) if h[s] == 0]
                if not zeros:
                    raise CertificationError(f"node {node.node_id}: no slot to promote (rotation not minimal?)")
                s = zeros[0]
                tilde = list(h[1:])
                tilde[s - 1] = 1
                # incoming slot s is carried by unpermuted row s-1
                b[s - 1] = 1
        else:
            raise CertificationError(f"node {node.node_id}: dimension {d_in} -> {d_out} breaks the chain")
        out = [0] * d_out
        for r, p in enumerate(node.out_permutation):
            out[p] = tilde[r]
        if sum(out) != n1:
            raise CertificationError(f"node {node.node_id}: kept group size {sum(out)} != {n1}")
        steps.append(SplitStep((j + rot) % spec.m, case, tuple(h), tuple(out), tuple(b)))
        h = tuple(out)
    return SplitTrace(rot, n1, tuple(steps))


def exact_det(mat: np.ndarray) -> int | Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    a = [[Fraction(int(v)) for v in row] for row in mat]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return int(det) if det.denominator == 1 else det


def is_permutation_matrix(mat: np.ndarray) -> bool:
    return (
        mat.ndim == 2
        and mat.shape[0] == mat.shape[1]
        and bool(np.all((mat == 0) | (mat == 1)))
        and bool(np.all(mat.sum(axis=0) == 1))
        and bool(np.all(mat.sum(axis=1) == 1))
    )


@dataclass(frozen=True)
class Certificate:
    trace: SplitTrace
    product: np.ndarray  # integer matrix, rotated cycle's base section
    det: int

    @property
    def permutation(self) -> list[int]:
        """``permutation[c]`` = row holding the 1 of column ``c``."""
        return [int(np.argmax(self.product[:, c])) for c in range(self.product.shape[1])]

    def to_dict(self) -> dict[str, Any]:
        return {
            "rotation": self.trace.rotation,
            "kept": self.trace.kept,
            "cases": [
                {"node": s.node, "case": s.case, "h_in": list(s.h_in), "h_out": list(s.h_out), "b": list(s.b)}
                for s in self.trace.steps
            ],
            "permutation": self.permutation,
            "det": self.det,
        }


def certificate(spec: CycleSpec) -> Certificate:
    """Exact 0/1 product for the synthetic ``b``; must be a permutation matrix."""
    trace = split_vectors(spec)
    rs = spec.rotated(trace.rotation)
    prod = np.eye(rs.dims[0], dtype=np.int64)
    for step, node in zip(trace.steps, rs.nodes):
        prod = structural_matrix(node, step.b, dtype=np.int64) @ prod
    if not is_permutation_matrix(prod):
        raise CertificationError(f"synthetic product is not a permutation matrix:\n{prod}")
    det = exact_det(prod)
    if det not in (1, -1):
        raise CertificationError(f"determinant {det} is not +-1")
    return Certificate(trace, prod, int(det))


def sample_b(spec: CycleSpec, rng: np.random.Generator, low: float = 0.1, high: float = 2.0) -> list[np.ndarray]:
    """First columns drawn from ``[-high, -low] U [low, high]``."""
    out = []
    for node in spec.nodes:
        mag = rng.uniform(low, high, node.dim_out)
        sign = rng.choice([-1.0, 1.0], node.dim_out)
        out.append(mag * sign)
    return out


def cyclic_products(spec: CycleSpec, bs: Sequence[np.ndarray]) -> list[np.ndarray]:
    """``M^(j)`` for every base ``j`` built from the given first columns."""
    mats = [structural_matrix(n, b) for n, b in zip(spec.nodes, bs)]
    m = spec.m
    out = []
    for j in range(m):
        p = np.eye(spec.dims[j])
        for k in range(m):
            p = mats[(j + k) % m] @ p
        out.append(p)
    return out


def numerical_rank(mat: np.ndarray, tol: float = RANK_TOL) -> int:
    s = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))


@dataclass(frozen=True)
class TrialResult:
    abs_det: float
    min_singular: float
    ranks: tuple[int, ...]


@dataclass(frozen=True)
class RankReport:
    n1: int
    rotation: int
    trials: tuple[TrialResult, ...]

    @property
    def min_abs_det(self) -> float:
        return min(t.abs_det for t in self.trials)

    @property
    def median_abs_det(self) -> float:
        return float(np.median([t.abs_det for t in self.trials]))

    @property
    def full_rank(self) -> bool:
        return all(t.min_singular > RANK_TOL for t in self.trials)

    @property
    def ranks_consistent(self) -> bool:
        return all(set(t.ranks) == {self.n1} for t in self.trials)

    def to_dict(self) -> dict[str, Any]:
        return {
            "n1": self.n1,
            "rotation": self.rotation,
            "trials": len(self.trials),
            "min_abs_det": self.min_abs_det,
            "median_abs_det": self.median_abs_det,
            "min_singular_value": min(t.min_singular for t in self.trials),
            "full_rank": self.full_rank,
            "ranks_consistent": self.ranks_consistent,
        }


def _trial(spec: CycleSpec, seq: np.random.SeedSequence) -> TrialResult:
    rng = np.random.default_rng(seq)
    prods = cyclic_products(spec, sample_b(spec, rng))
    base = prods[0]
    s = np.linalg.svd(base, compute_uv=False)
    return TrialResult(abs(float(np.linalg.det(base))), float(s[-1]), tuple(numerical_rank(p) for p in prods))


def randomized_rank(spec: CycleSpec, trials: int = 100, seed: int = 0, workers: int | None = None) -> RankReport:
    """Sample ``b`` and check the base product (at a minimal node) is invertible."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    require_valid(spec)
    rot = minimal_rotation(spec)
    rs = spec.rotated(rot)
    seqs = np.random.SeedSequence(seed).spawn(trials)
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(lambda s: _trial(rs, s), seqs))
    else:
        results = [_trial(rs, s) for s in seqs]
    return RankReport(rs.dims[0], rot, tuple(results))


def random_structure(rng: np.random.Generator, m: int, max_dim: int = 4) -> CycleSpec:
    """Random dimension-compatible cycle with random slot permutations."""
    while True:
        dims = [int(rng.integers(1, max_dim + 1)) for _ in range(m)]
        nodes = []
        ok = True
        for j in range(m):
            d_in, d_out = dims[j], dims[(j + 1) % m]
            n_t = d_in - 1
            n_c = d_out - n_t
            if n_c < 0:
                ok = False
                break
            perm = [int(p) for p in rng.permutation(d_out)]
            nodes.append(
                NodeSpec(
                    f"n{j + 1}",
                    float(rng.uniform(0.5, 2)),
                    [float(-rng.uniform(0.1, 2)) for _ in range(n_c)],
                    [float(rng.choice([-1, 1]) * rng.uniform(0.1, 2)) for _ in range(n_t)],
                    -1.0,
                    perm,
                )
            )
        if ok:
            return CycleSpec(tuple(nodes))
