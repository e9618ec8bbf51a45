"""Significant/insignificant indices, spectral conditions and verdicts.

Everything here works on log-coordinates ``eta = (ln|w|, ln|z_1|, ...)`` in
which the return maps of the cycle are linear with the transition matrices
built in :mod:`hetcycle.core`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np

from .core import CycleSpec, require_valid, transition_product

DEFAULT_TOL = 1e-9


class Verdict(str, Enum):
    ASYMPTOTICALLY_STABLE = "AsymptoticallyStable"
    FRAGMENTARILY_ASYMPTOTICALLY_STABLE = "FragmentarilyAsymptoticallyStable"
    COMPLETELY_UNSTABLE = "CompletelyUnstable"
    INCONCLUSIVE = "Inconclusive"


class SpectrumError(RuntimeError):
    pass


# -- index classification ---------------------------------------------------


@dataclass(frozen=True)
class IndexClassification:
    """Per incoming slot of node ``base``: does it ever become expanding?"""

    base: int
    significant: tuple[bool, ...]
    orbits: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def insignificant(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.significant) if not s)


def classify_indices(spec: CycleSpec, base: int = 0) -> IndexClassification:
    """Trace every incoming coordinate of node ``base`` through the permutations.

    A coordinate is insignificant when its (node, slot) orbit returns to its
    start without ever landing in an expanding slot.
    """
    require_valid(spec)
    m = spec.m
    base %= m
    flags: list[bool] = []
    orbits: list[tuple[tuple[int, int], ...]] = []
    for slot in range(spec.nodes[base].dim_in):
        node, s = base, slot
        seen: set[tuple[int, int]] = set()
        orbit: list[tuple[int, int]] = []
        significant = False
        while (node, s) not in seen:
            seen.add((node, s))
            orbit.append((node, s))
            if s == 0:
                significant = True
                break
            spec_node = spec.nodes[node]
            s = spec_node.out_permutation[spec_node.n_c + s - 1]
            node = (node + 1) % m
        flags.append(significant)
        orbits.append(tuple(orbit))
    return IndexClassification(base, tuple(flags), tuple(orbits))


# -- spectra ----------------------------------------------------------------


@dataclass(frozen=True)
class Eigenpair:
    value: complex
    vector: np.ndarray
    significant: bool


@dataclass(frozen=True)
class Spectrum:
    pairs: tuple[Eigenpair, ...]
    anomalies: tuple[str, ...] = ()

    @property
    def significant(self) -> tuple[Eigenpair, ...]:
        return tuple(p for p in self.pairs if p.significant)


def _normalise(vec: np.ndarray) -> np.ndarray:
    """Scale so the largest-magnitude component becomes exactly +1."""
    k = int(np.argmax(np.abs(vec)))
    out = vec / vec[k]
    if np.all(np.abs(out.imag) == 0):
        out = out.real
    return out


def significant_spectrum(M: np.ndarray, cls: IndexClassification, tol: float = DEFAULT_TOL) -> Spectrum:
    """Full eigendecomposition with each pair flagged significant or not.

    A pair is insignificant when its eigenvector vanishes (relative to its
    max-norm) on every significant coordinate. Insignificant eigenvalues
    whose modulus is not 1 are listed in ``anomalies``.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"transition matrix must be square, got shape {M.shape}")
    if len(cls.significant) != M.shape[0]:
        raise ValueError("classification does not match the matrix size")
    if tol <= 0:
        raise ValueError("tol must be positive")
    try:
        values, vectors = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise SpectrumError(f"eigensolver failed on {M.tolist()}: {exc}") from exc
    sig_idx = [i for i, s in enumerate(cls.significant) if s]
    pairs = []
    anomalies = []
    for k in range(len(values)):
        vec = _normalise(vectors[:, k])
        insignificant = bool(cls.insignificant) and bool(np.all(np.abs(vec[sig_idx]) < tol))
        lam = complex(values[k])
        if insignificant and abs(abs(lam) - 1.0) >= tol:
            anomalies.append(f"insignificant eigenvalue {lam} has modulus {abs(lam)!r} != 1")
        pairs.append(Eigenpair(lam, vec, not insignificant))
    return Spectrum(tuple(pairs), tuple(anomalies))


@dataclass(frozen=True)
class ConditionCheck:
    """Conditions (i) real, (ii) > 1, (iii) one-signed eigenvector."""

    is_real: bool
    exceeds_one: bool
    uniform_sign: bool
    lambda_max: complex | None
    eigvec: np.ndarray | None = None
    degenerate: bool = False
    reason: str | None = None

    @property
    def passed(self) -> bool:
        return not self.degenerate and self.is_real and self.exceeds_one and self.uniform_sign

    def to_dict(self) -> dict[str, Any]:
        return {
            "is_real": self.is_real,
            "exceeds_one": self.exceeds_one,
            "uniform_sign": self.uniform_sign,
            "passed": self.passed,
            "degenerate": self.degenerate,
            "reason": self.reason,
            "lambda_max": _complex_dict(self.lambda_max),
            "eigvec": _vector_list(self.eigvec),
        }


def dominant_significant(spectrum: Spectrum, tol: float = DEFAULT_TOL) -> tuple[Eigenpair | None, str | None]:
    """Largest-modulus significant pair, or ``(None, reason)`` on a modulus tie.

    Complex-conjugate partners are not counted as a tie.
    """
    sig = spectrum.significant
    if not sig:
        return None, "no significant eigenvalue"
    rho = max(abs(p.value) for p in sig)
    top = [p for p in sig if abs(p.value) >= rho * (1 - tol)]
    eps = tol * max(1.0, rho)
    distinct: list[Eigenpair] = []
    for p in top:
        partner = any(abs(q.value.imag) > eps and abs(p.value - q.value.conjugate()) <= eps for q in distinct)
        if not partner:
            distinct.append(p)
    if len(distinct) > 1:
        vals = ", ".join(f"{p.value:.6g}" for p in distinct)
        return None, f"significant eigenvalues tie in modulus: {vals}"
    best = max(top, key=lambda p: p.value.imag)
    return best, None


def check_spectral_conditions(M: np.ndarray, cls: IndexClassification, tol: float = DEFAULT_TOL) -> ConditionCheck:
    spectrum = significant_spectrum(M, cls, tol)
    pair, why = dominant_significant(spectrum, tol)
    if pair is None:
        return ConditionCheck(False, False, False, None, degenerate=True, reason=why)
    lam = pair.value
    if abs(abs(lam) - 1.0) <= tol:
        return ConditionCheck(False, False, False, lam, pair.vector, True, "|lambda_max| within tol of 1")
    is_real = abs(lam.imag) <= tol * max(1.0, abs(lam))
    if not is_real:
        return ConditionCheck(False, False, False, lam, pair.vector)
    lam = complex(lam.real, 0.0)
    vec = np.real(pair.vector)
    exceeds = lam.real > 1.0
    uniform = bool(np.all(vec > tol))
    if exceeds and np.any(np.abs(vec) <= tol):
        return ConditionCheck(True, True, False, lam, vec, True, "eigenvector has a zero component")
    return ConditionCheck(True, exceeds, uniform, lam, vec)


# -- verdict ----------------------------------------------------------------


@dataclass(frozen=True)
class Preconditions:
    radial_negative: tuple[bool, ...]
    contracting_negative: tuple[bool, ...]
    transverse_signs: tuple[tuple[int, ...], ...]

    @property
    def preconditions_ok(self) -> bool:
        return all(self.radial_negative) and all(self.contracting_negative)

    @property
    def all_transverse_negative(self) -> bool:
        return all(s < 0 for signs in self.transverse_signs for s in signs)

    def to_dict(self) -> dict[str, Any]:
        return {
            "radial_negative": list(self.radial_negative),
            "contracting_negative": list(self.contracting_negative),
            "transverse_signs": [list(s) for s in self.transverse_signs],
            "all_transverse_negative": self.all_transverse_negative,
        }


@dataclass(frozen=True)
class StabilityReport:
    verdict: Verdict
    lambda_max: complex | None
    eigvec: np.ndarray | None
    insignificant: tuple[int, ...]
    preconditions: Preconditions
    checks: dict[int, ConditionCheck] = field(default_factory=dict)
    positive_transverse_nodes: tuple[int, ...] = ()
    reason: str | None = None
    anomalies: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "reason": self.reason,
            "lambda_max": _complex_dict(self.lambda_max),
            "eigenvector": _vector_list(self.eigvec),
            "insignificant": list(self.insignificant),
            "positive_transverse_nodes": list(self.positive_transverse_nodes),
            "checks": {str(j): c.to_dict() for j, c in sorted(self.checks.items())},
            "preconditions": self.preconditions.to_dict(),
            "anomalies": list(self.anomalies),
        }


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def preconditions(spec: CycleSpec) -> Preconditions:
    return Preconditions(
        tuple(n.radial_abscissa < 0 for n in spec.nodes),
        tuple(all(c < 0 for c in n.contracting) for n in spec.nodes),
        tuple(tuple(_sign(t) for t in n.transverse) for n in spec.nodes),
    )


def verdict(spec: CycleSpec, tol: float = DEFAULT_TOL) -> StabilityReport:
    """Decide stability of the cycle from its transition matrices."""
    require_valid(spec)
    pre = preconditions(spec)
    cls = classify_indices(spec, 0)
    spectrum = significant_spectrum(transition_product(spec, 0), cls, tol)
    top, tie = dominant_significant(spectrum, tol)
    lam = top.value if top is not None else None
    vec = top.vector if top is not None else None
    positive_nodes = tuple(j for j, n in enumerate(spec.nodes) if any(t > 0 for t in n.transverse))
    base = dict(
        lambda_max=lam,
        eigvec=vec,
        insignificant=cls.insignificant,
        preconditions=pre,
        positive_transverse_nodes=positive_nodes,
        anomalies=spectrum.anomalies,
    )

    def inconclusive(reason: str, **extra: Any) -> StabilityReport:
        return StabilityReport(Verdict.INCONCLUSIVE, reason=reason, **base, **extra)

    if not pre.preconditions_ok:
        bad = [f"node {j + 1}" for j in range(spec.m)
               if not (pre.radial_negative[j] and pre.contracting_negative[j])]
        return inconclusive("preconditions violated (radial or contracting not negative at "
                            + ", ".join(bad) + ")")
    if any(s == 0 for signs in pre.transverse_signs for s in signs):
        return inconclusive("zero transverse eigenvalue")

    if pre.all_transverse_negative:
        # Nonnegative matrices: only the spectral radius of the significant part matters.
        sig = spectrum.significant
        if not sig:
            return inconclusive("no significant eigenvalue")
        rho = max(abs(p.value) for p in sig)
        if abs(rho - 1.0) <= tol:
            return inconclusive("lambda_max within tol of 1")
        if top is None:
            perron = min(sig, key=lambda p: abs(p.value - rho))
            base["lambda_max"], base["eigvec"] = perron.value, perron.vector
        v = Verdict.ASYMPTOTICALLY_STABLE if rho > 1 else Verdict.COMPLETELY_UNSTABLE
        return StabilityReport(v, **base)

    checks = {}
    for j in sorted({(jl + 1) % spec.m for jl in positive_nodes}):
        checks[j] = check_spectral_conditions(transition_product(spec, j), classify_indices(spec, j), tol)
    failed = [j for j, c in checks.items() if not c.degenerate and not c.passed]
    degenerate = [j for j, c in checks.items() if c.degenerate]
    if failed:
        return StabilityReport(Verdict.COMPLETELY_UNSTABLE, checks=checks,
                               reason=f"conditions fail for M^({failed[0] + 1})", **base)
    if degenerate:
        j = degenerate[0]
        return inconclusive(f"M^({j + 1}): {checks[j].reason}", checks=checks)
    return StabilityReport(Verdict.FRAGMENTARILY_ASYMPTOTICALLY_STABLE, checks=checks, **base)


# -- nonlinear map iteration -------------------------------------------------


@dataclass(frozen=True)
class MapOrbit:
    """Orbit of the (w, z) maps, stored as log-magnitudes per node passage."""

    status: str  # "converged" | "escaped" | "undecided"
    nodes: tuple[int, ...]
    log_orbit: tuple[tuple[float, ...], ...]
    signs: tuple[tuple[int, ...], ...]

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    @property
    def escaped(self) -> bool:
        return self.status == "escaped"

    def returns(self, node: int | None = None) -> list[float]:
        """``-ln w`` at successive visits of ``node`` (default: the start node)."""
        node = self.nodes[0] if node is None else node
        return [-eta[0] for n, eta in zip(self.nodes, self.log_orbit) if n == node]

    def growth_ratio(self, node: int | None = None) -> float:
        """Last ratio of successive ``-ln w`` values at one node."""
        r = self.returns(node)
        if len(r) < 2:
            raise ValueError("orbit too short to estimate a growth ratio")
        return r[-1] / r[-2]


def iterate_maps(
    spec: CycleSpec,
    w: float,
    z: Sequence[float],
    steps: int = 1000,
    start: int = 0,
    delta: float = 0.1,
    log_floor: float = -1e4,
) -> MapOrbit:
    """Apply the leading-order passage maps ``g_j`` in cyclic order.

    Each passage sends ``(w, z)`` to ``({w**(-c/e)}, {z_s * w**(-t_s/e)})``
    reordered by the node's permutation (contracting constants set to 1).
    Values are carried as ``ln|.|`` with separate signs so that orbits can
    run far below the double-precision range. The orbit escapes once any
    coordinate reaches ``delta`` and converges once every coordinate is
    below ``exp(log_floor)``.
    """
    if not w > 0:
        raise ValueError(f"w must be positive, got {w!r}")
    z = list(z)
    if any(v == 0 for v in z):
        raise ValueError("transverse start coordinates must be nonzero")
    eta = [math.log(w)] + [math.log(abs(v)) for v in z]
    signs = [1] + [1 if v > 0 else -1 for v in z]
    return iterate_log_maps(spec, eta, signs, steps, start, delta, log_floor)


def iterate_log_maps(
    spec: CycleSpec,
    eta: Sequence[float],
    signs: Sequence[int] | None = None,
    steps: int = 1000,
    start: int = 0,
    delta: float = 0.1,
    log_floor: float = -1e4,
) -> MapOrbit:
    """:func:`iterate_maps` with the start given directly in log-magnitudes."""
    require_valid(spec)
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    m = spec.m
    node = start % m
    eta = [float(x) for x in eta]
    signs = [1] * len(eta) if signs is None else [int(s) for s in signs]
    if len(eta) != spec.nodes[node].dim_in:
        raise ValueError(f"start has {len(eta)} coordinates, node {node} expects {spec.nodes[node].dim_in}")
    log_delta = math.log(delta)
    nodes, orbit, sgn = [node], [tuple(eta)], [tuple(signs)]

    def status_of(vals: list[float]) -> str | None:
        if any(not math.isfinite(v) or v >= log_delta for v in vals):
            return "escaped"
        if max(vals) < log_floor:
            return "converged"
        return None

    status = status_of(eta)
    for _ in range(steps):
        if status is not None:
            break
        ns = spec.nodes[node]
        lw = eta[0]
        out = [(-c / ns.expanding) * lw for c in ns.contracting]
        out += [eta[1 + k] + (-t / ns.expanding) * lw for k, t in enumerate(ns.transverse)]
        out_sign = [1] * ns.n_c + signs[1:]
        new_eta = [0.0] * len(out)
        new_sign = [1] * len(out)
        for k, slot in enumerate(ns.out_permutation):
            new_eta[slot] = out[k]
            new_sign[slot] = out_sign[k]
        eta, signs, node = new_eta, new_sign, (node + 1) % m
        nodes.append(node)
        orbit.append(tuple(eta))
        sgn.append(tuple(signs))
        status = status_of(eta)
    return MapOrbit(status or "undecided", tuple(nodes), tuple(orbit), tuple(sgn))


def sample_map_starts(
    spec: CycleSpec,
    n: int,
    seed: int,
    scale: float = 1e-4,
    start: int = 0,
    **kwargs: Any,
) -> list[MapOrbit]:
    """Iterate from ``n`` random starts with ``0 < w, |z_s| <= scale``."""
    rng = np.random.default_rng(seed)
    dim = spec.nodes[start % spec.m].dim_in
    orbits = []
    for _ in range(n):
        mags = scale * (1.0 - rng.random(dim))  # in (0, scale]
        sgn = rng.choice([-1.0, 1.0], size=dim - 1)
        orbits.append(iterate_maps(spec, mags[0], list(mags[1:] * sgn), start=start, **kwargs))
    return orbits


# -- serialisation helpers ---------------------------------------------------


def _complex_dict(z: complex | None) -> dict[str, float] | None:
    if z is None:
        return None
    return {"re": float(z.real), "im": float(z.imag)}


def _vector_list(v: np.ndarray | None) -> list | None:
    if v is None:
        return None
    v = np.asarray(v)
    if np.iscomplexobj(v):
        return [[float(x.real), float(x.imag)] for x in v]
    return [float(x) for x in v]
