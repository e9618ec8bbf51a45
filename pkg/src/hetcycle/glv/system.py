"""Generalised Lotka-Volterra systems and their boundary equilibria."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

MARGINAL_TOL = 1e-12


class NoEquilibriumError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GlvSystem:
    """``dx_i/dt = x_i (r_i + sum_j a_ij x_j)`` on the nonnegative orthant."""

    r: np.ndarray
    a: np.ndarray

    def __post_init__(self) -> None:
        r = np.array(self.r, dtype=float)
        a = np.array(self.a, dtype=float)
        if r.ndim != 1 or a.shape != (r.size, r.size):
            raise ValueError(f"shape mismatch: r {r.shape}, a {a.shape}")
        r.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "a", a)

    @classmethod
    def standard(cls, a: Sequence[Sequence[float]] | np.ndarray) -> "GlvSystem":
        """Unit growth rates with the diagonal of ``a`` forced to -1."""
        a = np.array(a, dtype=float)
        np.fill_diagonal(a, -1.0)
        return cls(np.ones(a.shape[0]), a)

    @property
    def n(self) -> int:
        return self.r.size

    def growth(self, x: np.ndarray) -> np.ndarray:
        return self.r + self.a @ x

    def rhs(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return x * self.growth(x)

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.diag(self.growth(x)) + x[:, None] * self.a

    @property
    def scales(self) -> np.ndarray:
        """Axis equilibrium positions ``-r_i / a_ii``."""
        return -self.r / np.diag(self.a)

    def normal_coef(self, p: int, q: int) -> float:
        """Coupling of ``q`` into ``p`` after rescaling every axis equilibrium to 1.

        With ``x_i = s_i y_i`` the system becomes
        ``dy_p/dt = r_p y_p (1 - y_p + sum_q k_pq y_q)`` with ``k_pq = a_pq s_q / r_p``;
        under unit rates and ``a_ii = -1`` this is just ``a_pq``.
        """
        return float(self.a[p, q] * self.scales[q] / self.r[p])

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "r": self.r.tolist(), "a": self.a.tolist()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "GlvSystem":
        sys_ = cls(data["r"], data["a"])
        if "n" in data and int(data["n"]) != sys_.n:
            raise ValueError(f"declared n={data['n']} but r has {sys_.n} entries")
        return sys_

    @classmethod
    def load(cls, path: str | Path) -> "GlvSystem":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True, eq=False)
class EquilibriumInfo:
    label: str
    coordinates: np.ndarray
    support: tuple[int, ...]
    axis_eigenvalues: dict[int, float]
    radial_eigenvalues: np.ndarray
    residual: float
    classes: dict[int, str] = field(default_factory=dict)

    @property
    def radial_abscissa(self) -> float:
        return float(np.max(self.radial_eigenvalues.real))

    @property
    def marginal(self) -> tuple[int, ...]:
        """Off-support axes whose eigenvalue is zero to within ``MARGINAL_TOL``."""
        return tuple(k for k, v in self.axis_eigenvalues.items() if abs(v) <= MARGINAL_TOL)

    def eigenvalue_table(self) -> list[tuple[float, str, str]]:
        rows = [(v, f"x{k + 1}", self.classes.get(k, "")) for k, v in sorted(self.axis_eigenvalues.items())]
        rows += [(float(v.real), "radial", "radial") for v in self.radial_eigenvalues]
        return rows


def _label(support: Sequence[int]) -> str:
    if len(support) == 1:
        return f"xi{support[0] + 1}"
    return "xi*(" + ",".join(str(i + 1) for i in support) + ")"


def equilibrium_on_support(sys: GlvSystem, support: Sequence[int], label: str | None = None) -> EquilibriumInfo:
    """Equilibrium whose nonzero coordinates are exactly ``support``."""
    S = list(support)
    A = sys.a[np.ix_(S, S)]
    try:
        xs = np.linalg.solve(A, -sys.r[S])
    except np.linalg.LinAlgError as exc:
        raise NoEquilibriumError(f"singular interaction block on support {S}") from exc
    if np.any(xs <= 0):
        raise NoEquilibriumError(f"no positive equilibrium on support {[i + 1 for i in S]}: {xs.tolist()}")
    x = np.zeros(sys.n)
    x[S] = xs
    g = sys.growth(x)
    off = {k: float(g[k]) for k in range(sys.n) if k not in S}
    radial = np.linalg.eigvals(xs[:, None] * A)
    return EquilibriumInfo(
        label or _label(S), x, tuple(S), off, radial, float(np.max(np.abs(sys.rhs(x))))
    )


def axis_equilibrium(sys: GlvSystem, i: int) -> EquilibriumInfo:
    """Equilibrium on axis ``i``; off-axis eigenvalues are ``r_j + a_ji x_i``."""
    if not (sys.r[i] > 0 and sys.a[i, i] < 0):
        raise NoEquilibriumError(f"axis {i + 1} needs r_i > 0 and a_ii < 0")
    return equilibrium_on_support(sys, [i])


def planar_equilibrium(sys: GlvSystem, i: int, j: int) -> EquilibriumInfo:
    """Coexistence equilibrium in the ``(x_i, x_j)`` plane (globally attracting there)."""
    b1, g2 = sys.normal_coef(i, j), sys.normal_coef(j, i)
    if not (1 + b1 > 0 and 1 + g2 > 0 and 1 - b1 * g2 > 0):
        raise NoEquilibriumError(
            f"plane ({i + 1},{j + 1}): need 1+b>0, 1+g>0, 1-bg>0; got b={b1}, g={g2}"
        )
    return equilibrium_on_support(sys, [i, j])


def planar_equilibrium_exact(sys: GlvSystem, i: int, j: int) -> tuple[tuple[Fraction, Fraction], dict[int, Fraction]]:
    """Rational-arithmetic planar equilibrium and its off-plane eigenvalues.

    Float coefficients are converted exactly, so dyadic inputs (0.5, -2, ...)
    give exact results.
    """
    a = [[Fraction(float(v)) for v in row] for row in sys.a]
    r = [Fraction(float(v)) for v in sys.r]
    # solve [[a_ii, a_ij], [a_ji, a_jj]] x = -(r_i, r_j)
    det = a[i][i] * a[j][j] - a[i][j] * a[j][i]
    if det == 0:
        raise NoEquilibriumError(f"singular plane ({i + 1},{j + 1})")
    xi = (-r[i] * a[j][j] + r[j] * a[i][j]) / det
    xj = (-r[j] * a[i][i] + r[i] * a[j][i]) / det
    if xi <= 0 or xj <= 0:
        raise NoEquilibriumError(f"no positive equilibrium in plane ({i + 1},{j + 1})")
    eig = {k: r[k] + a[k][i] * xi + a[k][j] * xj for k in range(sys.n) if k not in (i, j)}
    return (xi, xj), eig


def boundary_equilibria(sys: GlvSystem, max_support: int = 2) -> list[EquilibriumInfo]:
    """All positive equilibria supported on at most ``max_support`` axes."""
    from itertools import combinations

    out = []
    for size in range(1, max_support + 1):
        for S in combinations(range(sys.n), size):
            try:
                out.append(equilibrium_on_support(sys, S))
            except NoEquilibriumError:
                pass
    return out


def numerical_jacobian(sys: GlvSystem, x: np.ndarray, step: float = 1e-7) -> np.ndarray:
    """Central-difference Jacobian of the vector field."""
    x = np.asarray(x, dtype=float)
    J = np.empty((sys.n, sys.n))
    for k in range(sys.n):
        dx = np.zeros(sys.n)
        dx[k] = step
        J[:, k] = (sys.rhs(x + dx) - sys.rhs(x - dx)) / (2 * step)
    return J
