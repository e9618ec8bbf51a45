"""Hypothesis strategies for random valid cycle specifications."""

from __future__ import annotations

from hypothesis import strategies as st

from hetcycle.core import CycleSpec, NodeSpec

eig = st.floats(0.05, 3.0, allow_nan=False)


@st.composite
def cycle_specs(draw, max_m: int = 5, max_dim: int = 4, transverse_sign: str = "any") -> CycleSpec:
    """Dimension-compatible cycles with random slot permutations.

    ``transverse_sign`` is ``"negative"`` or ``"any"`` (nonzero either way).
    """
    m = draw(st.integers(1, max_m))
    dims = []
    for _ in range(m):
        dims.append(draw(st.integers(1, max_dim)))
    # repair so every node has n_c = d_{j+1} - d_j + 1 >= 0
    for j in range(m):
        nxt = (j + 1) % m
        if dims[nxt] < dims[j] - 1:
            dims[nxt] = dims[j] - 1
    for j in range(m):
        if dims[(j + 1) % m] < dims[j] - 1:
            return draw(cycle_specs(max_m, max_dim, transverse_sign))
    nodes = []
    for j in range(m):
        d_in, d_out = dims[j], dims[(j + 1) % m]
        n_t, n_c = d_in - 1, d_out - d_in + 1
        trans = []
        for _ in range(n_t):
            t = draw(eig)
            if transverse_sign == "any" and draw(st.booleans()):
                trans.append(t)
            else:
                trans.append(-t)
        perm = draw(st.permutations(list(range(d_out))))
        nodes.append(
            NodeSpec(
                f"n{j + 1}",
                draw(eig),
                [-draw(eig) for _ in range(n_c)],
                trans,
                -draw(eig),
                perm,
            )
        )
    return CycleSpec(tuple(nodes))
