from __future__ import annotations

import numpy as np
import pytest

from hetcycle.core import CycleSpec, NodeSpec, basic_matrix
from hetcycle.rankcert import (
    CertificationError,
    certificate,
    cyclic_products,
    exact_det,
    is_permutation_matrix,
    numerical_rank,
    random_structure,
    randomized_rank,
    split_vectors,
    structural_matrix,
)


def test_structural_matrix_reproduces_basic_matrix(ex1, ex2):
    for spec in (ex1.spec, ex2.spec):
        for j, node in enumerate(spec.nodes):
            b = [-c / node.expanding for c in node.contracting] + [-t / node.expanding for t in node.transverse]
            np.testing.assert_allclose(structural_matrix(node, b), basic_matrix(spec, j), atol=0)


def test_example_certificates(ex1, ex2):
    c1 = certificate(ex1.spec)
    assert is_permutation_matrix(c1.product) and abs(c1.det) == 1
    c2 = certificate(ex2.spec)
    assert c2.trace.rotation == 2
    assert [s.case for s in c2.trace.steps] == ["II", "I", "I", "I", "IV"]
    assert abs(c2.det) == 1


def test_fuzzed_structures_certify_and_cover_all_cases():
    rng = np.random.default_rng(7)
    cases = set()
    for _ in range(300):
        spec = random_structure(rng, int(rng.integers(1, 7)))
        cert = certificate(spec)
        assert abs(cert.det) == 1
        cases.update(s.case for s in cert.trace.steps)
    assert cases == {"I", "II", "III", "IV"}


def test_kept_group_size_is_preserved(ex2):
    tr = split_vectors(ex2.spec)
    assert all(sum(v) == tr.kept for v in tr.vectors)


def test_exact_det():
    assert exact_det(np.array([[0, 1], [1, 0]])) == -1
    assert exact_det(np.eye(3, dtype=int)) == 1
    assert exact_det(np.array([[1, 2], [2, 4]])) == 0


def test_zero_first_columns_make_products_singular():
    # the "adversarial" choice b = 0 everywhere: the expanding direction is lost
    rng = np.random.default_rng(0)
    spec = random_structure(rng, 3)
    prods = cyclic_products(spec, [np.zeros(n.dim_out) for n in spec.nodes])
    assert numerical_rank(prods[0]) < spec.dims[0]


def test_randomized_rank_examples(ex1, ex2):
    for spec in (ex1.spec, ex2.spec):
        rep = randomized_rank(spec, 100, seed=0)
        assert rep.min_abs_det > 1e-12 and rep.full_rank and rep.ranks_consistent
        assert rep.n1 == min(spec.dims)


def test_randomized_rank_deterministic_and_worker_independent(ex2):
    a = randomized_rank(ex2.spec, 20, seed=5).to_dict()
    b = randomized_rank(ex2.spec, 20, seed=5, workers=4).to_dict()
    assert a == b


def test_structural_matrix_rejects_wrong_length(ex1):
    with pytest.raises(ValueError):
        structural_matrix(ex1.spec.nodes[0], [1.0])


def test_invalid_spec_rejected():
    bad = CycleSpec((NodeSpec("a", 1.0, [-1.0], [-1.0, -1.0], -1.0, [0, 1]),))
    with pytest.raises(Exception):
        certificate(bad)
    with pytest.raises(Exception):
        randomized_rank(bad, 1)


def test_certification_error_is_runtime_error():
    assert issubclass(CertificationError, RuntimeError)
