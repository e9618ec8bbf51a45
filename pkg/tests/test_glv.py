from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from hetcycle.glv import (
    GlvSystem,
    NoBoxError,
    NoEquilibriumError,
    axis_equilibrium,
    boundary_equilibria,
    check_connection_2d,
    check_tlv3,
    check_tlv30,
    example1,
    example1_conditions,
    example2,
    example2_conditions,
    homoclinic_glv,
    interior_equilibrium_3d,
    invariant_box,
    numerical_jacobian,
    planar_case,
    planar_equilibrium,
    planar_equilibrium_exact,
    roles,
    verify_box,
)
from hetcycle.sim import planar_run

# (b1, g2) for planar cases a..e, with the start points used for the simulations
PLANAR_CASES = {
    "a": ((-2.0, 0.5), "xi2"),
    "b": ((0.5, -2.0), "xi1"),
    "c": ((-0.5, 0.5), "xi*(1,2)"),
    "d": ((2.0, 1.0), "infinity"),
    "e": ((-2.0, -2.0), None),
}


def planar_system(b1: float, g2: float) -> GlvSystem:
    return GlvSystem.standard([[-1, b1], [g2, -1]])


def test_example1_equilibria_residual_and_eigenvalues(ex1):
    for eq in ex1.equilibria:
        assert eq.residual < 1e-12
        J = ex1.system.jacobian(eq.coordinates)
        Jn = numerical_jacobian(ex1.system, eq.coordinates)
        np.testing.assert_allclose(np.sort(np.linalg.eigvals(J).real), np.sort(np.linalg.eigvals(Jn).real), atol=1e-6)
        analytic = sorted(list(eq.axis_eigenvalues.values()) + list(eq.radial_eigenvalues.real))
        np.testing.assert_allclose(analytic, np.sort(np.linalg.eigvals(J).real), atol=1e-9)


def test_example1_exact_planar_values(ex1):
    (x1, x2), ev = planar_equilibrium_exact(ex1.system, 0, 1)
    assert (x1, x2) == (Fraction(2, 5), Fraction(6, 5))
    assert (ev[2], ev[3], ev[4]) == (Fraction(7, 5), Fraction(-2, 5), Fraction(-8, 5))


def test_example1_classes(ex1):
    eq = ex1.equilibria[0]
    assert eq.classes == {0: "radial", 1: "radial", 2: "expanding", 3: "transverse", 4: "contracting"}


def test_example1_ten_conditions(ex1):
    rep = example1_conditions(ex1)["connection_in_x1x2x3"]
    assert rep.satisfied and not rep.degenerate
    vals = {i.label: i.value for i in rep.inequalities}
    assert vals["1-b2*g3+b1(1+b2)+g1(1+g3)"] == pytest.approx(-2.0)
    assert vals["1-b1*g2+b3(1+b1)+g3(1+g2)"] == pytest.approx(1.75)


def test_example2_groups_and_conflict(ex2):
    c = example2_conditions(ex2)
    for name in ("planar_equilibrium_and_xi1_connection", "axis_connections", "transverse_negative", "planar_to_xi3_three_species"):
        assert c[name].satisfied, name
    listed = c["planar_to_xi3_listed"]
    assert [i.label for i in listed.failed] == ["a12*a21-1"]
    assert len(c["conflicts"]) == 1


def test_example2_cycle_equilibria(ex2):
    assert ex2.labels == ["xi1", "xi*(1,2)", "xi3", "xi4", "xi5"]
    np.testing.assert_allclose(ex2.equilibria[1].coordinates[:2], [2.0, 2.0], atol=1e-12)
    assert ex2.equilibria[0].axis_eigenvalues[2] == pytest.approx(0.25)


@pytest.mark.parametrize("case", list(PLANAR_CASES))
def test_planar_case_classification_matches_simulation(case):
    (b1, g2), expected = PLANAR_CASES[case]
    assert planar_case(b1, g2) == case
    sys = planar_system(b1, g2)
    rep = check_connection_2d(sys, 0, 1)
    assert rep.kind == f"tlv2-case-{case}" and rep.satisfied
    outcomes = {planar_run(sys, 0, 1, x0)[0] for x0 in ([0.3, 0.2], [0.6, 0.05], [0.05, 0.6])}
    if case == "e":
        assert outcomes == {"xi1", "xi2"}
        assert rep.attractor == "xi1|xi2"
    else:
        assert outcomes == {expected} and rep.attractor == expected


def test_planar_boundary_is_degenerate():
    assert planar_case(-1.0, 0.5) == "?"
    assert planar_case(1.0, 1.0) == "?"
    assert check_connection_2d(planar_system(1.0, 1.0), 0, 1).kind == "tlv2-degenerate"


def test_planar_equilibrium_requires_conditions():
    with pytest.raises(NoEquilibriumError):
        planar_equilibrium(planar_system(2.0, 1.0), 0, 1)


def test_all_zero_couplings_fail_both_three_species_checks():
    sys = GlvSystem.standard(np.zeros((3, 3)))
    assert not check_tlv30(sys, (0, 1, 2)).satisfied
    assert not check_tlv3(sys, (0, 1, 2)).satisfied


def test_normal_form_rescaling():
    sys = GlvSystem([2.0, 1.0, 1.0], [[-4.0, 1.0, 0.0], [3.0, -0.5, 0.0], [0.0, 0.0, -1.0]])
    # k_pq = a_pq s_q / r_p with s = (0.5, 2, 1)
    assert sys.normal_coef(0, 1) == pytest.approx(1.0)
    assert sys.normal_coef(1, 0) == pytest.approx(1.5)
    assert roles(sys, (0, 1, 2))["g1"] == 0.0


def test_interior_equilibrium_symmetric():
    res = interior_equilibrium_3d(GlvSystem.standard(np.zeros((3, 3))), (0, 1, 2))
    np.testing.assert_allclose(res.point, [1, 1, 1], atol=1e-12)


def test_interior_equilibrium_example2(ex2):
    res = interior_equilibrium_3d(ex2.system, (0, 1, 2))
    np.testing.assert_allclose(res.numerators, (-3, -3, 0.75), atol=1e-12)
    assert res.determinant == pytest.approx(0.75) and not res.exists


def test_invariant_box_example1_faces_inward(ex1):
    # roles on (1,3,2) put the two nonpositive couplings on the first face
    triple = (0, 2, 1)
    c = roles(ex1.system, triple)
    assert c["b1"] <= 0 and c["g1"] <= 0
    box = invariant_box(ex1.system, triple)
    chk = verify_box(ex1.system, box, n_points=200, seed=1)
    assert chk["inward"] and max(chk["max_normal_velocity"]) < 0


def test_invariant_box_refuses_positive_first_face(ex2):
    with pytest.raises(NoBoxError):
        invariant_box(ex2.system, (0, 1, 2))


def test_boundary_equilibria_list(ex1):
    labels = {e.label for e in boundary_equilibria(ex1.system)}
    assert {"xi1", "xi2", "xi3", "xi4", "xi5"} <= labels
    assert {"xi*(1,2)", "xi*(2,3)"} <= labels


def test_axis_equilibrium_requires_self_limitation():
    with pytest.raises(NoEquilibriumError):
        axis_equilibrium(GlvSystem([1.0], [[0.5]]), 0)


def test_system_roundtrip_and_immutability(tmp_path):
    sys = homoclinic_glv(-0.5, -2, -0.5, 0.5).system
    p = tmp_path / "s.json"
    import json

    p.write_text(json.dumps(sys.to_dict()))
    back = GlvSystem.load(p)
    np.testing.assert_array_equal(back.a, sys.a)
    with pytest.raises(ValueError):
        sys.a[0, 0] = 3.0
    with pytest.raises(ValueError):
        GlvSystem.from_dict({"n": 3, "r": [1, 1], "a": [[-1, 0], [0, -1]]})


def test_cycle_spec_derived_from_model(ex1, ex2):
    assert ex1.spec.m == 1 and ex1.symmetry_order == 5
    assert ex2.spec.dims == (3, 3, 2, 3, 3)
    assert example1().spec.to_dict() == ex1.spec.to_dict()
    assert example2().spec.to_dict() == ex2.spec.to_dict()
