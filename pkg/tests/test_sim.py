from __future__ import annotations

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from hetcycle.glv import GlvSystem, homoclinic_glv
from hetcycle.sim import (
    InsufficientDataError,
    IntegrationError,
    Trajectory,
    VisitEvent,
    basin_sample,
    box_start,
    connection_point,
    contraction_estimate,
    detect_visits,
    export_csv,
    follows_cycle,
    integrate,
    read_csv,
    read_event_log,
    resume,
    write_event_log,
)


def test_fixed_point_does_not_drift(ex1):
    p = ex1.equilibria[0].coordinates
    tr = integrate(ex1.system, p, 100.0)
    assert np.max(np.abs(tr.x - p)) < 1e-9


def test_zero_coordinates_stay_zero(ex2):
    x0 = np.array([0.3, 0.0, 0.2, 0.0, 0.1])
    for log in (False, True):
        tr = integrate(ex2.system, x0, 50.0, log_coordinates=log)
        assert np.all(tr.x[:, [1, 3]] == 0.0)
        assert np.all(tr.x >= 0)


def test_matches_reference_solver(ex1):
    x0 = [0.2, 0.3, 0.1, 0.25, 0.15]
    tr = integrate(ex1.system, x0, 30.0, rtol=1e-11, atol=1e-13)
    ref = solve_ivp(lambda t, x: ex1.system.rhs(x), (0, 30), x0, method="DOP853", rtol=1e-12, atol=1e-14,
                    t_eval=tr.t[::50])
    np.testing.assert_allclose(tr.x[::50], ref.y.T, atol=1e-7)


def test_log_coordinates_agree_with_plain(ex1):
    x0 = [0.2, 0.3, 0.1, 0.25, 0.15]
    a = integrate(ex1.system, x0, 20.0)
    b = integrate(ex1.system, x0, 20.0, log_coordinates=True)
    assert np.max(np.abs(a.final - b.final)) < 1e-7


def test_halving_tolerance_changes_result_less(ex1):
    x0 = [0.2, 0.3, 0.1, 0.25, 0.15]
    ref = integrate(ex1.system, x0, 20.0, rtol=1e-13, atol=1e-15).final
    e1 = np.max(np.abs(integrate(ex1.system, x0, 20.0, rtol=1e-6, atol=1e-8).final - ref))
    e2 = np.max(np.abs(integrate(ex1.system, x0, 20.0, rtol=1e-9, atol=1e-11).final - ref))
    assert e2 < e1


def test_resume_equals_single_run(ex1):
    x0 = [0.2, 0.3, 0.1, 0.25, 0.15]
    whole = integrate(ex1.system, x0, 20.0)
    part = resume(ex1.system, integrate(ex1.system, x0, 10.0), 20.0)
    assert part.t[-1] == 20.0
    assert np.max(np.abs(whole.final - part.final)) < 1e-8


def test_unbounded_and_input_errors():
    sys = GlvSystem([1.0], [[1.0]])
    tr = integrate(sys, [0.5], 10.0, bound=1e3)
    assert tr.status == "unbounded"
    with pytest.raises(IntegrationError):
        integrate(sys, [0.5], 10.0)
    with pytest.raises(ValueError):
        integrate(sys, [-0.5], 1.0)
    with pytest.raises(ValueError):
        integrate(sys, [0.5, 0.5], 1.0)


def test_csv_roundtrip(tmp_path, ex1):
    tr = integrate(ex1.system, [0.2, 0.3, 0.1, 0.25, 0.15], 5.0)
    back = read_csv(export_csv(tr, tmp_path / "t.csv"))
    np.testing.assert_array_equal(back.t, tr.t)
    np.testing.assert_array_equal(back.x, tr.x)


def test_csv_empty_trajectory_is_header_only(tmp_path):
    p = export_csv(Trajectory.empty(3), tmp_path / "e.csv")
    assert p.read_text() == "t,x1,x2,x3\n"
    assert len(read_csv(p)) == 0


def test_constant_trajectory_inside_gives_one_event():
    tr = Trajectory(np.linspace(0, 10, 11), np.zeros((11, 2)))
    ev = detect_visits(tr, [("o", [0.0, 0.0])], 0.1)
    assert len(ev) == 1 and not ev[0].complete and ev[0].dwell == 10.0


def test_crossing_interpolation():
    t = np.array([0.0, 1.0, 2.0, 3.0])
    x = np.array([[1.0], [0.0], [0.0], [1.0]])
    (ev,) = detect_visits(Trajectory(t, x), [("o", [0.0])], 0.5)
    assert ev.entry == pytest.approx(0.5) and ev.exit == pytest.approx(2.5) and ev.complete


def test_h_must_separate_equilibria():
    tr = Trajectory(np.zeros(1), np.zeros((1, 1)))
    with pytest.raises(ValueError):
        detect_visits(tr, [("a", [0.0]), ("b", [0.1])], 0.05)


def test_constant_dwell_gives_unit_ratio():
    ev = [VisitEvent("a" if k % 2 == 0 else "b", 10.0 * k, 10.0 * k + 2.0, 0.01) for k in range(10)]
    est = contraction_estimate(ev)
    assert est.ratio == pytest.approx(1.0) and est.loops == 5


def test_geometric_dwell_ratio_recovered():
    ev, t = [], 0.0
    for k in range(8):
        d = 1.5 ** k
        ev.append(VisitEvent("a", t, t + d, 0.01))
        t += d + 1
    assert contraction_estimate(ev).ratio == pytest.approx(1.5)


def test_too_few_loops():
    ev = [VisitEvent("a", k, k + 0.5, 0.01) for k in range(2)]
    with pytest.raises(InsufficientDataError):
        contraction_estimate(ev)


def test_event_log_roundtrip(tmp_path):
    ev = [VisitEvent("xi1", 1.0, 2.5, 0.01), VisitEvent("xi2", 3.0, 4.0, 0.02)]
    back = read_event_log(write_event_log(ev, tmp_path / "e.json"))
    assert back == ev


def test_follows_cycle():
    assert follows_cycle(["b", "c", "a", "b"], ["a", "b", "c"])
    assert not follows_cycle(["a", "c"], ["a", "b", "c"])
    assert not follows_cycle([], ["a"])


def test_example1_visits_in_cyclic_order(ex1):
    x0 = connection_point(ex1, 0) + 1e-4
    tr = integrate(ex1.system, x0, 1200.0, log_coordinates=True)
    ev = [e for e in detect_visits(tr, ex1.equilibria, 0.1) if e.complete]
    assert len(ev) >= 10
    assert follows_cycle([e.label for e in ev], ex1.labels)


def test_basin_sampling_deterministic_and_worker_independent(ex2):
    a = basin_sample(ex2, 3, seed=11)
    b = basin_sample(ex2, 3, seed=11, workers=2)
    assert a.to_dict() == b.to_dict()
    assert 0 < a.fraction <= 1


def test_basin_unstable_analog_does_not_converge():
    cyc = homoclinic_glv(-0.5, -1.2, -0.5, 0.5)
    res = basin_sample(cyc, 3, seed=0)
    assert res.fraction == 0.0


def test_halving_tolerances_moves_end_state_less_than_ten_tolerances(ex1):
    x0 = [0.2, 0.3, 0.1, 0.25, 0.15]
    rtol, atol = 1e-8, 1e-10
    a = integrate(ex1.system, x0, 10.0, rtol=rtol, atol=atol).final
    b = integrate(ex1.system, x0, 10.0, rtol=rtol / 2, atol=atol / 2).final
    assert np.max(np.abs(a - b)) < 10 * rtol


def test_example1_minimum_distances_shrink(ex1):
    x0 = box_start(connection_point(ex1, 0), 1e-3, np.random.default_rng(0))
    tr = integrate(ex1.system, x0, 20000.0, log_coordinates=True)
    d = [e.min_distance for e in detect_visits(tr, ex1.equilibria, 0.1) if e.complete]
    # above the roundoff floor of the nonzero coordinates
    above = [v for v in d if v > 1e-13]
    assert len(above) >= 8
    assert all(q < p for p, q in zip(above, above[1:]))


def test_example1_basin_is_full():
    from hetcycle.glv import example1

    res = basin_sample(example1(), 50, seed=0, delta=1e-3, workers=4)
    assert res.fraction == 1.0
