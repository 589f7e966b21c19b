import io

import numpy as np
import pytest

from randswitch import engine, persistence, scenarios, vectorfields as vf
from randswitch import matrixcore as mc


def constant_trajectory(x, mode=1, T=10.0, n=101):
    times = np.linspace(0.0, T, n)
    states = np.tile(np.asarray(x, dtype=float), (n, 1))
    modes = np.full(n, mode, dtype=np.int64)
    empty = np.array([])
    return engine.Trajectory(times, states, modes, empty,
                             empty.astype(np.int64), empty.astype(np.int64),
                             seed=0)


def test_occupation_constant_trajectory():
    traj = constant_trajectory([0.31, 0.77], mode=1)
    hist = persistence.occupation_measure(traj, 10)
    w = hist.normalized()
    assert w.sum() == pytest.approx(1.0, abs=1e-9)
    assert w[3, 7, 1] == pytest.approx(1.0, abs=1e-9)


def test_occupation_mode_marginal_matches_stationary():
    s = scenarios.get("astacoins")
    Q = np.array([[0.0, 1.0], [4.0, 0.0]])
    system = engine.SwitchedSystem(s.family(), Q)
    traj = engine.simulate(system, s.x0, 0, 1000.0, 31)
    hist = persistence.occupation_measure(traj, 16, burn_in=50.0)
    p = mc.stationary_distribution(Q)
    np.testing.assert_allclose(hist.mode_marginal(), p, atol=0.03)


def test_ball_mass_whole_domain():
    traj = constant_trajectory([0.4, 0.4])
    hist = persistence.occupation_measure(traj, 8)
    assert persistence.ball_mass(hist, 10.0) == pytest.approx(1.0, abs=1e-9)


def test_tail_moment_constant():
    x = [0.3, 0.4]
    traj = constant_trajectory(x)
    val = persistence.tail_moment(traj, 0.1)
    assert val == pytest.approx(np.linalg.norm(x) ** -0.1, rel=1e-9)
    sweep = persistence.tail_moment_sweep(traj)
    assert set(sweep) == {0.05, 0.1, 0.2, 0.5}


def test_tail_moment_infinite_at_origin():
    traj = constant_trajectory([0.0, 0.0])
    assert persistence.tail_moment(traj, 0.1) == np.inf


def test_extinction_rate_recovers_linear_decay():
    for lam in (-2.0, -0.5):
        fld = vf.VectorField(2, lambda x, lam=lam: lam * x)
        fam = vf.SwitchedFieldFamily([fld])
        system = engine.SwitchedSystem(fam, np.zeros((1, 1)))
        traj = engine.simulate(system, np.array([0.9, 0.7]), 0, 5.0, 1)
        fit = persistence.extinction_rate(traj, window_fraction=1.0)
        assert fit.slope == pytest.approx(lam, abs=1e-6)
        assert fit.r_squared > 0.999999


def test_hitting_time_immediate_when_started_outside():
    s = scenarios.get("astacoins")
    system = s.system(20.0)
    ht = persistence.hitting_times(system, [np.array([0.5, 0.5])], 0,
                                   0.05, 10.0, 5, seed=1)
    np.testing.assert_array_equal(ht.times, 0.0)
    assert not ht.censored.any()


def test_hitting_time_persistent_system_escapes():
    s = scenarios.get("astacoins")
    system = s.system(20.0)
    ht = persistence.hitting_times(system, [np.array([1e-3, 1e-3])], 0,
                                   0.05, 200.0, 20, seed=2)
    assert int(ht.censored.sum()) == 0
    moments = ht.geometric_moments()
    assert set(moments) == {1.01, 1.05, 1.1}
    assert all(np.isfinite(v) for v in moments.values())


def test_part_metric_contraction_zero_for_equal_starts():
    s = scenarios.get("astacoins")
    system = s.system(20.0)
    x0 = np.array([0.3, 0.4])
    curve = persistence.part_metric_contraction(system, x0, x0, 20.0, 3,
                                               seed=3)
    np.testing.assert_array_equal(curve.mean_distance, 0.0)
    assert curve.excluded == 0


def test_part_metric_contraction_decays():
    s = scenarios.get("astacoins")
    system = s.system(20.0)
    curve = persistence.part_metric_contraction(
        system, np.array([0.4, 0.3]), np.array([0.2, 0.6]), 50.0, 5, seed=4)
    assert curve.mean_distance[-1] < curve.mean_distance[0]
    assert curve.log_slope < 0.0
    buf = io.StringIO()
    persistence.contraction_curve_to_csv(curve, buf)
    assert buf.getvalue().splitlines()[0] == "t,mean_p,stderr,excluded"


def test_occupation_csv():
    traj = constant_trajectory([0.31, 0.77])
    hist = persistence.occupation_measure(traj, 4)
    buf = io.StringIO()
    persistence.occupation_to_csv(hist, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "cell1,cell2,mode,mass"
    assert len(lines) == 2  # single occupied cell
