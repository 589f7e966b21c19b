import numpy as np
import pytest

from randswitch import matrixcore as mc

SQRT5_M2 = np.sqrt(5.0) - 2.0


def test_spectral_abscissa_known_values():
    assert mc.spectral_abscissa([[-4, 1], [1, 0]]) == pytest.approx(SQRT5_M2, abs=1e-9)
    assert mc.spectral_abscissa(np.zeros((3, 3))) == pytest.approx(0.0, abs=1e-12)
    assert mc.spectral_abscissa([[-1, 65 / 32], [65 / 32, -1]]) == pytest.approx(
        33 / 32, abs=1e-9)


def test_is_metzler():
    assert mc.is_metzler([[-4, 1], [1, 0]])
    assert not mc.is_metzler([[0, -1], [0, 0]])
    assert mc.is_metzler(np.diag([-5.0, 3.0]))


def test_is_hurwitz():
    assert mc.is_hurwitz([[-1, 1 / 16], [4, -1]])
    assert not mc.is_hurwitz([[-4, 1], [1, 0]])
    assert not mc.is_hurwitz(np.eye(2))


def test_is_irreducible():
    assert mc.is_irreducible([[-1, 4], [1 / 16, -1]])
    assert not mc.is_irreducible([[-1, 0, 0], [10, -1, 0], [0, 0, -10]])
    assert mc.is_irreducible([[5.0]])


def test_stationary_distribution_symmetric():
    for beta in (0.5, 1.0, 7.0):
        Q = np.array([[0.0, beta], [beta, 0.0]])
        np.testing.assert_allclose(mc.stationary_distribution(Q), [0.5, 0.5],
                                   atol=1e-12)


def test_stationary_distribution_asymmetric():
    beta, t = 3.0, 0.3
    Q = np.array([[0.0, beta * t], [beta * (1 - t), 0.0]])
    np.testing.assert_allclose(mc.stationary_distribution(Q), [1 - t, t],
                               atol=1e-12)


def test_stationary_distribution_cycle():
    Q = np.zeros((3, 3))
    Q[0, 1] = Q[1, 2] = Q[2, 0] = 1.0
    np.testing.assert_allclose(mc.stationary_distribution(Q),
                               np.full(3, 1 / 3), atol=1e-12)


def test_stationary_distribution_balance_residual():
    rng = np.random.default_rng(0)
    for _ in range(50):
        m = int(rng.choice([2, 3, 5]))
        Q = rng.uniform(0.1, 3.0, size=(m, m))
        np.fill_diagonal(Q, 0.0)
        p = mc.stationary_distribution(Q)
        G = Q - np.diag(Q.sum(axis=1))
        assert np.max(np.abs(p @ G)) <= 1e-12
        assert p.sum() == pytest.approx(1.0, abs=1e-12)


def test_stationary_distribution_reducible_rejected():
    Q = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError):
        mc.stationary_distribution(Q)


def test_perron_vector_symmetric():
    lam, v = mc.perron_vector([[-2, 1], [1, -2]])
    assert lam == pytest.approx(-1.0, abs=1e-10)
    np.testing.assert_allclose(v, np.full(2, 1 / np.sqrt(2)), atol=1e-9)


def test_perron_vector_matches_dense_solver():
    rng = np.random.default_rng(3)
    for _ in range(20):
        A = rng.uniform(0.1, 2.0, size=(3, 3))
        A -= np.diag(rng.uniform(0.0, 3.0, size=3))
        lam, v = mc.perron_vector(A)
        assert lam == pytest.approx(mc.spectral_abscissa(A), abs=1e-9)
        assert np.linalg.norm(A @ v - lam * v) <= 1e-10
        assert np.all(v > 0.0)
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)


def test_perron_vector_rejects_non_metzler():
    with pytest.raises(ValueError):
        mc.perron_vector([[0.0, -1.0], [1.0, 0.0]])


def test_hilbert_metric():
    x = np.array([1.0, 2.0])
    assert mc.hilbert_metric(x, x) == 0.0
    assert mc.hilbert_metric([1, 2], [2, 1]) == pytest.approx(np.log(4.0))
    assert mc.hilbert_metric(3.0 * x, [2, 1]) == pytest.approx(
        mc.hilbert_metric(x, [2, 1]), abs=1e-12)
    with pytest.raises(ValueError):
        mc.hilbert_metric([1.0, 0.0], [1.0, 1.0])


def test_birkhoff_contraction_values():
    assert mc.birkhoff_contraction(np.ones((3, 3))) == pytest.approx(0.0, abs=1e-12)
    assert mc.birkhoff_contraction([[2, 1], [1, 2]]) == pytest.approx(1 / 3)


def test_birkhoff_contraction_inequality():
    rng = np.random.default_rng(7)
    for _ in range(200):
        d = int(rng.choice([2, 3, 5]))
        T = rng.uniform(0.1, 5.0, size=(d, d))
        x = rng.uniform(0.1, 5.0, size=d)
        y = rng.uniform(0.1, 5.0, size=d)
        lhs = mc.hilbert_metric(T @ x, T @ y)
        assert lhs <= mc.birkhoff_contraction(T) * mc.hilbert_metric(x, y) + 1e-12


def test_part_metric():
    x = np.array([1.0, 2.0])
    assert mc.part_metric(x, x) == 0.0
    assert mc.part_metric([1.0, 1.0], [np.e, 1.0]) == pytest.approx(1.0)
    assert mc.part_metric([1.0, 0.0], [1.0, 1.0]) == np.inf
    assert mc.part_metric([0.0, 2.0], [0.0, 2.0]) == 0.0


def test_growth_rate_bounds_single_symmetric():
    A = np.array([[-2.0, 1.0], [1.0, -2.0]])
    lo, hi = mc.growth_rate_bounds([A], [1.0])
    assert lo == pytest.approx(-3.0, abs=1e-12)
    assert hi == pytest.approx(-1.0, abs=1e-12)


def test_growth_rate_bounds_sandwich_known_family():
    As = [np.array([[-4.0, 1.0], [1.0, 0.0]]),
          np.array([[0.0, 1.0], [1.0, -4.0]])]
    # both matrices are symmetric, so the upper bound is attained exactly
    lo, hi = mc.growth_rate_bounds(As, [0.5, 0.5])
    assert lo < SQRT5_M2 <= hi + 1e-12


def test_trace_lower_bound():
    assert mc.trace_lower_bound([np.diag([2.0, 4.0])], [1.0]) == pytest.approx(3.0)
    As = [np.array([[-4.0, 1.0], [1.0, 0.0]]),
          np.array([[0.0, 1.0], [1.0, -4.0]])]
    assert mc.trace_lower_bound(As, [0.5, 0.5]) == pytest.approx(-2.0)


def test_mierczynski_bound_variants():
    A = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert mc.mierczynski_bound_2d([A], [1.0], "printed") == pytest.approx(np.sqrt(2.0))
    assert mc.mierczynski_bound_2d([A], [1.0], "classical") == pytest.approx(1.0)
    diag = np.diag([-1.0, -3.0])
    for variant in ("printed", "classical"):
        assert mc.mierczynski_bound_2d([diag], [1.0], variant) == pytest.approx(-2.0)
    with pytest.raises(ValueError):
        mc.mierczynski_bound_2d([np.zeros((3, 3))], [1.0])
