import numpy as np
import pytest

from randswitch import vectorfields as vf
from randswitch import matrixcore as mc


def make_pair_promoting_cure():
    f0 = vf.SISField([[2.0, 1.0], [1.0, 1.0]], [6.0, 1.0])
    f1 = vf.SISField([[1.0, 1.0], [1.0, 3.0]], [1.0, 7.0])
    return f0, f1


def make_pair_promoting_infection():
    f0 = vf.SISField([[1.0, 4.0], [1 / 16, 1.0]], [2.0, 2.0])
    f1 = vf.SISField([[2.0, 1 / 16], [4.0, 2.0]], [3.0, 3.0])
    return f0, f1


def make_common_equilibrium_pair():
    f0 = vf.SISField([[1.0, 3.0], [2.0, 4.0]], [2.0, 3.0])
    f1 = vf.SISField([[6.0, 2.0], [7.0, 3.0]], [4.0, 5.0])
    return f0, f1


def test_sis_eval_known_points():
    f0, f1 = make_common_equilibrium_pair()
    xs = np.array([0.5, 0.5])
    np.testing.assert_array_equal(f0(xs), np.zeros(2))
    np.testing.assert_array_equal(f1(xs), np.zeros(2))
    np.testing.assert_array_equal(f0(np.zeros(2)), np.zeros(2))
    np.testing.assert_allclose(f0(np.ones(2)), -f0.D, atol=1e-14)


def test_sis_domain_check():
    f0, _ = make_common_equilibrium_pair()
    with pytest.raises(ValueError):
        f0(np.array([1.5, 0.0]))


def test_sis_constructor_validation():
    with pytest.raises(ValueError):
        vf.SISField([[1.0, -0.1], [0.0, 1.0]], [1.0, 1.0])
    with pytest.raises(ValueError):
        vf.SISField([[1.0, 0.1], [0.0, 1.0]], [1.0, 0.0])


def test_jacobian_at_zero_is_C_minus_diagD():
    f0, f1 = make_pair_promoting_cure()
    np.testing.assert_allclose(f0.jacobian(np.zeros(2)),
                               [[-4.0, 1.0], [1.0, 0.0]], atol=1e-14)
    fam = vf.SwitchedFieldFamily([f0, f1])
    A0, A1 = vf.jacobian_at_zero(fam)
    np.testing.assert_allclose(A0, f0.C - np.diag(f0.D), atol=1e-14)
    np.testing.assert_allclose(A1, f1.C - np.diag(f1.D), atol=1e-14)


def test_jacobian_at_zero_linear_field():
    A = np.array([[-1.0, 0.5], [0.25, -2.0]])
    fld = vf.VectorField(2, lambda x: A @ x)
    fam = vf.SwitchedFieldFamily([fld])
    np.testing.assert_allclose(vf.jacobian_at_zero(fam)[0], A, atol=1e-6)


def test_analytic_jacobian_matches_finite_differences():
    rng = np.random.default_rng(11)
    f0, f1 = make_pair_promoting_infection()
    for fld in (f0, f1):
        for _ in range(50):
            x = rng.uniform(0.05, 0.95, size=2)
            J = fld.jacobian(x)
            Jfd = vf.finite_difference_jacobian(fld, x, 2)
            np.testing.assert_allclose(J, Jfd, rtol=1e-6, atol=1e-6)


def test_average_field_indicator_weights():
    f0, f1 = make_pair_promoting_cure()
    fam = vf.SwitchedFieldFamily([f0, f1])
    avg = vf.average_field(fam, [1.0, 0.0])
    rng = np.random.default_rng(1)
    for _ in range(100):
        x = rng.uniform(0.0, 1.0, size=2)
        np.testing.assert_array_equal(avg(x), f0(x))


def test_average_of_sis_is_sis_with_averaged_parameters():
    f0, f1 = make_pair_promoting_infection()
    fam = vf.SwitchedFieldFamily([f0, f1])
    avg = vf.average_field(fam, [0.5, 0.5])
    assert isinstance(avg, vf.SISField)
    np.testing.assert_allclose(avg.C, (f0.C + f1.C) / 2.0, atol=1e-15)
    A = avg.jacobian(np.zeros(2))
    assert mc.spectral_abscissa(A) == pytest.approx(33 / 32, abs=1e-9)


def test_check_epidemic_passes_for_sis():
    f0, _ = make_pair_promoting_cure()
    report = vf.check_epidemic(f0, samples=500, seed=0)
    assert report.all_passed()


def test_check_epidemic_reducible_jacobian_fails():
    fld = vf.VectorField(2, lambda x: -x)
    report = vf.check_epidemic(fld, samples=100, seed=0)
    assert not report.irreducible.passed


def test_check_epidemic_linear_field_not_strictly_subhomogeneous():
    A = np.array([[-1.0, 1.0], [1.0, -1.0]])
    fld = vf.VectorField(2, lambda x: A @ x)
    report = vf.check_epidemic(fld, samples=100, seed=0)
    assert not report.strongly_subhomogeneous.passed


def test_endemic_equilibrium_of_infectious_average():
    f0, f1 = make_pair_promoting_infection()
    fam = vf.SwitchedFieldFamily([f0, f1])
    avg = vf.average_field(fam, [0.5, 0.5])
    x = vf.endemic_equilibrium(avg)
    np.testing.assert_allclose(x, np.full(2, 33 / 113), atol=1e-8)
    assert np.linalg.norm(avg(x)) <= 1e-10


def test_endemic_equilibrium_absent_when_origin_stable():
    f0, f1 = make_pair_promoting_cure()
    fam = vf.SwitchedFieldFamily([f0, f1])
    avg = vf.average_field(fam, [0.5, 0.5])
    assert vf.endemic_equilibrium(avg) is None


def test_endemic_equilibrium_common_point():
    f0, _ = make_common_equilibrium_pair()
    x = vf.endemic_equilibrium(f0)
    np.testing.assert_allclose(x, [0.5, 0.5], atol=1e-10)


def test_common_zero_required():
    with pytest.raises(ValueError):
        vf.VectorField(2, lambda x: x + 1.0)
