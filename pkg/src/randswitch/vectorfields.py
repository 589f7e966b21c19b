"""Vector fields for switched systems.

Generic fields with (optionally finite-difference) Jacobians, multigroup SIS
infection fields built from an infection matrix C and cure-rate vector D,
numerical audits of the epidemic axioms, convex averaging of field families,
and an interior-equilibrium solver for epidemic fields.
"""

from dataclasses import dataclass

import numpy as np

from . import matrixcore


def finite_difference_jacobian(f, x, dim):
    """Central-difference Jacobian with step h = 1e-6 (1 + ||x||)."""
    x = np.asarray(x, dtype=float)
    h = 1e-6 * (1.0 + np.linalg.norm(x))
    J = np.empty((dim, dim))
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = h
        J[:, j] = (np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2.0 * h)
    return J


class VectorField:
    """A vector field on a box in R^d.

    evaluate maps state -> velocity; jacobian, when not supplied, falls back
    to central finite differences.  Fields declared with has_zero=True must
    vanish at the origin within 1e-12.
    """

    def __init__(self, dim, evaluate, jacobian=None, has_zero=True):
        self.dim = dim
        self._evaluate = evaluate
        self._jacobian = jacobian
        self.has_zero = has_zero
        if has_zero:
            f0 = np.linalg.norm(np.asarray(evaluate(np.zeros(dim)), dtype=float))
            if f0 > 1e-12:
                raise ValueError(f"field does not vanish at 0: ||F(0)|| = {f0:.3e}")

    def __call__(self, x):
        return np.asarray(self._evaluate(np.asarray(x, dtype=float)), dtype=float)

    def jacobian(self, x):
        if self._jacobian is not None:
            return np.asarray(self._jacobian(np.asarray(x, dtype=float)), dtype=float)
        return finite_difference_jacobian(self._evaluate, x, self.dim)


class SISField(VectorField):
    """Multigroup SIS infection field on the unit cube:
    dx_i/dt = (1 - x_i) (C x)_i - D_i x_i.

    C is the nonnegative infection matrix, D the positive vector of cure
    rates.  The unit cube is positively invariant: F_i(x) < 0 on x_i = 1.
    """

    def __init__(self, C, D):
        C = np.asarray(C, dtype=float)
        D = np.asarray(D, dtype=float)
        if C.ndim != 2 or C.shape[0] != C.shape[1]:
            raise ValueError("C must be square")
        if D.shape != (C.shape[0],):
            raise ValueError("D must be a vector matching C")
        if np.any(C < 0.0):
            raise ValueError("infection matrix C must be nonnegative")
        if np.any(D <= 0.0):
            raise ValueError("cure rates D must be positive")
        self.C = C
        self.D = D
        super().__init__(C.shape[0], self._eval, self._jac)

    def _check_domain(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < -1e-9) or np.any(x > 1.0 + 1e-9):
            raise ValueError(f"state {x} outside the unit cube")
        return x

    def _eval(self, x):
        x = self._check_domain(x)
        return (1.0 - x) * (self.C @ x) - self.D * x

    def _jac(self, x):
        x = self._check_domain(x)
        J = (1.0 - x)[:, None] * self.C
        J[np.diag_indices_from(J)] -= self.C @ x + self.D
        return J


@dataclass
class SwitchedFieldFamily:
    """A finite family of vector fields sharing a dimension and domain box."""

    fields: list
    lo: np.ndarray = None
    hi: np.ndarray = None

    def __post_init__(self):
        dims = {f.dim for f in self.fields}
        if len(dims) != 1:
            raise ValueError("all fields must share a dimension")
        self.dim = dims.pop()
        if self.lo is None:
            self.lo = np.zeros(self.dim)
        if self.hi is None:
            self.hi = np.ones(self.dim)
        self.lo = np.asarray(self.lo, dtype=float)
        self.hi = np.asarray(self.hi, dtype=float)

    @property
    def n_modes(self):
        return len(self.fields)


def jacobian_at_zero(family):
    """Jacobians of every field in the family at the origin."""
    mats = []
    for f in family.fields:
        f0 = np.linalg.norm(f(np.zeros(family.dim)))
        if f0 > 1e-9:
            raise ValueError(f"field does not vanish at 0: ||F(0)|| = {f0:.3e}")
        mats.append(f.jacobian(np.zeros(family.dim)))
    return mats


def average_field(family, weights):
    """Pointwise convex combination of the family's fields.

    Averaging SIS fields yields the SIS field with averaged (C, D).
    """
    weights = matrixcore.check_probability_vector(weights, family.n_modes)
    if all(isinstance(f, SISField) for f in family.fields):
        C = sum(w * f.C for w, f in zip(weights, family.fields))
        D = sum(w * f.D for w, f in zip(weights, family.fields))
        return SISField(C, D)
    fields = family.fields

    def ev(x):
        return sum(w * f(x) for w, f in zip(weights, fields))

    def jac(x):
        return sum(w * f.jacobian(x) for w, f in zip(weights, fields))

    return VectorField(family.dim, ev, jac)


@dataclass
class AxiomResult:
    passed: bool
    worst_violation: float = 0.0
    worst_sample: np.ndarray = None


@dataclass
class EpidemicReport:
    """Per-axiom outcome of the numerical epidemic-field audit."""

    zero_at_origin: AxiomResult
    inward_on_faces: AxiomResult
    cooperative: AxiomResult
    irreducible: AxiomResult
    strongly_subhomogeneous: AxiomResult

    def all_passed(self):
        return all(r.passed for r in (
            self.zero_at_origin, self.inward_on_faces, self.cooperative,
            self.irreducible, self.strongly_subhomogeneous))


def check_epidemic(fld, samples=1000, seed=0, tol=1e-9):
    """Numerically audit the epidemic-field axioms on sampled points.

    Checks: vanishing at the origin; inward-pointing velocity on each face
    x_i = 1; Metzler Jacobian on interior samples; irreducible Jacobian on
    [0, 1)^d samples; strict subhomogeneity F(lam x) << lam F(x) for sampled
    lam > 1.  A pass means no violation beyond tol was found.
    """
    rng = np.random.default_rng(seed)
    d = fld.dim

    v0 = float(np.linalg.norm(fld(np.zeros(d))))
    e1 = AxiomResult(v0 <= tol, v0, np.zeros(d))

    e2 = AxiomResult(True)
    for _ in range(max(1, samples // d)):
        for i in range(d):
            x = rng.uniform(0.0, 1.0, size=d)
            x[i] = 1.0
            fi = float(fld(x)[i])
            if fi >= -tol and (e2.passed or fi > e2.worst_violation):
                e2 = AxiomResult(False, fi, x)

    e3 = AxiomResult(True)
    e4 = AxiomResult(True)
    for _ in range(samples):
        x = rng.uniform(0.0, 1.0, size=d)
        J = fld.jacobian(x)
        off = J.copy()
        np.fill_diagonal(off, 0.0)
        worst = float(off.min())
        if worst < -tol and (e3.passed or worst < e3.worst_violation):
            e3 = AxiomResult(False, worst, x)
        # irreducibility on [0,1)^d with entries below tol treated as zero
        y = x * 0.999
        Jy = fld.jacobian(y)
        Jy[np.abs(Jy) <= tol] = 0.0
        if not matrixcore.is_irreducible(Jy) and e4.passed:
            e4 = AxiomResult(False, 0.0, y)

    e5 = AxiomResult(True)
    for _ in range(samples):
        x = rng.uniform(0.05, 0.95, size=d)
        for lam in (1.1, 1.5, 2.0):
            if np.any(lam * x >= 1.0):
                continue
            margin = float(np.min(lam * fld(x) - fld(lam * x)))
            if margin <= 1e-12 and (e5.passed or margin < e5.worst_violation):
                e5 = AxiomResult(False, margin, x)

    return EpidemicReport(e1, e2, e3, e4, e5)


def endemic_equilibrium(fld, tol=1e-10):
    """Interior equilibrium of an epidemic field, or None.

    Returns None when the Jacobian at the origin has nonpositive spectral
    abscissa (the origin is then globally stable).  Otherwise integrates the
    flow forward from a small displacement along the Perron direction until
    the velocity is tiny, then polishes with damped Newton.
    """
    from .engine import integrate_flow

    d = fld.dim
    A = fld.jacobian(np.zeros(d))
    if matrixcore.spectral_abscissa(A) <= 0.0:
        return None
    _, theta = matrixcore.perron_vector(A)
    x = 1e-3 * theta
    # monotone forward integration; converges for epidemic fields
    for _ in range(10_000):
        if np.linalg.norm(fld(x)) < 1e-8:
            break
        x = integrate_flow(fld, x, 1.0, 1e-2, lo=np.zeros(d), hi=np.ones(d))
    # damped Newton polish
    for _ in range(100):
        F = fld(x)
        if np.linalg.norm(F) <= tol:
            break
        step = np.linalg.solve(fld.jacobian(x), F)
        lam = 1.0
        while lam > 1e-6:
            cand = x - lam * step
            if np.all(cand > 0.0) and np.all(cand < 1.0) and \
                    np.linalg.norm(fld(cand)) < np.linalg.norm(F):
                x = cand
                break
            lam /= 2.0
        else:
            raise RuntimeError(f"Newton polish stalled at {x}")
    if np.linalg.norm(fld(x)) > tol:
        raise RuntimeError(f"equilibrium solver did not converge, last iterate {x}")
    return x
