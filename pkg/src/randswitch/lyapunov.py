"""Top Lyapunov exponent of a randomly switched linear system.

The linear PDMP Y' = A^{J_t} Y is analyzed through its angular projection
Theta = Y/||Y|| on the sphere (intersected with the invariant cone).  Two
independent Monte-Carlo estimators of the top exponent are provided: the
time average of the radial growth rate <A Theta, Theta> along the angular
process, and the direct log-norm growth of Y with periodic renormalization.
Analytic bounds, the fast-switching (averaged) limit, beta sweeps, convex
hull Hurwitz scans, and periodic-switching monodromy growth round things out.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import _kernels, matrixcore
from .engine import derive_seed


def _n_threads():
    env = os.environ.get("PDMP_THREADS")
    if env:
        return max(1, int(env))
    return 1


@dataclass
class LinearSwitchedSystem:
    """Matrices A^i plus a constant irreducible rate matrix for the modes.

    cone is "orthant" when the nonnegative orthant is invariant (Metzler
    matrices) and the angular process is confined to it, else "full".
    """

    As: np.ndarray              # (m, d, d)
    Q: np.ndarray               # (m, m) rate matrix
    cone: str = "full"

    def __post_init__(self):
        self.As = np.ascontiguousarray(np.asarray(self.As, dtype=float))
        if self.As.ndim != 3 or self.As.shape[1] != self.As.shape[2]:
            raise ValueError("As must be a stack of square matrices")
        self.Q = matrixcore.check_rate_matrix(self.Q)
        if self.Q.shape[0] != self.As.shape[0]:
            raise ValueError("rate matrix size must match the number of matrices")
        if self.As.shape[0] > 1 and not matrixcore.is_irreducible(self.Q):
            raise ValueError("rate matrix must be irreducible")
        if self.cone not in ("full", "orthant"):
            raise ValueError(f"unknown cone tag {self.cone!r}")

    @property
    def n_modes(self):
        return self.As.shape[0]

    @property
    def dim(self):
        return self.As.shape[1]

    def scaled(self, beta):
        return LinearSwitchedSystem(self.As, beta * self.Q, self.cone)

    def stationary_modes(self):
        if self.n_modes == 1:
            return np.array([1.0])
        return matrixcore.stationary_distribution(self.Q)


@dataclass
class GrowthRateEstimate:
    value: float
    stderr: float
    T: float
    replicates: int
    burn_in: float
    estimator: str

    def agrees_with(self, other, n_sigma=3.0):
        band = n_sigma * np.hypot(self.stderr, other.stderr)
        return abs(self.value - other.value) <= band


@dataclass
class AngularTrajectory:
    times: np.ndarray
    thetas: np.ndarray          # (n, d) unit vectors
    modes: np.ndarray
    growth_integral: np.ndarray  # running integral of <A Theta, Theta>


def angular_drift(A, theta, tol=1e-9):
    """Projection of A theta onto the tangent space of the sphere at theta."""
    theta = np.asarray(theta, dtype=float)
    if abs(np.linalg.norm(theta) - 1.0) > tol:
        raise ValueError("theta must be a unit vector")
    A = matrixcore.as_square_matrix(A)
    v = A @ theta
    return v - (v @ theta) * theta


def random_direction(rng, dim, cone):
    """Uniform direction on the sphere ("full") or its orthant patch."""
    v = rng.standard_normal(dim)
    if cone == "orthant":
        v = np.abs(v)
    return v / np.linalg.norm(v)


def simulate_angular(sys, theta0, i0, T, seed, h=1e-2, stride=10):
    """Sampled path of the angular process with the running growth integral.

    RK4 on the sphere with renormalization after every step; the growth
    integrand is accumulated by the trapezoid rule on the same grid.
    """
    theta = np.asarray(theta0, dtype=float).copy()
    if abs(np.linalg.norm(theta) - 1.0) > 1e-9:
        raise ValueError("theta0 must be a unit vector")
    if sys.cone == "orthant" and np.any(theta < -1e-9):
        raise ValueError("theta0 must lie in the nonnegative orthant")
    rng = np.random.default_rng(derive_seed(seed))
    hold = sys.Q.sum(axis=1)
    d = sys.dim
    times = [0.0]
    thetas = [theta.copy()]
    modes = [int(i0)]
    integral = [0.0]
    t = 0.0
    mode = int(i0)
    acc = 0.0
    k = np.empty((4, d))
    steps = 0
    while t < T:
        if hold[mode] > 0.0:
            dt = rng.exponential(1.0 / hold[mode])
        else:
            dt = T - t + 1.0
        seg_end = min(t + dt, T)
        A = sys.As[mode]
        q_prev = float(theta @ (A @ theta))
        while t < seg_end - 1e-12:
            step = min(h, seg_end - t)
            _kernels._rk4_sphere_step(A, theta, step, k[0], k[1], k[2], k[3],
                                      np.empty(d))
            if sys.cone == "orthant":
                if np.any(theta < -1e-9):
                    raise RuntimeError(f"angular state {theta} left the orthant")
                theta[theta < 0.0] = 0.0
            q_new = float(theta @ (A @ theta))
            acc += 0.5 * (q_prev + q_new) * step
            q_prev = q_new
            t += step
            steps += 1
            if steps % stride == 0:
                times.append(t)
                thetas.append(theta.copy())
                modes.append(mode)
                integral.append(acc)
        t = seg_end
        if t < T:
            p = sys.Q[mode] / hold[mode]
            mode = int(rng.choice(len(p), p=p))
            times.append(t)
            thetas.append(theta.copy())
            modes.append(mode)
            integral.append(acc)
    if times[-1] < t:
        times.append(t)
        thetas.append(theta.copy())
        modes.append(mode)
        integral.append(acc)
    return AngularTrajectory(np.array(times), np.array(thetas),
                             np.array(modes, dtype=np.int64),
                             np.array(integral))


def _replicate_values(fn, N):
    threads = _n_threads()
    if threads == 1:
        return [fn(k) for k in range(N)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(N)))


def estimate_lambda_angular(sys, T, N, burn_in=0.1, seed=0, h=1e-2):
    """Monte-Carlo estimate of the top exponent from the angular process.

    Each replicate starts from a uniformly random direction in the cone and
    averages <A Theta, Theta> over (burn_in * T, T); the estimate is the
    replicate mean with its standard error.
    """
    burn = burn_in * T
    hold = sys.Q.sum(axis=1)
    m = sys.n_modes
    orthant = sys.cone == "orthant"

    def one(k):
        s = derive_seed(seed, k)
        rng = np.random.default_rng(s)
        theta0 = random_direction(rng, sys.dim, sys.cone)
        i0 = int(rng.integers(m))
        val, ok = _kernels.angular_time_average(
            sys.As, sys.Q, hold, theta0, i0, float(T), burn, h,
            derive_seed(s, 1), orthant)
        if not ok:
            raise RuntimeError("angular replicate left the cone beyond tolerance")
        return val

    vals = np.array(_replicate_values(one, N))
    stderr = float(vals.std(ddof=1) / np.sqrt(N)) if N > 1 else 0.0
    return GrowthRateEstimate(float(vals.mean()), stderr, T, N, burn_in,
                              "angular-average")


def estimate_lambda_lognorm(sys, T, N, renorm_every=1.0, seed=0, h=1e-2):
    """Monte-Carlo estimate of the top exponent from log-norm growth of Y.

    Integrates Y' = A^{J} Y, renormalizing to unit length every renorm_every
    time units and accumulating the logs; (1/T) of the accumulated log norm
    per replicate, averaged over replicates.
    """
    hold = sys.Q.sum(axis=1)
    m = sys.n_modes

    def one(k):
        s = derive_seed(seed, k)
        rng = np.random.default_rng(s)
        y0 = random_direction(rng, sys.dim, sys.cone)
        i0 = int(rng.integers(m))
        val, ok = _kernels.lognorm_time_average(
            sys.As, sys.Q, hold, y0, i0, float(T), renorm_every, h,
            derive_seed(s, 1))
        if not ok:
            raise RuntimeError(
                "growth between renormalizations overflowed 1e100; "
                "use a shorter renorm_every")
        return val

    vals = np.array(_replicate_values(one, N))
    stderr = float(vals.std(ddof=1) / np.sqrt(N)) if N > 1 else 0.0
    return GrowthRateEstimate(float(vals.mean()), stderr, T, N, 0.0,
                              "log-norm")


def averaged_limit(sys):
    """Fast-switching limit of the top exponent: the spectral abscissa of the
    stationary-weighted average matrix, with its Perron direction.

    Requires the average matrix to be Metzler and irreducible.
    """
    p = sys.stationary_modes()
    Ap = np.tensordot(p, sys.As, axes=1)
    if not matrixcore.is_metzler(Ap):
        raise ValueError("average matrix is not Metzler; no closed-form limit")
    if not matrixcore.is_irreducible(Ap):
        raise ValueError("average matrix is reducible; no closed-form limit")
    lam, theta = matrixcore.perron_vector(Ap)
    return lam, theta


def lambda_beta_sweep(As, base_rates, betas, T, N, seed=0, cone="orthant",
                      h=1e-2):
    """Estimate the top exponent for rates beta * base_rates per beta."""
    out = []
    for idx, beta in enumerate(betas):
        if beta <= 0.0:
            raise ValueError("betas must be positive")
        sys = LinearSwitchedSystem(As, beta * np.asarray(base_rates, dtype=float),
                                   cone)
        out.append((float(beta),
                    estimate_lambda_angular(sys, T, N, seed=derive_seed(seed, idx),
                                            h=h)))
    return out


def sweep_to_csv(sweep, T, N, seed, fh):
    fh.write("beta,lambda_hat,stderr,T,N,seed\n")
    for beta, est in sweep:
        fh.write(f"{format(beta, '.17g')},{format(est.value, '.17g')},"
                 f"{format(est.stderr, '.17g')},{format(T, '.17g')},{N},{seed}\n")


def analytic_bounds(sys):
    """Analytic bounds on the top exponent with stationary mode weights."""
    p = sys.stationary_modes()
    As = list(sys.As)
    lo, hi = matrixcore.growth_rate_bounds(As, p)
    out = {
        "symmetric_lower": lo,
        "symmetric_upper": hi,
        "trace_lower": matrixcore.trace_lower_bound(As, p),
    }
    if sys.dim == 2 and all(matrixcore.is_metzler(A) for A in As):
        out["mierczynski_printed"] = matrixcore.mierczynski_bound_2d(
            As, p, "printed")
        out["mierczynski_classical"] = matrixcore.mierczynski_bound_2d(
            As, p, "classical")
    return out


def hurwitz_hull_check(As, grid=101):
    """Scan spectral abscissas over the convex hull of the matrices.

    Two matrices: a uniform grid on the segment.  More: the same grid on
    every pairwise segment plus the barycentric grid over triples.
    Returns {"all_hurwitz", "worst_t", "worst_lambda"}.
    """
    if grid < 2:
        raise ValueError("grid must be >= 2")
    As = [matrixcore.as_square_matrix(A) for A in As]
    worst = -np.inf
    worst_w = None

    def probe(weights):
        nonlocal worst, worst_w
        M = sum(w * A for w, A in zip(weights, As))
        lam = matrixcore.spectral_abscissa(M)
        if lam > worst:
            worst = lam
            worst_w = weights

    if len(As) == 1:
        probe((1.0,))
    else:
        ts = np.linspace(0.0, 1.0, grid)
        for a in range(len(As)):
            for b in range(a + 1, len(As)):
                for t in ts:
                    w = [0.0] * len(As)
                    w[a] = 1.0 - t
                    w[b] = t
                    probe(tuple(w))
        if len(As) > 2:
            k = max(2, grid // 10)
            fr = np.linspace(0.0, 1.0, k)
            for a in range(len(As)):
                for b in range(a + 1, len(As)):
                    for c in range(b + 1, len(As)):
                        for u in fr:
                            for v in fr:
                                if u + v > 1.0:
                                    continue
                                w = [0.0] * len(As)
                                w[a] = u
                                w[b] = v
                                w[c] = 1.0 - u - v
                                probe(tuple(w))
    return {"all_hurwitz": bool(worst < 0.0), "worst_t": worst_w,
            "worst_lambda": float(worst)}


def period_switch_growth(As, period):
    """Spectral radius of the one-period monodromy matrix
    e^{A1 * period} e^{A0 * period} of a two-mode periodic switch."""
    if len(As) != 2:
        raise ValueError("periodic switching growth is defined for two modes")
    A0 = matrixcore.as_square_matrix(As[0])
    A1 = matrixcore.as_square_matrix(As[1])
    M = expm(A1 * period) @ expm(A0 * period)
    if not np.all(np.isfinite(M)):
        raise OverflowError("matrix exponential overflowed")
    eig = np.linalg.eigvals(M)
    return float(np.max(np.abs(eig)))
