"""Dense linear algebra and cone-geometry primitives.

Spectral quantities of small dense matrices, predicates (Metzler, Hurwitz,
irreducible), stationary distributions of jump-rate matrices, Perron
eigenpairs via power iteration, the Hilbert projective metric with Birkhoff's
contraction coefficient, the part metric, and analytic bounds on the top
growth rate of a randomly switched linear system.

All functions are pure and accept anything convertible to a float ndarray.
"""

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components


class EigenSolverError(RuntimeError):
    """Raised when the dense eigenvalue solver fails; carries the matrix."""

    def __init__(self, message, matrix):
        super().__init__(message)
        self.matrix = np.asarray(matrix)


def as_square_matrix(A):
    """Validate and return A as a float (d, d) array with finite entries."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def check_rate_matrix(Q):
    """Validate a jump-rate matrix: nonnegative off-diagonal, zero diagonal."""
    Q = as_square_matrix(Q)
    if np.any(np.diag(Q) != 0.0):
        raise ValueError("rate matrix must have zero diagonal")
    off = Q.copy()
    np.fill_diagonal(off, 0.0)
    if np.any(off < 0.0):
        raise ValueError("rate matrix must have nonnegative off-diagonal entries")
    return Q


def check_probability_vector(p, n=None):
    """Validate a probability vector: nonnegative, sums to 1 within 1e-12."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ValueError("probability vector must be one-dimensional")
    if n is not None and len(p) != n:
        raise ValueError(f"expected length {n}, got {len(p)}")
    if np.any(p < 0.0):
        raise ValueError("probability vector has negative entries")
    if abs(p.sum() - 1.0) > 1e-12:
        raise ValueError(f"probability vector sums to {p.sum()!r}, not 1")
    return p


def spectral_abscissa(A):
    """Largest real part among the eigenvalues of A."""
    A = as_square_matrix(A)
    try:
        eig = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigenvalue solver failed: {exc}", A) from exc
    return float(np.max(eig.real))


def is_metzler(A):
    """True iff every off-diagonal entry of A is >= 0 (exact sign test)."""
    A = as_square_matrix(A)
    off = A.copy()
    np.fill_diagonal(off, 0.0)
    return bool(np.all(off >= 0.0))


def is_hurwitz(A):
    """True iff the spectral abscissa of A is negative."""
    return spectral_abscissa(A) < 0.0


def is_irreducible(A):
    """True iff the directed graph with an edge i->j whenever A_ij != 0
    (i != j) is strongly connected.

    An entry counts as an edge iff it is exactly nonzero; callers wanting a
    threshold should pre-filter the matrix.
    """
    A = as_square_matrix(A)
    d = A.shape[0]
    if d == 1:
        return True
    adj = (A != 0.0)
    np.fill_diagonal(adj, False)
    n_comp, _ = connected_components(csr_matrix(adj), directed=True,
                                     connection="strong")
    return n_comp == 1


def _non_communicating_pair(Q):
    """Find a pair of modes (i, j) with no directed path i -> j."""
    adj = (np.asarray(Q) != 0.0)
    np.fill_diagonal(adj, False)
    _, labels = connected_components(csr_matrix(adj), directed=True,
                                     connection="strong")
    # any two modes in different strong components fail to communicate in
    # at least one direction
    j = int(np.argmax(labels != labels[0]))
    return 0, j


def stationary_distribution(Q):
    """Unique invariant probability of the irreducible rate matrix Q.

    Solves the balance equations sum_j (p_j Q_ji - p_i Q_ij) = 0 together
    with sum_i p_i = 1; the residual is at most 1e-12 in max norm.
    """
    Q = check_rate_matrix(Q)
    n = Q.shape[0]
    if not is_irreducible(Q):
        i, j = _non_communicating_pair(Q)
        raise ValueError(
            f"rate matrix is reducible: modes {i} and {j} do not communicate")
    # generator G = Q - diag(row sums); solve p G = 0 with normalization
    G = Q - np.diag(Q.sum(axis=1))
    M = np.vstack([G.T, np.ones(n)])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    p, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    p = np.clip(p, 0.0, None)
    p /= p.sum()
    resid = np.max(np.abs(p @ G))
    if resid > 1e-12:
        raise RuntimeError(f"balance residual {resid:.3e} exceeds 1e-12")
    return p


def perron_vector(A, tol=1e-12, max_iter=100_000):
    """Perron eigenpair of a Metzler irreducible matrix.

    Returns (lam, theta) with lam = spectral_abscissa(A) and theta the
    strictly positive unit eigenvector, computed by power iteration on the
    shifted matrix A + r I with r = max |A_ii| + 1.
    """
    A = as_square_matrix(A)
    if not is_metzler(A):
        raise ValueError("perron_vector requires a Metzler matrix")
    if not is_irreducible(A):
        raise ValueError("perron_vector requires an irreducible matrix")
    d = A.shape[0]
    r = np.max(np.abs(np.diag(A))) + 1.0
    B = A + r * np.eye(d)
    theta = np.ones(d) / np.sqrt(d)
    for _ in range(max_iter):
        nxt = B @ theta
        nxt /= np.linalg.norm(nxt)
        if np.max(np.abs(nxt - theta)) < tol:
            theta = nxt
            break
        theta = nxt
    else:
        raise RuntimeError(f"power iteration did not converge in {max_iter} steps")
    lam = float(theta @ (A @ theta))
    resid = np.linalg.norm(A @ theta - lam * theta)
    if resid > 1e-10:
        raise RuntimeError(f"Perron residual {resid:.3e} exceeds 1e-10")
    return lam, theta


def hilbert_metric(x, y):
    """Hilbert projective metric between strictly positive vectors:
    log(max_i x_i/y_i) - log(min_i x_i/y_i).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise ValueError("hilbert_metric requires strictly positive vectors")
    r = np.log(x) - np.log(y)
    return float(r.max() - r.min())


def birkhoff_contraction(T):
    """Birkhoff contraction coefficient of a strictly positive matrix.

    tau[T] = (1 - sqrt(phi)) / (1 + sqrt(phi)) with
    phi(T) = min over (i, j, k, l) of (T_ik T_jl) / (T_jk T_il),
    and d_H(Tx, Ty) <= tau[T] d_H(x, y) for all positive x, y.
    """
    T = as_square_matrix(T)
    if np.any(T <= 0.0):
        raise ValueError("birkhoff_contraction requires strictly positive entries")
    logT = np.log(T)
    # S[i, j, k] = log T_ik - log T_jk; phi = exp(min_{i,j}(min_k S + min_l -S))
    S = logT[:, None, :] - logT[None, :, :]
    m = S.min(axis=2)          # min_k (log T_ik - log T_jk)
    log_phi = float((m + m.T).min())
    phi = np.exp(log_phi)
    s = np.sqrt(min(phi, 1.0))
    return (1.0 - s) / (1.0 + s)


def part_metric(x, y):
    """Birkhoff part metric: max |log x_i - log y_i| over the common support,
    +inf when the supports differ.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0.0) or np.any(y < 0.0):
        raise ValueError("part_metric requires nonnegative vectors")
    sx = x > 0.0
    sy = y > 0.0
    if not np.array_equal(sx, sy):
        return np.inf
    if not np.any(sx):
        return 0.0
    return float(np.max(np.abs(np.log(x[sx]) - np.log(y[sx]))))


def growth_rate_bounds(As, p):
    """Weighted symmetric-part eigenvalue bounds on the extremal growth rates:
    sum_i p_i lambda_min(sym(A^i)) <= Lambda- <= Lambda+ <=
    sum_i p_i lambda_max(sym(A^i)).
    """
    As = [as_square_matrix(A) for A in As]
    p = check_probability_vector(p, len(As))
    lo = hi = 0.0
    for w, A in zip(p, As):
        eig = np.linalg.eigvalsh((A + A.T) / 2.0)
        lo += w * eig[0]
        hi += w * eig[-1]
    return float(lo), float(hi)


def trace_lower_bound(As, p, d=None):
    """Scaled weighted trace (1/d) sum_i p_i Tr(A^i), a lower bound on the
    top growth rate."""
    As = [as_square_matrix(A) for A in As]
    p = check_probability_vector(p, len(As))
    if d is None:
        d = As[0].shape[0]
    return float(sum(w * np.trace(A) for w, A in zip(p, As)) / d)


def mierczynski_bound_2d(As, p, variant="printed"):
    """Kolotilina-type lower bound on the top growth rate for families of
    2x2 Metzler matrices.

    variant="printed" uses sqrt(A_12 + A_21) per matrix; variant="classical"
    uses the Kolotilina form sqrt(A_12 * A_21).  Both reduce to the weighted
    half-trace when the off-diagonal terms vanish.
    """
    As = [as_square_matrix(A) for A in As]
    p = check_probability_vector(p, len(As))
    for A in As:
        if A.shape[0] != 2:
            raise ValueError("mierczynski_bound_2d requires 2x2 matrices")
        if not is_metzler(A):
            raise ValueError("mierczynski_bound_2d requires Metzler matrices")
    if variant not in ("printed", "classical"):
        raise ValueError(f"unknown variant {variant!r}")
    total = 0.0
    for w, A in zip(p, As):
        if variant == "printed":
            off = np.sqrt(A[0, 1] + A[1, 0])
        else:
            off = np.sqrt(A[0, 1] * A[1, 0])
        total += w * (0.5 * np.trace(A) + off)
    return float(total)
