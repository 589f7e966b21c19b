"""Persistence and extinction diagnostics on simulated trajectories.

Time-weighted occupation histograms and their mass near the extinction
state, inverse-norm tail moments, trailing-window extinction-rate fits,
first-passage times away from the extinction state, and the synchronous
coupling part-metric contraction experiment.
"""

from dataclasses import dataclass

import numpy as np

from . import engine, matrixcore
from .engine import derive_seed


@dataclass
class OccupationHistogram:
    """Time mass spent per (grid cell, mode)."""

    edges: list                 # per-axis bin edges
    weights: np.ndarray         # (cells, ..., cells, modes) time mass
    total_time: float
    lo: np.ndarray
    hi: np.ndarray

    @property
    def cells_per_axis(self):
        return self.weights.shape[0]

    @property
    def n_modes(self):
        return self.weights.shape[-1]

    def normalized(self):
        return self.weights / self.total_time

    def mode_marginal(self):
        axes = tuple(range(self.weights.ndim - 1))
        return self.weights.sum(axis=axes) / self.total_time

    def cell_centers(self):
        return [0.5 * (e[:-1] + e[1:]) for e in self.edges]


@dataclass
class ExtinctionFit:
    slope: float
    intercept: float
    r_squared: float
    window: tuple


@dataclass
class HittingTimeSample:
    threshold: float
    times: np.ndarray           # first-passage time, horizon when censored
    censored: np.ndarray        # boolean flags

    def geometric_moments(self, bases=(1.01, 1.05, 1.1)):
        """Censored-aware lower bounds on E[b^tau] for a grid of bases."""
        return {b: float(np.mean(b ** self.times)) for b in bases}


def occupation_measure(traj, cells_per_axis, lo=None, hi=None, burn_in=0.0):
    """Time-weighted histogram of (X_t, I_t) on a uniform box grid.

    Each inter-sample interval contributes half its duration at each
    endpoint (trapezoidal weighting).  Normalizing by total_time yields a
    probability on cells x modes.
    """
    if len(traj.times) < 2:
        raise ValueError("trajectory must contain at least two samples")
    d = traj.dim
    if lo is None:
        lo = np.zeros(d)
    if hi is None:
        hi = np.ones(d)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    n_modes = int(traj.modes.max()) + 1
    edges = [np.linspace(lo[k], hi[k], cells_per_axis + 1) for k in range(d)]
    weights = np.zeros((cells_per_axis,) * d + (n_modes,))

    mask = traj.times >= burn_in
    times = traj.times[mask]
    states = traj.states[mask]
    modes = traj.modes[mask]
    if len(times) < 2:
        raise ValueError("no samples after burn-in")
    dts = np.diff(times)
    w = np.zeros(len(times))
    w[:-1] += 0.5 * dts
    w[1:] += 0.5 * dts

    idx = np.empty((len(times), d), dtype=np.int64)
    for k in range(d):
        idx[:, k] = np.clip(
            np.searchsorted(edges[k], states[:, k], side="right") - 1,
            0, cells_per_axis - 1)
    flat = np.ravel_multi_index(
        tuple(idx[:, k] for k in range(d)) + (modes,), weights.shape)
    np.add.at(weights.reshape(-1), flat, w)
    total = float(times[-1] - times[0])
    if abs(weights.sum() - total) > 1e-9 * max(total, 1.0):
        raise RuntimeError("histogram mass does not match elapsed time")
    return OccupationHistogram(edges, weights, total, lo, hi)


def ball_mass(hist, r):
    """Normalized occupation mass of cells whose centers lie within distance
    r of the origin, summed over modes."""
    if r <= 0.0:
        raise ValueError("radius must be positive")
    centers = hist.cell_centers()
    grids = np.meshgrid(*centers, indexing="ij")
    dist2 = sum(g ** 2 for g in grids)
    inside = dist2 <= r * r
    return float(hist.weights[inside].sum() / hist.total_time)


def tail_moment(traj, theta, burn_in=0.0):
    """Time average of ||X_t||^(-theta) by the trapezoid rule.

    Returns inf when the path touches the origin exactly.
    """
    if theta <= 0.0:
        raise ValueError("theta must be positive")
    mask = traj.times >= burn_in
    times = traj.times[mask]
    norms = np.linalg.norm(traj.states[mask], axis=1)
    if np.any(norms == 0.0):
        return np.inf
    vals = norms ** (-theta)
    return float(np.trapezoid(vals, times) / (times[-1] - times[0]))


def tail_moment_sweep(traj, thetas=(0.05, 0.1, 0.2, 0.5), burn_in=0.0):
    return {th: tail_moment(traj, th, burn_in) for th in thetas}


def extinction_rate(traj, window_fraction=0.5, center=None):
    """Least-squares slope of log ||X_t - center|| over the trailing window.

    The slope estimates the almost-sure exponential rate; r^2 reports fit
    quality.  center defaults to the origin.
    """
    if not 0.0 < window_fraction <= 1.0:
        raise ValueError("window_fraction must be in (0, 1]")
    t0 = traj.times[-1] * (1.0 - window_fraction)
    mask = traj.times >= t0
    times = traj.times[mask]
    states = traj.states[mask]
    if center is not None:
        states = states - np.asarray(center, dtype=float)
    norms = np.linalg.norm(states, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("zero state in the fit window; shorten the horizon")
    y = np.log(norms)
    slope, intercept = np.polyfit(times, y, 1)
    pred = slope * times + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return ExtinctionFit(float(slope), float(intercept), float(np.clip(r2, 0.0, 1.0)),
                         (float(t0), float(traj.times[-1])))


def hitting_times(system, x0_list, i0, epsilon, horizon, N, seed,
                  config=None):
    """First-passage times of ||X_t|| past epsilon over N replicates.

    Initial conditions cycle through x0_list; runs that never pass epsilon
    are censored at the horizon (flagged, time set to the horizon).
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    if config is None:
        config = engine.IntegratorConfig()
    fast = engine._fast_path(system, config)
    times = np.empty(N)
    censored = np.zeros(N, dtype=bool)
    if fast:
        Cs, Ds = engine._sis_arrays(system)
        rates = system.rates
        hold = rates.sum(axis=1)
    for k in range(N):
        x0 = np.asarray(x0_list[k % len(x0_list)], dtype=float)
        if fast:
            t = _kernels_hit(Cs, Ds, rates, hold, x0, int(i0), epsilon,
                             horizon, config.step, derive_seed(seed, k))
        else:
            traj = engine.simulate(system, x0, i0, horizon, derive_seed(seed, k),
                                   config)
            norms = np.linalg.norm(traj.states, axis=1)
            hits = np.nonzero(norms >= epsilon)[0]
            t = float(traj.times[hits[0]]) if len(hits) else -1.0
        if t < 0.0:
            times[k] = horizon
            censored[k] = True
        else:
            times[k] = t
    return HittingTimeSample(epsilon, times, censored)


def _kernels_hit(Cs, Ds, rates, hold, x0, i0, eps, horizon, h, seed):
    from . import _kernels
    return _kernels.sis_hitting_time(Cs, Ds, rates, hold, x0, i0, eps,
                                     float(horizon), h, seed)


@dataclass
class ContractionCurve:
    times: np.ndarray
    mean_distance: np.ndarray
    stderr: np.ndarray
    excluded: int               # replicates that escaped the part
    log_slope: float            # slope of log mean distance, trailing half


def part_metric_contraction(system, x0, y0, T, N, seed, i0=0, config=None,
                            n_grid=51):
    """Mean part-metric distance between synchronously coupled trajectories.

    Runs N coupled pairs, reports the mean distance on a uniform time grid
    and the trailing-half slope of its log.  Replicates whose states leave
    the common part are excluded and counted.
    """
    if config is None:
        config = engine.IntegratorConfig()
    x0 = np.asarray(x0, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    if not np.isfinite(matrixcore.part_metric(x0, y0)):
        raise ValueError("x0 and y0 must lie in the same part")
    grid = np.linspace(0.0, T, n_grid)
    curves = []
    excluded = 0
    for k in range(N):
        tx, ty = engine.simulate_synchronous_pair(
            system, x0, y0, int(i0), T, derive_seed(seed, k), config)
        vals = np.empty(n_grid)
        ok = True
        for g, tg in enumerate(grid):
            i = int(np.searchsorted(tx.times, tg, side="right")) - 1
            p = matrixcore.part_metric(tx.states[i], ty.states[i])
            if not np.isfinite(p):
                ok = False
                break
            vals[g] = p
        if ok:
            curves.append(vals)
        else:
            excluded += 1
    if not curves:
        raise RuntimeError("every replicate escaped the part")
    arr = np.array(curves)
    mean = arr.mean(axis=0)
    stderr = arr.std(axis=0, ddof=1) / np.sqrt(len(arr)) if len(arr) > 1 \
        else np.zeros(n_grid)
    tail = grid >= T / 2.0
    pos = mean[tail] > 0.0
    if pos.sum() >= 2:
        slope = float(np.polyfit(grid[tail][pos], np.log(mean[tail][pos]), 1)[0])
    else:
        slope = -np.inf
    return ContractionCurve(grid, mean, stderr, excluded, slope)


def contraction_curve_to_csv(curve, fh):
    fh.write("t,mean_p,stderr,excluded\n")
    for t, m, s in zip(curve.times, curve.mean_distance, curve.stderr):
        fh.write(f"{format(t, '.17g')},{format(m, '.17g')},"
                 f"{format(s, '.17g')},{curve.excluded}\n")


def occupation_to_csv(hist, fh):
    d = hist.weights.ndim - 1
    fh.write(",".join(f"cell{k + 1}" for k in range(d)) + ",mode,mass\n")
    for idx in np.ndindex(hist.weights.shape):
        mass = hist.weights[idx]
        if mass > 0.0:
            fh.write(",".join(str(i) for i in idx) +
                     f",{format(mass, '.17g')}\n")
