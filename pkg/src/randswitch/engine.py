"""Simulation engine for randomly switched ODE systems.

The process Z = (X, I): X follows the vector field selected by the current
mode I between jumps, and I jumps with rates a_ij (constant, or a continuous
function of the state).  Jump clocks are exact in law: exponential holding
times in the constant-rate case, thinning against a constant majorant in the
state-dependent case.  The deterministic flow uses classical fixed-step RK4.

Seed policy: a simulation seed `s` and replicate index `k` derive an
independent stream via numpy's SeedSequence([s, k]); batch estimators
elsewhere rely on this rule, so replicate results do not depend on how the
batch is scheduled.
"""

import io
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .vectorfields import SISField, SwitchedFieldFamily
from .matrixcore import check_rate_matrix, is_irreducible


class InvarianceError(RuntimeError):
    """A trajectory left the invariant domain beyond the clamp tolerance."""


CLAMP_TOL = 1e-9


def derive_seed(seed, replicate=0):
    """uint32 stream seed for a (simulation seed, replicate index) pair."""
    return int(np.random.SeedSequence([int(seed), int(replicate)]).generate_state(1)[0])


@dataclass
class IntegratorConfig:
    step: float = 1e-3          # RK4 step (time units)
    stride: int = 10            # record every stride-th step
    max_jumps: int = 10_000_000

    def __post_init__(self):
        if self.step <= 0.0:
            raise ValueError("step must be positive")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")


@dataclass
class Trajectory:
    """A sampled PDMP path: states at sample times, right-continuous modes,
    and the exact jump events."""

    times: np.ndarray           # increasing sample times
    states: np.ndarray          # (n, d) states at sample times
    modes: np.ndarray           # mode after each sample time
    jump_times: np.ndarray
    jump_from: np.ndarray
    jump_to: np.ndarray
    seed: int
    truncated: bool = False

    @property
    def dim(self):
        return self.states.shape[1]

    @property
    def n_jumps(self):
        return len(self.jump_times)


def trajectory_to_csv(traj, fh=None):
    """Write a trajectory as CSV `t,mode,x1,...,xd`.

    Jump rows appear twice at the same time: first with the pre-jump mode,
    then with the post-jump mode.  Floats carry 17 significant digits.
    """
    own = fh is None
    if own:
        fh = io.StringIO()
    d = traj.dim
    fh.write("t,mode," + ",".join(f"x{i + 1}" for i in range(d)) + "\n")
    jumps = {float(t): (int(a), int(b)) for t, a, b in
             zip(traj.jump_times, traj.jump_from, traj.jump_to)}
    for t, mode, x in zip(traj.times, traj.modes, traj.states):
        row = ",".join(format(v, ".17g") for v in x)
        if float(t) in jumps:
            pre, post = jumps[float(t)]
            fh.write(f"{format(t, '.17g')},{pre},{row}\n")
            fh.write(f"{format(t, '.17g')},{post},{row}\n")
        else:
            fh.write(f"{format(t, '.17g')},{int(mode)},{row}\n")
    if own:
        return fh.getvalue()
    return None


@dataclass
class SwitchedSystem:
    """A field family plus switching rates (constant matrix or x -> matrix)."""

    family: SwitchedFieldFamily
    rates: object               # (m, m) array, or callable x -> (m, m) array
    majorant_safety: float = 1.1

    def __post_init__(self):
        if not callable(self.rates):
            self.rates = check_rate_matrix(self.rates)
            if self.rates.shape[0] != self.family.n_modes:
                raise ValueError("rate matrix size must match the number of modes")
            if not is_irreducible(self.rates):
                raise ValueError("constant rate matrix must be irreducible")

    @property
    def constant_rates(self):
        return not callable(self.rates)

    def rates_at(self, x):
        if self.constant_rates:
            return self.rates
        return check_rate_matrix(self.rates(np.asarray(x, dtype=float)))

    def rate_majorant(self, cells_per_axis=32):
        """Upper bound on the total jump rate over a domain grid, inflated by
        the safety factor.  Used as the thinning majorant."""
        if self.constant_rates:
            return float(np.max(self.rates.sum(axis=1)))
        d = self.family.dim
        n = cells_per_axis if d <= 3 else max(2, int(round(32768 ** (1.0 / d))))
        axes = [np.linspace(lo, hi, n) for lo, hi in
                zip(self.family.lo, self.family.hi)]
        best = 0.0
        for idx in np.ndindex(*([n] * d)):
            x = np.array([axes[k][idx[k]] for k in range(d)])
            best = max(best, float(np.max(self.rates_at(x).sum(axis=1))))
        return best * self.majorant_safety


def integrate_flow(fld, x0, t, h, lo=None, hi=None):
    """Integrate x' = F(x) for duration t with fixed-step RK4 (step h, final
    partial step lands exactly at t).  If a box is given, components beyond
    it by at most CLAMP_TOL are clamped; larger overshoot raises."""
    if t < 0.0:
        raise ValueError("duration must be nonnegative")
    x = np.asarray(x0, dtype=float).copy()
    remaining = float(t)
    while remaining > 1e-15:
        step = min(h, remaining)
        k1 = fld(x)
        k2 = fld(x + 0.5 * step * k1)
        k3 = fld(x + 0.5 * step * k2)
        k4 = fld(x + step * k3)
        x = x + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if lo is not None:
            x = _clamp(x, lo, hi, fld)
        remaining -= step
    return x


def _clamp(x, lo, hi, fld=None):
    below = lo - x
    above = x - hi
    worst = max(float(below.max(initial=0.0)), float(above.max(initial=0.0)))
    if worst > CLAMP_TOL:
        raise InvarianceError(
            f"state {x} left the domain by {worst:.3e} under field {fld!r}")
    return np.minimum(np.maximum(x, lo), hi)


def simulate_mode_chain(Q, i0, T, seed):
    """Simulate the autonomous mode chain with constant rates Q.

    Returns (times, modes): times[0] = 0 and times[k] is the k-th jump time;
    modes[k] is the mode on [times[k], times[k+1]).
    """
    Q = check_rate_matrix(Q)
    hold = Q.sum(axis=1)
    if np.any(hold == 0.0):
        raise ValueError(f"mode {int(np.argmin(hold > 0))} is absorbing (zero row)")
    rng = np.random.default_rng(derive_seed(seed))
    times = [0.0]
    modes = [int(i0)]
    t = 0.0
    i = int(i0)
    while True:
        t += rng.exponential(1.0 / hold[i])
        if t >= T:
            break
        p = Q[i] / hold[i]
        i = int(rng.choice(len(p), p=p))
        times.append(t)
        modes.append(i)
    return np.array(times), np.array(modes, dtype=np.int64)


def _sis_arrays(system):
    Cs = np.stack([f.C for f in system.family.fields])
    Ds = np.stack([f.D for f in system.family.fields])
    return np.ascontiguousarray(Cs), np.ascontiguousarray(Ds)


def _alloc(system, T, config):
    hold_max = float(np.max(system.rates.sum(axis=1)))
    n_steps = int(np.ceil(T / config.step)) + 1
    exp_jumps = int(hold_max * T)
    jump_cap = min(config.max_jumps, 3 * exp_jumps + 1000)
    rec_cap = n_steps // config.stride + jump_cap + 16
    return jump_cap, rec_cap


def _fast_path(system, config):
    return (system.constant_rates
            and all(isinstance(f, SISField) for f in system.family.fields))


def simulate(system, x0, i0, T, seed, config=None):
    """Simulate the switched system Z = (X, I) on [0, T].

    Constant rates use exact exponential jump clocks; state-dependent rates
    use thinning against the grid-estimated majorant (runtime-checked).
    Deterministic given (system, x0, i0, T, seed, config).
    """
    if config is None:
        config = IntegratorConfig()
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (system.family.dim,):
        raise ValueError("x0 dimension mismatch")
    _clamp(x0, system.family.lo, system.family.hi)
    if _fast_path(system, config):
        return _simulate_sis(system, x0, i0, T, seed, config)
    return _simulate_generic(system, x0, i0, T, seed, config)


def _simulate_sis(system, x0, i0, T, seed, config):
    Cs, Ds = _sis_arrays(system)
    rates = system.rates
    hold = rates.sum(axis=1)
    jump_cap, rec_cap = _alloc(system, T, config)
    d = system.family.dim
    rec_t = np.empty(rec_cap)
    rec_x = np.empty((rec_cap, d))
    rec_mode = np.empty(rec_cap, dtype=np.int64)
    jt = np.empty(jump_cap)
    jf = np.empty(jump_cap, dtype=np.int64)
    jto = np.empty(jump_cap, dtype=np.int64)
    n_rec, n_jump, ok, truncated = _kernels.sis_simulate(
        Cs, Ds, rates, hold, x0, int(i0), float(T), config.step,
        config.stride, jump_cap, derive_seed(seed),
        rec_t, rec_x, rec_mode, jt, jf, jto)
    if not ok:
        raise InvarianceError("trajectory left the unit cube beyond tolerance")
    return Trajectory(rec_t[:n_rec].copy(), rec_x[:n_rec].copy(),
                      rec_mode[:n_rec].copy(), jt[:n_jump].copy(),
                      jf[:n_jump].copy(), jto[:n_jump].copy(),
                      seed=int(seed), truncated=bool(truncated))


def _simulate_generic(system, x0, i0, T, seed, config):
    rng = np.random.default_rng(derive_seed(seed))
    lo, hi = system.family.lo, system.family.hi
    fld = system.family.fields
    x = x0.copy()
    mode = int(i0)
    t = 0.0
    times = [0.0]
    states = [x.copy()]
    modes = [mode]
    jt, jf, jto = [], [], []
    truncated = False
    lam_bar = system.rate_majorant() if not system.constant_rates else None
    sample_dt = config.step * config.stride
    next_sample = sample_dt

    def advance(duration):
        nonlocal x, t
        x = integrate_flow(fld[mode], x, duration, config.step, lo, hi)
        t += duration

    while t < T:
        if system.constant_rates:
            hold = float(system.rates[mode].sum())
            if hold == 0.0:
                # only reachable with a single mode (irreducibility is
                # enforced for m >= 2): pure flow, no jumps
                dt = T - t + 1.0
            else:
                dt = rng.exponential(1.0 / hold)
            accept = True
        else:
            dt = rng.exponential(1.0 / lam_bar)
            accept = None     # decided at the candidate time
        seg_end = min(t + dt, T)
        while t < seg_end - 1e-12:
            chunk = min(seg_end - t, next_sample - t)
            advance(chunk)
            if t >= next_sample - 1e-12:
                times.append(t)
                states.append(x.copy())
                modes.append(mode)
                next_sample += sample_dt
        if seg_end >= T:
            break
        if accept is None:
            row = system.rates_at(x)[mode]
            total = float(row.sum())
            if total > lam_bar:
                raise RuntimeError(
                    f"thinning majorant {lam_bar:.6g} violated at x={x} "
                    f"(total rate {total:.6g}); increase majorant_safety")
            accept = rng.random() < total / lam_bar
            weights = row / total if total > 0.0 else None
        else:
            row = system.rates[mode]
            weights = row / row.sum()
        if accept:
            if len(jt) >= config.max_jumps:
                truncated = True
                break
            new_mode = int(rng.choice(len(weights), p=weights))
            jt.append(t)
            jf.append(mode)
            jto.append(new_mode)
            mode = new_mode
            times.append(t)
            states.append(x.copy())
            modes.append(mode)
    if times[-1] < t:
        times.append(t)
        states.append(x.copy())
        modes.append(mode)
    return Trajectory(np.array(times), np.array(states),
                      np.array(modes, dtype=np.int64), np.array(jt),
                      np.array(jf, dtype=np.int64), np.array(jto, dtype=np.int64),
                      seed=int(seed), truncated=truncated)


def simulate_synchronous_pair(system, x0, y0, i0, T, seed, config=None):
    """Two trajectories driven by the same switching signal (constant rates).

    Both share jump times and modes; each state follows its own flow.
    """
    if not system.constant_rates:
        raise ValueError("synchronous coupling requires constant rates")
    if config is None:
        config = IntegratorConfig()
    x0 = np.asarray(x0, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    if _fast_path(system, config):
        Cs, Ds = _sis_arrays(system)
        rates = system.rates
        hold = rates.sum(axis=1)
        jump_cap, rec_cap = _alloc(system, T, config)
        d = system.family.dim
        rec_t = np.empty(rec_cap)
        rec_x = np.empty((rec_cap, d))
        rec_y = np.empty((rec_cap, d))
        rec_mode = np.empty(rec_cap, dtype=np.int64)
        jt = np.empty(jump_cap)
        jf = np.empty(jump_cap, dtype=np.int64)
        jto = np.empty(jump_cap, dtype=np.int64)
        n_rec, n_jump, ok, truncated = _kernels.sis_simulate_pair(
            Cs, Ds, rates, hold, x0, y0, int(i0), float(T), config.step,
            config.stride, jump_cap, derive_seed(seed),
            rec_t, rec_x, rec_y, rec_mode, jt, jf, jto)
        if not ok:
            raise InvarianceError("trajectory left the unit cube beyond tolerance")
        common = dict(seed=int(seed), truncated=bool(truncated))
        tx = Trajectory(rec_t[:n_rec].copy(), rec_x[:n_rec].copy(),
                        rec_mode[:n_rec].copy(), jt[:n_jump].copy(),
                        jf[:n_jump].copy(), jto[:n_jump].copy(), **common)
        ty = Trajectory(rec_t[:n_rec].copy(), rec_y[:n_rec].copy(),
                        rec_mode[:n_rec].copy(), jt[:n_jump].copy(),
                        jf[:n_jump].copy(), jto[:n_jump].copy(), **common)
        return tx, ty
    # generic path: simulate the mode chain once, then flow both states
    jump_times, chain = simulate_mode_chain(system.rates, i0, T, seed)
    lo, hi = system.family.lo, system.family.hi

    def flow_along(z0):
        z = np.asarray(z0, dtype=float).copy()
        times = [0.0]
        states = [z.copy()]
        modes = [int(i0)]
        seg = list(jump_times[1:]) + [T]
        t_prev = 0.0
        for k, t_next in enumerate(seg):
            fld = system.family.fields[int(chain[k])]
            z = integrate_flow(fld, z, t_next - t_prev, config.step, lo, hi)
            times.append(t_next)
            states.append(z.copy())
            modes.append(int(chain[min(k + 1, len(chain) - 1)]))
            t_prev = t_next
        return times, states, modes

    jt = jump_times[1:]
    jf = chain[:-1] if len(chain) > 1 else np.array([], dtype=np.int64)
    jto = chain[1:] if len(chain) > 1 else np.array([], dtype=np.int64)
    out = []
    for z0 in (x0, y0):
        times, states, modes = flow_along(z0)
        out.append(Trajectory(np.array(times), np.array(states),
                              np.array(modes, dtype=np.int64), np.array(jt),
                              np.array(jf), np.array(jto), seed=int(seed)))
    return out[0], out[1]
