"""Numba kernels for the Monte-Carlo hot loops.

Each kernel simulates one replicate and is seeded explicitly, so results are
reproducible and independent of how replicates are scheduled across threads
(kernels are compiled with nogil=True).  Dimensions are small (d <= 64), so
everything is written with plain loops over preallocated scratch arrays.
"""

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True, fastmath=False)


@njit(**_JIT)
def _next_mode(rates, i, u):
    """Sample the post-jump mode: j with probability rates[i, j] / rowsum."""
    m = rates.shape[0]
    total = 0.0
    for j in range(m):
        total += rates[i, j]
    target = u * total
    acc = 0.0
    last = i
    for j in range(m):
        r = rates[i, j]
        if r <= 0.0:
            continue
        acc += r
        last = j
        if target < acc:
            return j
    return last


@njit(**_JIT)
def _sphere_drift(A, th, out):
    """out = A th - <A th, th> th; returns the radial rate <A th, th>."""
    d = th.shape[0]
    for r in range(d):
        s = 0.0
        for c in range(d):
            s += A[r, c] * th[c]
        out[r] = s
    q = 0.0
    for r in range(d):
        q += out[r] * th[r]
    for r in range(d):
        out[r] -= q * th[r]
    return q


@njit(**_JIT)
def _rk4_sphere_step(A, th, step, k1, k2, k3, k4, tmp):
    """One RK4 step of the angular flow followed by renormalization."""
    d = th.shape[0]
    _sphere_drift(A, th, k1)
    for r in range(d):
        tmp[r] = th[r] + 0.5 * step * k1[r]
    _sphere_drift(A, tmp, k2)
    for r in range(d):
        tmp[r] = th[r] + 0.5 * step * k2[r]
    _sphere_drift(A, tmp, k3)
    for r in range(d):
        tmp[r] = th[r] + step * k3[r]
    _sphere_drift(A, tmp, k4)
    n = 0.0
    for r in range(d):
        th[r] += step / 6.0 * (k1[r] + 2.0 * k2[r] + 2.0 * k3[r] + k4[r])
        n += th[r] * th[r]
    n = np.sqrt(n)
    for r in range(d):
        th[r] /= n


@njit(**_JIT)
def _radial_rate(A, th):
    d = th.shape[0]
    q = 0.0
    for r in range(d):
        s = 0.0
        for c in range(d):
            s += A[r, c] * th[c]
        q += s * th[r]
    return q


@njit(**_JIT)
def angular_time_average(As, rates, hold, theta0, i0, T, burn, h, seed,
                         orthant):
    """Time average of the radial growth rate along one angular replicate.

    Returns (average, ok) where ok = 0 flags a cone violation beyond 1e-9.
    Switching uses exact exponential holding times; the flow between jumps is
    RK4 on the sphere with per-step renormalization; the growth integrand is
    accumulated by the trapezoid rule on the step grid, restarted at jumps.
    """
    np.random.seed(seed)
    d = theta0.shape[0]
    th = theta0.copy()
    k1 = np.empty(d)
    k2 = np.empty(d)
    k3 = np.empty(d)
    k4 = np.empty(d)
    tmp = np.empty(d)
    t = 0.0
    mode = i0
    acc = 0.0
    acc_time = 0.0
    while t < T:
        if hold[mode] > 0.0:
            dt = np.random.exponential(1.0 / hold[mode])
        else:
            dt = T - t + 1.0
        seg_end = t + dt
        if seg_end > T:
            seg_end = T
        A = As[mode]
        q_prev = _radial_rate(A, th)
        while t < seg_end - 1e-12:
            step = seg_end - t
            if step > h:
                step = h
            _rk4_sphere_step(A, th, step, k1, k2, k3, k4, tmp)
            if orthant:
                for r in range(d):
                    if th[r] < 0.0:
                        if th[r] < -1e-9:
                            return 0.0, 0
                        th[r] = 0.0
            q_new = _radial_rate(A, th)
            t += step
            if t > burn:
                acc += 0.5 * (q_prev + q_new) * step
                acc_time += step
            q_prev = q_new
        t = seg_end
        if t < T:
            mode = _next_mode(rates, mode, np.random.random())
    if acc_time <= 0.0:
        return 0.0, 0
    return acc / acc_time, 1


@njit(**_JIT)
def _rk4_linear_step(A, y, step, k1, k2, k3, k4, tmp):
    """One RK4 step of y' = A y."""
    d = y.shape[0]
    for r in range(d):
        s = 0.0
        for c in range(d):
            s += A[r, c] * y[c]
        k1[r] = s
    for r in range(d):
        tmp[r] = y[r] + 0.5 * step * k1[r]
    for r in range(d):
        s = 0.0
        for c in range(d):
            s += A[r, c] * tmp[c]
        k2[r] = s
    for r in range(d):
        tmp[r] = y[r] + 0.5 * step * k2[r]
    for r in range(d):
        s = 0.0
        for c in range(d):
            s += A[r, c] * tmp[c]
        k3[r] = s
    for r in range(d):
        tmp[r] = y[r] + step * k3[r]
    for r in range(d):
        s = 0.0
        for c in range(d):
            s += A[r, c] * tmp[c]
        k4[r] = s
    for r in range(d):
        y[r] += step / 6.0 * (k1[r] + 2.0 * k2[r] + 2.0 * k3[r] + k4[r])


@njit(**_JIT)
def lognorm_time_average(As, rates, hold, y0, i0, T, renorm_every, h, seed):
    """(1/T) log ||Y_T|| along one replicate of the switched linear flow.

    The state is renormalized to unit length every renorm_every time units
    while the log norm is accumulated.  Returns (average, ok); ok = 0 flags
    overflow past 1e100 between renormalizations.
    """
    np.random.seed(seed)
    d = y0.shape[0]
    y = y0.copy()
    k1 = np.empty(d)
    k2 = np.empty(d)
    k3 = np.empty(d)
    k4 = np.empty(d)
    tmp = np.empty(d)
    t = 0.0
    mode = i0
    log_growth = 0.0
    last_renorm = 0.0
    while t < T:
        if hold[mode] > 0.0:
            dt = np.random.exponential(1.0 / hold[mode])
        else:
            dt = T - t + 1.0
        seg_end = t + dt
        if seg_end > T:
            seg_end = T
        A = As[mode]
        while t < seg_end - 1e-12:
            step = seg_end - t
            if step > h:
                step = h
            _rk4_linear_step(A, y, step, k1, k2, k3, k4, tmp)
            t += step
            n = 0.0
            for r in range(d):
                n += y[r] * y[r]
            n = np.sqrt(n)
            if n > 1e100 or n == 0.0 or not np.isfinite(n):
                return 0.0, 0
            if t - last_renorm >= renorm_every:
                log_growth += np.log(n)
                for r in range(d):
                    y[r] /= n
                last_renorm = t
        t = seg_end
        if t < T:
            mode = _next_mode(rates, mode, np.random.random())
    n = 0.0
    for r in range(d):
        n += y[r] * y[r]
    log_growth += 0.5 * np.log(n)
    return log_growth / T, 1


@njit(**_JIT)
def _sis_drift(C, D, x, out):
    """out = (1 - x) * (C x) - D * x."""
    d = x.shape[0]
    for r in range(d):
        s = 0.0
        for c in range(d):
            s += C[r, c] * x[c]
        out[r] = (1.0 - x[r]) * s - D[r] * x[r]


@njit(**_JIT)
def _rk4_sis_step(C, D, x, step, k1, k2, k3, k4, tmp):
    """One RK4 step of the SIS flow with clamping to the unit cube.

    Returns 0 on an invariance violation beyond 1e-9, 1 otherwise.
    """
    d = x.shape[0]
    _sis_drift(C, D, x, k1)
    for r in range(d):
        tmp[r] = x[r] + 0.5 * step * k1[r]
    _sis_drift(C, D, tmp, k2)
    for r in range(d):
        tmp[r] = x[r] + 0.5 * step * k2[r]
    _sis_drift(C, D, tmp, k3)
    for r in range(d):
        tmp[r] = x[r] + step * k3[r]
    _sis_drift(C, D, tmp, k4)
    for r in range(d):
        x[r] += step / 6.0 * (k1[r] + 2.0 * k2[r] + 2.0 * k3[r] + k4[r])
        if x[r] < 0.0:
            if x[r] < -1e-9:
                return 0
            x[r] = 0.0
        elif x[r] > 1.0:
            if x[r] > 1.0 + 1e-9:
                return 0
            x[r] = 1.0
    return 1


@njit(**_JIT)
def sis_simulate(Cs, Ds, rates, hold, x0, i0, T, h, stride, max_jumps, seed,
                 rec_t, rec_x, rec_mode, jump_t, jump_from, jump_to):
    """Simulate one SIS PDMP path with constant switching rates.

    Records a sample every `stride` RK4 steps and at every jump (post-jump
    state).  Returns (n_rec, n_jump, ok, truncated).
    """
    np.random.seed(seed)
    d = x0.shape[0]
    x = x0.copy()
    k1 = np.empty(d)
    k2 = np.empty(d)
    k3 = np.empty(d)
    k4 = np.empty(d)
    tmp = np.empty(d)
    t = 0.0
    mode = i0
    cap = rec_t.shape[0]
    n_rec = 0
    n_jump = 0
    truncated = 0
    rec_t[0] = 0.0
    for r in range(d):
        rec_x[0, r] = x[r]
    rec_mode[0] = mode
    n_rec = 1
    steps = 0
    while t < T:
        if hold[mode] > 0.0:
            dt = np.random.exponential(1.0 / hold[mode])
        else:
            dt = T - t + 1.0
        seg_end = t + dt
        if seg_end > T:
            seg_end = T
        C = Cs[mode]
        D = Ds[mode]
        while t < seg_end - 1e-12:
            step = seg_end - t
            if step > h:
                step = h
            if _rk4_sis_step(C, D, x, step, k1, k2, k3, k4, tmp) == 0:
                return n_rec, n_jump, 0, truncated
            t += step
            steps += 1
            if steps % stride == 0 and n_rec < cap:
                rec_t[n_rec] = t
                for r in range(d):
                    rec_x[n_rec, r] = x[r]
                rec_mode[n_rec] = mode
                n_rec += 1
        t = seg_end
        if t < T:
            if n_jump >= max_jumps:
                truncated = 1
                break
            j = _next_mode(rates, mode, np.random.random())
            jump_t[n_jump] = t
            jump_from[n_jump] = mode
            jump_to[n_jump] = j
            n_jump += 1
            mode = j
            if n_rec < cap:
                rec_t[n_rec] = t
                for r in range(d):
                    rec_x[n_rec, r] = x[r]
                rec_mode[n_rec] = mode
                n_rec += 1
    if n_rec < cap and rec_t[n_rec - 1] < t:
        rec_t[n_rec] = t
        for r in range(d):
            rec_x[n_rec, r] = x[r]
        rec_mode[n_rec] = mode
        n_rec += 1
    return n_rec, n_jump, 1, truncated


@njit(**_JIT)
def sis_simulate_pair(Cs, Ds, rates, hold, x0, y0, i0, T, h, stride,
                      max_jumps, seed,
                      rec_t, rec_x, rec_y, rec_mode,
                      jump_t, jump_from, jump_to):
    """Synchronously coupled pair: one switching signal drives both states."""
    np.random.seed(seed)
    d = x0.shape[0]
    x = x0.copy()
    y = y0.copy()
    k1 = np.empty(d)
    k2 = np.empty(d)
    k3 = np.empty(d)
    k4 = np.empty(d)
    tmp = np.empty(d)
    t = 0.0
    mode = i0
    cap = rec_t.shape[0]
    n_jump = 0
    truncated = 0
    rec_t[0] = 0.0
    for r in range(d):
        rec_x[0, r] = x[r]
        rec_y[0, r] = y[r]
    rec_mode[0] = mode
    n_rec = 1
    steps = 0
    while t < T:
        if hold[mode] > 0.0:
            dt = np.random.exponential(1.0 / hold[mode])
        else:
            dt = T - t + 1.0
        seg_end = t + dt
        if seg_end > T:
            seg_end = T
        C = Cs[mode]
        D = Ds[mode]
        while t < seg_end - 1e-12:
            step = seg_end - t
            if step > h:
                step = h
            if _rk4_sis_step(C, D, x, step, k1, k2, k3, k4, tmp) == 0:
                return n_rec, n_jump, 0, truncated
            if _rk4_sis_step(C, D, y, step, k1, k2, k3, k4, tmp) == 0:
                return n_rec, n_jump, 0, truncated
            t += step
            steps += 1
            if steps % stride == 0 and n_rec < cap:
                rec_t[n_rec] = t
                for r in range(d):
                    rec_x[n_rec, r] = x[r]
                    rec_y[n_rec, r] = y[r]
                rec_mode[n_rec] = mode
                n_rec += 1

        t = seg_end
        if t < T:
            if n_jump >= max_jumps:
                truncated = 1
                break
            j = _next_mode(rates, mode, np.random.random())
            jump_t[n_jump] = t
            jump_from[n_jump] = mode
            jump_to[n_jump] = j
            n_jump += 1
            mode = j
            if n_rec < cap:
                rec_t[n_rec] = t
                for r in range(d):
                    rec_x[n_rec, r] = x[r]
                    rec_y[n_rec, r] = y[r]
                rec_mode[n_rec] = mode
                n_rec += 1
    if n_rec < cap and rec_t[n_rec - 1] < t:
        rec_t[n_rec] = t
        for r in range(d):
            rec_x[n_rec, r] = x[r]
            rec_y[n_rec, r] = y[r]
        rec_mode[n_rec] = mode
        n_rec += 1
    return n_rec, n_jump, 1, truncated


@njit(**_JIT)
def sis_hitting_time(Cs, Ds, rates, hold, x0, i0, eps, horizon, h, seed):
    """First time ||X_t|| >= eps, or -1.0 when censored at the horizon."""
    np.random.seed(seed)
    d = x0.shape[0]
    x = x0.copy()
    k1 = np.empty(d)
    k2 = np.empty(d)
    k3 = np.empty(d)
    k4 = np.empty(d)
    tmp = np.empty(d)
    t = 0.0
    mode = i0
    n0 = 0.0
    for r in range(d):
        n0 += x[r] * x[r]
    if np.sqrt(n0) >= eps:
        return 0.0
    while t < horizon:
        if hold[mode] > 0.0:
            dt = np.random.exponential(1.0 / hold[mode])
        else:
            dt = horizon - t + 1.0
        seg_end = t + dt
        if seg_end > horizon:
            seg_end = horizon
        C = Cs[mode]
        D = Ds[mode]
        while t < seg_end - 1e-12:
            step = seg_end - t
            if step > h:
                step = h
            _rk4_sis_step(C, D, x, step, k1, k2, k3, k4, tmp)
            t += step
            n = 0.0
            for r in range(d):
                n += x[r] * x[r]
            if np.sqrt(n) >= eps:
                return t
        t = seg_end
        if t < horizon:
            mode = _next_mode(rates, mode, np.random.random())
    return -1.0
