"""Persistence and extinction diagnostics on simulated paths.

Extinction regime: the log of the distance to the disease-free state falls
linearly and the occupation measure piles up near zero.  Persistent regime:
mass stays away from zero, escape from small initial infections is fast,
and synchronously coupled pairs contract in the part metric.
"""

import numpy as np

from randswitch import (simulate, occupation_measure, ball_mass,
                        hitting_times, part_metric_contraction)
from randswitch.scenarios import get, decay_fit

ext = get("ainscosta")
traj = simulate(ext.system(20.0), ext.x0, 0, 500.0, seed=7)
fit = decay_fit(traj)
hist = occupation_measure(traj, 64, burn_in=50.0)
print("extinction regime:")
print(f"  decay slope of log||X_t||: {fit.slope:+.3f} (r^2={fit.r_squared:.5f})")
print(f"  occupation mass within 0.02 of zero: {ball_mass(hist, 0.02):.3f}")

per = get("astacoins")
system = per.system(20.0)
traj = simulate(system, per.x0, 0, 500.0, seed=7)
hist = occupation_measure(traj, 64, burn_in=50.0)
print("\npersistent regime:")
print(f"  occupation mass within 0.02 of zero: {ball_mass(hist, 0.02):.3f}")

ht = hitting_times(system, [np.array([1e-3, 1e-3])], 0, epsilon=0.05,
                   horizon=200.0, N=200, seed=8)
print(f"  escape past 0.05 from a tiny infection: mean {ht.times.mean():.2f} "
      f"time units, censored {int(ht.censored.sum())}/200")

curve = part_metric_contraction(system, np.array([0.4, 0.3]),
                                np.array([0.2, 0.6]), T=50.0, N=20, seed=9)
print(f"  coupled pairs: part distance {curve.mean_distance[0]:.3f} -> "
      f"{curve.mean_distance[-1]:.2e}, log-slope {curve.log_slope:+.3f}")
