"""
Tracking a moving user
======================

After three full localizations, the position one slot ahead is extrapolated
from the last three estimates. Only four directions three levels above the
finest and four focal areas at the finest level are probed per slot.
"""
import numpy as np

from beamloc.scenario import load_preset
from beamloc.simharness import run_tracking
from beamloc.tracker import random_trajectory, run_track

sc = load_preset("scenario1-track")
rng = np.random.default_rng(3)
traj = random_trajectory(rng, sc)
print(f"trajectory: {traj.n_slots} slots, {traj.speed:.3f} m per slot, "
      f"{traj.speed * traj.n_slots:.2f} m")

# %%
res = run_track(sc, traj, rng)
print(" slot   true (x, z) [m]     estimate [m]     error [cm]  pilots")
for row in list(res.rows())[:8]:
    _, slot, tx, tz, ex, ez, err, pilots = row
    print(f"{slot:5d}  ({tx:6.3f}, {tz:6.3f})  ({ex:6.3f}, {ez:6.3f})  {100 * err:8.2f}  {pilots:5d}")
print("  ...")

# %%
stats, results = run_tracking(sc, 100, 1)
print(f"\n100 trajectories, {stats.n} epochs: mean {100 * stats.mean:.2f} cm, "
      f"p99.9 {100 * stats.p999:.2f} cm, mean pilots per epoch {stats.mean_pilots:.1f}")
