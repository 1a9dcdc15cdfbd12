"""
Robustness to noise
===================

With noise at the receiver, narrow high-level beam-forming beams lose the
power margin that separates the two candidates. Freezing the footprint at a
lower level (the robust codebook) keeps wider, stronger beams.
"""
from beamloc.scenario import load_preset
from beamloc.simharness import noise_sweep

n = 400
dbm = [-110, -90, -70, -60, -50, -40, -30, -10, 20]
for name in ("scenario1", "scenario2"):
    base = load_preset(name)
    bfr = noise_sweep(base, dbm, n, 1)
    rbfr = noise_sweep(base.replace(codebook="rbfr"), dbm, n, 1)
    print(f"\n{name}: probability of success (error <= {100 * base.resolution:.2f} cm)")
    print(f"{'P_n [dBm]':>10s} {'Bfr':>7s} {'R-bfr':>7s}   mean error Bfr / R-bfr")
    for a, b in zip(bfr, rbfr):
        print(f"{a.noise_dbm:10.0f} {a.stats.success:7.3f} {b.stats.success:7.3f}   "
              f"{100 * a.stats.mean:6.2f} / {100 * b.stats.mean:6.2f} cm")
