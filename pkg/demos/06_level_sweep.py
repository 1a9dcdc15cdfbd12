"""
Focusing codebook depth
=======================

Each extra focusing level halves the focal-area size, so the knee of the
error distribution moves left by about a factor of two until the direction
estimate becomes the limiting error.
"""
from beamloc.scenario import load_preset
from beamloc.simharness import level_sweep

sc = load_preset("scenario2")
res = level_sweep(sc, [3, 4, 5, 6, 7, 8], 500, 1)
print(f"{'L_r':>4s} {'r_max [cm]':>11s} {'p50 [cm]':>9s} {'p90 [cm]':>9s} {'success':>8s}")
for level, s in res.items():
    print(f"{level:4d} {100 * s.resolution:11.3f} {100 * s.percentiles[50.0]:9.3f} "
          f"{100 * s.percentiles[90.0]:9.3f} {s.success:8.3f}")
