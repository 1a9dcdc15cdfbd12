"""
Two-phase localization
======================

Phase 1 finds the direction with beam-forming codewords, Phase 2 finds the
distance with beam-focusing codewords steered along that direction. We trace
one receiver, then compare error distributions over random receivers.
"""
import math

import numpy as np

from beamloc.localizer import RxGroundTruth, localize
from beamloc.scenario import load_preset
from beamloc.simharness import run_campaign

sc = load_preset("scenario1")
rx = RxGroundTruth(math.radians(12.0), 3.3)

# %%
est, trace = localize(sc, rx, rng=np.random.default_rng(0))
for step in trace.steps:
    name = "direction" if step.phase == 1 else "range"
    print(f"{name:9s} level {step.level:2d}: candidates {list(step.candidates)} -> {step.chosen}")
print(f"estimate theta {math.degrees(est.theta_hat):.3f} deg, d {est.d_hat:.4f} m; "
      f"error {100 * est.error:.2f} cm with {trace.pilots} pilots "
      f"(exhaustive search would use {2**sc.L_t + 2**sc.L_r})")

# %%
# Random receivers, uniform in angle and range. Ideal mode always picks the
# codeword nearest the truth, so it isolates the codebook quantisation.
n = 2000
print(f"\n{'mode':15s} {'mean':>8s} {'p50':>8s} {'p99.9':>8s} {'max':>8s}  success")
for mode in ("ideal", "measured", "perfect_phase1"):
    s = run_campaign(sc, n, 1, mode=mode)
    print(f"{mode:15s} {100 * s.mean:7.2f}c {100 * s.percentiles[50.0]:7.2f}c "
          f"{100 * s.p999:7.2f}c {100 * s.max:7.2f}c  {s.success:.3f}")

# %%
# Doubling the depth of the area doubles the error at the same codebook depth.
s2 = run_campaign(load_preset("scenario2"), n, 1)
print(f"\n10 m area: mean {100 * s2.mean:.2f} cm")

# %%
# One more focusing level restores the resolution.
s2b = run_campaign(load_preset("scenario2").with_depths(L_t=11, L_r=7), n, 1)
print(f"10 m area, one extra level each: mean {100 * s2b.mean:.2f} cm")
