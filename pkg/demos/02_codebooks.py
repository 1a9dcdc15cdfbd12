"""
Binary-tree codebooks
=====================

Direction search uses a beam-forming codebook whose level l holds 2**l beams
tiling sine-space. Ranging uses a beam-focusing codebook whose level l splits
the distance range into 2**l overlapping focal areas.
"""
import math

from beamloc.beam_model import rayleigh_length
from beamloc.codebook import ArrayGeometry, build_bfc, build_bfr, build_rbfr, entry_codewords

geom = ArrayGeometry.half_wavelength(1024, 150e9)
bfr = build_bfr(geom)
rbfr = build_rbfr(bfr, freeze_level=7)

# %%
# Footprints grow with the level; the robust variant stops growing at level 7,
# which keeps its Rayleigh length short and the beams wider.
print("level  beams   w Bfr [cm]  w R-bfr [cm]  z_R R-bfr [m]")
for level in range(1, bfr.L + 1):
    w_a = bfr.footprints(level)[0]
    w_b = rbfr.footprints(level)[0]
    print(f"{level:5d} {2**level:6d} {100 * w_a:11.3f} {100 * w_b:13.3f} "
          f"{rayleigh_length(w_b, geom.k):14.3f}")

# %%
# Only the beams covering +-25 degrees are used at the entry level.
entry = entry_codewords(bfr, 4, math.radians(25))
print("\nentry beams at level 4:", entry)
print("their angles [deg]:", [round(math.degrees(bfr.angles(4)[i - 1]), 2) for i in entry])

# %%
# Focal areas for a 5 m deep area of interest with overlap coefficient 0.3.
bfc = build_bfc(5.0, 0.3, 6, geom.k)
print("\nlevel  areas  r_max [m]   first d_f   last d_f")
for level in range(1, bfc.L + 1):
    d = bfc.distances(level)
    print(f"{level:5d} {d.size:6d} {bfc.radius(level):10.5f} {d[0]:11.4f} {d[-1]:10.4f}")

# %%
# Each codeword stores the intended focus and footprint that realise it.
for c in bfc.codewords(2):
    print(f"  level {c.level} #{c.index}: d_f {c.d_f:.4f} m -> f_0 {c.f_0:.4f} m, "
          f"w {100 * c.w_x:.3f} cm")
