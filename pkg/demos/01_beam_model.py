"""
Focused Gaussian beams
======================

A beam focused at an intended distance f_0 concentrates its power in a focal
area whose centre d_f and half-length r_max follow from f_0 and the Rayleigh
length. Here we look at that area on broadside, invert it, and compare a
collimated beam.
"""
import math

import numpy as np

from beamloc.beam_model import (
    INFINITE,
    FocusedBeam,
    PlanePoint,
    beamwidth_3db,
    density_kernel,
    focal_distance,
    focal_major_radius,
    invert_focus,
    power_density,
    rayleigh_length,
    wavelength,
)

lam = wavelength(150e9)
k = 2 * math.pi / lam
print(f"carrier 150 GHz, wavelength {lam * 1e3:.4f} mm")

# %%
# Ask for a focal area centred at 1.25 m with half-length 0.75 m.
f_0, w = invert_focus(1.25, 0.75, k)
z_R = rayleigh_length(w, k)
print(f"f_0 = {f_0:.3f} m, footprint w = {w * 100:.3f} cm, z_R = {z_R:.3f} m")
print(f"back through the forward map: d_f = {focal_distance(f_0, z_R):.6f} m, "
      f"r_max = {focal_major_radius(f_0, z_R):.6f} m")

# %%
# Power along broadside peaks at d_f and halves at d_f +- r_max.
beam = FocusedBeam(1.0, w, w, 0.0, f_0, lam)
peak = power_density(beam, PlanePoint(0.0, 1.25))
for z in (0.25, 1.25 - 0.75, 1.0, 1.25, 1.5, 1.25 + 0.75, 3.0):
    s = power_density(beam, PlanePoint(0.0, z))
    print(f"  z = {z:4.2f} m   S/S_peak = {s / peak:.3f}")

# %%
# Steering the same beam to 20 degrees moves the focal spot along the new axis.
theta = math.radians(20)
d = np.linspace(0.2, 3.0, 2801)
s = density_kernel(1.0, w, w, theta, 1 / f_0, k, d * math.sin(theta), d * math.cos(theta))
print(f"steered to 20 deg, on-axis maximum at {d[np.argmax(s)]:.3f} m")

# %%
# A collimated beam (f_0 at infinity) of the same footprint keeps its width
# until about z_R and then spreads at the 3 dB beamwidth.
flat = FocusedBeam(1.0, w, w, 0.0, INFINITE, lam)
print(f"collimated beam: 3 dB beamwidth {math.degrees(beamwidth_3db(w, lam)):.3f} deg")
for z in (0.5, z_R, 10 * z_R):
    x = np.linspace(-1, 1, 20001)
    prof = density_kernel(1.0, w, w, 0.0, flat.inv_f_0, k, x, z)
    half = x[prof >= prof.max() / 2]
    print(f"  z = {z:7.3f} m   half-power width {100 * (half[-1] - half[0]):.2f} cm")
