"""Analytic Gaussian beam model for beam-forming and beam-focusing.

All quantities are SI (metres, watts, radians). A beam is either focused at a
finite intended focal distance ``f_0`` or collimated (beam-forming), which is
represented by :data:`INFINITE` rather than a large float.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

SPEED_OF_LIGHT = 299_792_458.0


class Focus(enum.Enum):
    """Marker for a beam focused at infinity, i.e. plain beam-forming."""

    INFINITE = "infinite"

    def __repr__(self) -> str:
        return "INFINITE"


INFINITE = Focus.INFINITE


def wavelength(f_c: float) -> float:
    """Free-space wavelength in metres for carrier frequency ``f_c`` in Hz."""
    if f_c <= 0:
        raise DomainError(f"carrier frequency must be positive, got {f_c}")
    return SPEED_OF_LIGHT / f_c


def wavenumber(f_c: float) -> float:
    return 2.0 * math.pi / wavelength(f_c)


def dbm_to_watts(p_dbm: float) -> float:
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_w: float) -> float:
    return 10.0 * math.log10(p_w) + 30.0


def db_to_linear(g_db: float) -> float:
    return 10.0 ** (g_db / 10.0)


def _positive(name: str, value: float) -> None:
    if not value > 0:
        raise DomainError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class FocusedBeam:
    """Transmit-side parameters of one Gaussian beam.

    Parameters
    ----------
    P_t : float
        Transmit power in watts.
    w_x, w_y : float
        Horizontal and vertical footprint radii on the panel (m).
    theta_r : float
        Steering angle on the xz-plane (rad), 0 is broadside.
    f_0 : float or Focus
        Intended focal distance (m), or :data:`INFINITE` for beam-forming.
    wavelength : float
        Carrier wavelength (m).
    """

    P_t: float
    w_x: float
    w_y: float
    theta_r: float
    f_0: float | Focus
    wavelength: float

    def __post_init__(self) -> None:
        _positive("P_t", self.P_t)
        _positive("w_x", self.w_x)
        _positive("w_y", self.w_y)
        _positive("wavelength", self.wavelength)
        if self.f_0 is not INFINITE:
            if isinstance(self.f_0, Focus) or not float(self.f_0) > 0:
                raise DomainError(f"f_0 must be positive or INFINITE, got {self.f_0!r}")
        if not abs(self.theta_r) < math.pi / 2:
            raise DomainError(f"|theta_r| must be below pi/2, got {self.theta_r}")

    @property
    def k(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def is_forming(self) -> bool:
        return self.f_0 is INFINITE

    @property
    def inv_f_0(self) -> float:
        """Reciprocal focal distance; zero for beam-forming."""
        return 0.0 if self.f_0 is INFINITE else 1.0 / float(self.f_0)


@dataclass(frozen=True)
class PlanePoint:
    x: float
    z: float

    def __post_init__(self) -> None:
        if self.z < 0:
            raise DomainError(f"z must be non-negative, got {self.z}")


@dataclass(frozen=True)
class ReceiverAperture:
    """Receiver antenna with linear gain ``G_r`` at the given wavelength."""

    G_r: float
    wavelength: float

    def __post_init__(self) -> None:
        _positive("G_r", self.G_r)
        _positive("wavelength", self.wavelength)

    @property
    def A_r(self) -> float:
        return self.G_r * self.wavelength**2 / (4.0 * math.pi)


@dataclass(frozen=True)
class FocusGeometry:
    d_f: float
    r_max: float
    z_R: float
    f_0: float
    w: float

    @classmethod
    def from_beam(cls, f_0: float, w: float, k: float) -> FocusGeometry:
        z_R = rayleigh_length(w, k)
        return cls(
            d_f=focal_distance(f_0, z_R),
            r_max=focal_major_radius(f_0, z_R),
            z_R=z_R,
            f_0=f_0,
            w=w,
        )


def rayleigh_length(w: float, k: float) -> float:
    """Rayleigh length ``k w^2 / 2`` of a footprint of radius ``w``."""
    _positive("w", w)
    _positive("k", k)
    return k * w * w / 2.0


def density_kernel(P_t, w_x, w_y, theta_r, inv_f_0, k, x, z):
    """Vectorised power density of focused Gaussian beams.

    Every argument broadcasts with numpy rules, so one call can evaluate a
    whole set of candidate beams at a receiver, or one beam over a grid.
    ``inv_f_0`` is ``1/f_0`` with 0 selecting the beam-forming limit.
    """
    cos_t = np.cos(theta_r)
    sin_t = np.sin(theta_r)
    defocus = 1.0 - z * inv_f_0 / cos_t
    diff_y = 2.0 * z / (k * w_y**2 * cos_t)
    diff_x = 2.0 * z / (k * w_x**2 * cos_t)
    amp_y = 1.0 / np.sqrt(defocus**2 + diff_y**2)
    amp_x = 1.0 / np.sqrt(defocus**2 + diff_x**2 / cos_t**4)
    lateral = x * cos_t - z * sin_t
    spread = (cos_t - z * inv_f_0) ** 2 + (2.0 * z / (k * w_x**2 * cos_t**2)) ** 2
    gauss = np.exp(-2.0 * lateral**2 / (w_x**2 * spread))
    return 2.0 * P_t / (np.pi * w_x * w_y) * amp_y * amp_x * gauss


def power_density(beam: FocusedBeam, p: PlanePoint) -> float:
    """Power density (W/m^2) of ``beam`` at point ``p`` on the xz-plane."""
    if math.cos(beam.theta_r) == 0.0:
        raise DomainError("grazing steering angle")
    return float(
        density_kernel(
            beam.P_t, beam.w_x, beam.w_y, beam.theta_r, beam.inv_f_0, beam.k, p.x, p.z
        )
    )


def received_power(S: float, rx: ReceiverAperture) -> float:
    if S < 0:
        raise DomainError(f"power density must be non-negative, got {S}")
    return S * rx.A_r


def focal_distance(f_0: float, z_R: float) -> float:
    """Distance of peak on-axis power for intended focus ``f_0``."""
    _positive("f_0", f_0)
    _positive("z_R", z_R)
    return f_0 / ((f_0 / z_R) ** 2 + 1.0)


def focal_major_radius(f_0: float, z_R: float) -> float:
    """Half-length along the axis of the 3 dB focal ellipse."""
    _positive("f_0", f_0)
    _positive("z_R", z_R)
    return f_0 / ((f_0 / z_R) ** 2 + 1.0) * (f_0 / z_R)


def invert_focus(d_f: float, r_max: float, k: float) -> tuple[float, float]:
    """Intended focal distance and footprint giving a focal area ``(d_f, r_max)``.

    Returns
    -------
    (f_0, w_x)
        Feeding ``f_0`` and ``z_R = k w_x^2 / 2`` back through
        :func:`focal_distance` and :func:`focal_major_radius` recovers
        ``(d_f, r_max)``.
    """
    _positive("d_f", d_f)
    _positive("r_max", r_max)
    _positive("k", k)
    f_0 = d_f * ((r_max / d_f) ** 2 + 1.0)
    w_x = math.sqrt(2.0 * (r_max**2 + d_f**2) / (k * r_max))
    return f_0, w_x


def beamwidth_3db(w: float, wavelength: float) -> float:
    """Far-field 3 dB beamwidth (rad) of a Gaussian footprint of radius ``w``."""
    _positive("w", w)
    _positive("wavelength", wavelength)
    return math.sqrt(2.0 * math.log(2.0)) * wavelength / (math.pi * w)


def lis_footprint(w_y: float, theta_i: float) -> float:
    """Horizontal footprint on a surface illuminated at incidence ``theta_i``."""
    c = math.cos(theta_i)
    if not abs(theta_i) < math.pi / 2 or c <= 0.0:
        raise DomainError(f"grazing incidence angle {theta_i}")
    return w_y / c
