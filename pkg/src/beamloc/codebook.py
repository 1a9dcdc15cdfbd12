"""Binary-tree codebooks for direction search (Bfr, R-bfr) and ranging (Bfc).

Codeword levels and indices are 1-based throughout, matching the child rule
``i -> (2i - 1, 2i)``. Per-level parameters are stored as numpy arrays so the
localizer can evaluate a candidate set in one call; :meth:`codewords` gives
record views for inspection and serialization.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .beam_model import invert_focus, wavelength
from .errors import ConfigError


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform planar array. ``N`` elements along x, pitch ``d_x`` by ``d_y``."""

    N: int
    d_x: float
    d_y: float
    f_c: float

    def __post_init__(self) -> None:
        if self.N < 2 or self.N & (self.N - 1):
            raise ConfigError(f"N must be a power of two >= 2, got {self.N}")
        if not (self.d_x > 0 and self.d_y > 0):
            raise ConfigError("element pitch must be positive")

    @classmethod
    def half_wavelength(cls, N: int, f_c: float) -> ArrayGeometry:
        lam = wavelength(f_c)
        return cls(N=N, d_x=lam / 2, d_y=lam / 2, f_c=f_c)

    @property
    def L_t(self) -> int:
        return self.N.bit_length() - 1

    @property
    def wavelength(self) -> float:
        return wavelength(self.f_c)

    @property
    def k(self) -> float:
        return 2.0 * math.pi / self.wavelength


@dataclass(frozen=True)
class DirectionCodeword:
    level: int
    index: int
    u_c: float
    theta_c: float
    w: float


@dataclass(frozen=True)
class FocusCodeword:
    level: int
    index: int
    d_f: float
    r_max: float
    f_0: float
    w_x: float


def children(index: int) -> tuple[int, int]:
    """Indices of the two next-level codewords refining codeword ``index``."""
    if index < 1:
        raise ConfigError(f"codeword index must be >= 1, got {index}")
    return 2 * index - 1, 2 * index


def pilot_counts(K: int) -> tuple[int, int]:
    """Pilots for exhaustive last-level search vs binary-tree search over ``K`` levels."""
    if K < 1:
        raise ConfigError(f"K must be >= 1, got {K}")
    return 2**K, 2 * K


@dataclass(frozen=True)
class DirectionCodebook:
    """Beam-forming codebook; level ``l`` holds ``2**l`` beams uniform in sine-space."""

    kind: str
    geometry: ArrayGeometry
    u_c: tuple[np.ndarray, ...]
    w: tuple[np.ndarray, ...]
    freeze_level: int | None = None

    @property
    def L(self) -> int:
        return len(self.u_c)

    def _check_level(self, level: int) -> None:
        if not 1 <= level <= self.L:
            raise ConfigError(f"level {level} outside 1..{self.L}")

    def centers(self, level: int) -> np.ndarray:
        self._check_level(level)
        return self.u_c[level - 1]

    def angles(self, level: int) -> np.ndarray:
        return np.arcsin(self.centers(level))

    def footprints(self, level: int) -> np.ndarray:
        self._check_level(level)
        return self.w[level - 1]

    @staticmethod
    def cell_half_width(level: int) -> float:
        """Half-width of a level's sine-space cell."""
        return 2.0**-level

    def containing_index(self, level: int, u: float) -> int:
        """1-based index of the cell holding sine-space coordinate ``u``.

        A point on a shared boundary goes to the lower index.
        """
        self._check_level(level)
        n = 2**level
        i = math.ceil((u + 1.0) * n / 2.0)
        return min(max(i, 1), n)

    def codewords(self, level: int) -> list[DirectionCodeword]:
        u = self.centers(level)
        w = self.footprints(level)
        return [
            DirectionCodeword(level, i + 1, float(u[i]), float(np.arcsin(u[i])), float(w[i]))
            for i in range(u.size)
        ]

    def to_dict(self) -> dict:
        g = self.geometry
        params = {"N": g.N, "d_x": g.d_x, "d_y": g.d_y, "f_c": g.f_c, "L_t": self.L}
        if self.freeze_level is not None:
            params["freeze_level"] = self.freeze_level
        levels = [
            [
                {"level": c.level, "index": c.index, "u_c": c.u_c, "theta_c": c.theta_c, "w": c.w}
                for c in self.codewords(lvl)
            ]
            for lvl in range(1, self.L + 1)
        ]
        return {"kind": self.kind, "params": params, "levels": levels}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def build_bfr(geom: ArrayGeometry, L_t: int | None = None) -> DirectionCodebook:
    """Beam-forming codebook with ``log2(N)`` levels.

    Level ``l`` steers ``2**l`` beams to ``u = -1 + (2i - 1) / 2**l`` with the
    footprint of a ``2**l``-element sub-aperture, ``w = 2**(l-1) * d_x``.
    """
    if L_t is None:
        L_t = geom.L_t
    if L_t != geom.L_t:
        raise ConfigError(f"L_t={L_t} but log2(N)={geom.L_t}")
    u_c, w = [], []
    for level in range(1, L_t + 1):
        n = 2**level
        i = np.arange(1, n + 1)
        u_c.append(-1.0 + (2 * i - 1) / n)
        w.append(np.full(n, 2.0 ** (level - 1) * geom.d_x))
    return DirectionCodebook("bfr", geom, tuple(u_c), tuple(w))


def build_rbfr(bfr: DirectionCodebook, freeze_level: int = 7) -> DirectionCodebook:
    """Robust codebook: Bfr directions, footprint frozen above ``freeze_level``."""
    if not 1 <= freeze_level <= bfr.L:
        raise ConfigError(f"freeze_level {freeze_level} outside 1..{bfr.L}")
    w_frozen = bfr.w[freeze_level - 1][0]
    w = tuple(
        arr if lvl <= freeze_level else np.full_like(arr, w_frozen)
        for lvl, arr in enumerate(bfr.w, start=1)
    )
    return DirectionCodebook("rbfr", bfr.geometry, bfr.u_c, w, freeze_level)


def entry_codewords(cb: DirectionCodebook, entry_level: int, theta_max: float) -> list[int]:
    """Indices at ``entry_level`` whose sine-space cell touches ``[-sin θmax, sin θmax]``."""
    u = cb.centers(entry_level)
    half = cb.cell_half_width(entry_level)
    s = math.sin(theta_max)
    hit = (u + half >= -s) & (u - half <= s)
    return [int(i) + 1 for i in np.flatnonzero(hit)]


@dataclass(frozen=True)
class FocusCodebook:
    """Beam-focusing (ranging) codebook; level ``l`` holds ``2**l`` focal areas."""

    d_0: float
    alpha: float
    k: float
    d_f: tuple[np.ndarray, ...]
    r_max: tuple[float, ...]
    f_0: tuple[np.ndarray, ...]
    w_x: tuple[np.ndarray, ...]
    kind: str = field(default="bfc")

    @property
    def L(self) -> int:
        return len(self.d_f)

    def _check_level(self, level: int) -> None:
        if not 1 <= level <= self.L:
            raise ConfigError(f"level {level} outside 1..{self.L}")

    def distances(self, level: int) -> np.ndarray:
        self._check_level(level)
        return self.d_f[level - 1]

    def radius(self, level: int) -> float:
        self._check_level(level)
        return self.r_max[level - 1]

    def spacing(self, level: int) -> float:
        """Distance between adjacent focal centres at ``level``."""
        return self.d_0 / 2.0**level

    @property
    def resolution(self) -> float:
        return self.r_max[-1]

    def codewords(self, level: int) -> list[FocusCodeword]:
        self._check_level(level)
        j = level - 1
        r = self.r_max[j]
        return [
            FocusCodeword(level, i + 1, float(d), r, float(f), float(w))
            for i, (d, f, w) in enumerate(zip(self.d_f[j], self.f_0[j], self.w_x[j]))
        ]

    def to_dict(self) -> dict:
        params = {"d_0": self.d_0, "alpha": self.alpha, "k": self.k, "L_r": self.L}
        levels = [
            [
                {"level": c.level, "index": c.index, "d_f": c.d_f, "r_max": c.r_max,
                 "f_0": c.f_0, "w_x": c.w_x}
                for c in self.codewords(lvl)
            ]
            for lvl in range(1, self.L + 1)
        ]
        return {"kind": self.kind, "params": params, "levels": levels}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def build_bfc(d_0: float, alpha: float, L_r: int, k: float) -> FocusCodebook:
    """Beam-focusing codebook splitting ``(0, d_0]`` in halves per level.

    Focal centres sit at odd multiples of ``d_0 / 2**(l+1)`` and every focal
    area of level ``l`` has major radius ``alpha * d_0 / 2**(l-1)``.
    """
    if not d_0 > 0:
        raise ConfigError(f"d_0 must be positive, got {d_0}")
    if L_r < 1:
        raise ConfigError(f"L_r must be >= 1, got {L_r}")
    if not 0.25 <= alpha <= 0.5:
        warnings.warn(f"alpha={alpha} outside [0.25, 0.5]; focal areas gap or over-overlap",
                      stacklevel=2)
    if not alpha > 0:
        raise ConfigError(f"alpha must be positive, got {alpha}")
    d_f11 = d_0 / 4.0
    d_f, r_max, f_0, w_x = [], [], [], []
    for level in range(1, L_r + 1):
        m = np.arange(1, 2 ** (level + 1), 2)
        d = d_f11 / 2.0 ** (level - 1) * m
        r = alpha * d_0 / 2.0 ** (level - 1)
        inv = [invert_focus(float(di), r, k) for di in d]
        d_f.append(d)
        r_max.append(r)
        f_0.append(np.array([f for f, _ in inv]))
        w_x.append(np.array([w for _, w in inv]))
    return FocusCodebook(d_0, alpha, k, tuple(d_f), tuple(r_max), tuple(f_0), tuple(w_x))
