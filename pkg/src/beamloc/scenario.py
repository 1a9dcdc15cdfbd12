"""Experiment configuration: area of interest, array, codebooks, link budget, noise.

A :class:`Scenario` is held in SI units. :meth:`Scenario.from_config` and
:meth:`Scenario.to_config` convert from and to the dBm/degree flavoured
dictionaries used by the JSON preset files.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math
from dataclasses import dataclass
from functools import cached_property
from importlib import resources

from .beam_model import (
    ReceiverAperture,
    db_to_linear,
    dbm_to_watts,
    wavelength,
    watts_to_dbm,
)
from .codebook import (
    ArrayGeometry,
    DirectionCodebook,
    FocusCodebook,
    build_bfc,
    build_bfr,
    build_rbfr,
)
from .errors import ConfigError

PRESETS = ("scenario1", "scenario2", "scenario1-track", "scenario2-track")


class SearchMode(str, enum.Enum):
    MEASURED = "measured"
    IDEAL = "ideal"
    PERFECT_PHASE1 = "perfect_phase1"

    @classmethod
    def parse(cls, value: str | SearchMode) -> SearchMode:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).replace("-", "_"))
        except ValueError:
            raise ConfigError(f"unknown search mode {value!r}") from None


@dataclass(frozen=True)
class NoiseModel:
    """Average AWGN power ``P_n`` (W) at the receiver; ``kind`` is none or awgn."""

    P_n: float = 0.0
    kind: str = "none"

    def __post_init__(self) -> None:
        if self.kind not in ("none", "awgn"):
            raise ConfigError(f"unknown noise kind {self.kind!r}")
        if self.P_n < 0:
            raise ConfigError(f"noise power must be non-negative, got {self.P_n}")

    @classmethod
    def from_dbm(cls, p_dbm: float | None) -> NoiseModel:
        if p_dbm is None:
            return cls()
        return cls(P_n=dbm_to_watts(p_dbm), kind="awgn")

    @property
    def dbm(self) -> float | None:
        if self.kind == "none":
            return None
        return watts_to_dbm(self.P_n) if self.P_n > 0 else -math.inf


# config key -> (field, to SI, from SI)
_UNIT_KEYS = {
    "d_0_m": ("d_0", float, float),
    "theta_max_deg": ("theta_max", math.radians, math.degrees),
    "d_min_m": ("d_min", float, float),
    "f_c_hz": ("f_c", float, float),
    "P_t_dbm": ("P_t", dbm_to_watts, watts_to_dbm),
    "G_r_db": ("G_r", db_to_linear, lambda g: 10.0 * math.log10(g)),
    "speed_min_m": ("speed_min", float, float),
    "speed_max_m": ("speed_max", float, float),
    "min_path_m": ("min_path", float, float),
}
_PLAIN_KEYS = ("name", "N", "L_t", "L_r", "entry_level", "alpha", "codebook", "freeze_level", "mode")
_EXTRA_KEYS = ("d_x_wavelengths", "d_y_wavelengths", "noise_dbm")
CONFIG_KEYS = frozenset(_UNIT_KEYS) | frozenset(_PLAIN_KEYS) | frozenset(_EXTRA_KEYS)


@dataclass(frozen=True)
class Scenario:
    """Full configuration of a localization experiment (SI units)."""

    d_0: float = 5.0
    theta_max: float = math.radians(25.0)
    d_min: float = 0.1
    f_c: float = 150e9
    N: int = 1024
    d_x: float | None = None
    d_y: float | None = None
    L_t: int = 10
    L_r: int = 6
    entry_level: int = 4
    alpha: float = 0.3
    P_t: float = 1.0
    G_r: float = 100.0
    noise: NoiseModel = NoiseModel()
    codebook: str = "bfr"
    freeze_level: int = 7
    mode: SearchMode = SearchMode.MEASURED
    # mobile users: speed per slot drawn uniformly, minimum trajectory length
    speed_min: float = 0.05
    speed_max: float = 0.25
    min_path: float = 3.0
    name: str = "custom"

    def __post_init__(self) -> None:
        lam = wavelength(self.f_c)
        if self.d_x is None:
            object.__setattr__(self, "d_x", lam / 2)
        if self.d_y is None:
            object.__setattr__(self, "d_y", lam / 2)
        object.__setattr__(self, "mode", SearchMode.parse(self.mode))
        if not 0 < self.d_min < self.d_0:
            raise ConfigError(f"need 0 < d_min < d_0, got d_min={self.d_min}, d_0={self.d_0}")
        if not 0 < self.theta_max < math.pi / 2:
            raise ConfigError(f"theta_max must be in (0, pi/2), got {self.theta_max}")
        if not (self.P_t > 0 and self.G_r > 0):
            raise ConfigError("P_t and G_r must be positive")
        if self.N != 2**self.L_t:
            raise ConfigError(f"N={self.N} does not match L_t={self.L_t}")
        if not 1 <= self.entry_level <= self.L_t:
            raise ConfigError(f"entry_level {self.entry_level} outside 1..{self.L_t}")
        if self.L_r < 1:
            raise ConfigError(f"L_r must be >= 1, got {self.L_r}")
        if self.codebook not in ("bfr", "rbfr"):
            raise ConfigError(f"codebook must be 'bfr' or 'rbfr', got {self.codebook!r}")
        if not 1 <= self.freeze_level <= self.L_t:
            raise ConfigError(f"freeze_level {self.freeze_level} outside 1..{self.L_t}")
        if not 0 < self.speed_min <= self.speed_max:
            raise ConfigError("need 0 < speed_min <= speed_max")

    @property
    def wavelength(self) -> float:
        return wavelength(self.f_c)

    @property
    def k(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def aperture(self) -> ReceiverAperture:
        return ReceiverAperture(self.G_r, self.wavelength)

    @cached_property
    def geometry(self) -> ArrayGeometry:
        return ArrayGeometry(self.N, self.d_x, self.d_y, self.f_c)

    @cached_property
    def direction_codebook(self) -> DirectionCodebook:
        bfr = build_bfr(self.geometry, self.L_t)
        if self.codebook == "rbfr":
            return build_rbfr(bfr, self.freeze_level)
        return bfr

    @cached_property
    def focus_codebook(self) -> FocusCodebook:
        return build_bfc(self.d_0, self.alpha, self.L_r, self.k)

    @property
    def resolution(self) -> float:
        """Success threshold: major radius of the last focusing level."""
        return self.alpha * self.d_0 / 2.0 ** (self.L_r - 1)

    def contains(self, theta: float, d: float) -> bool:
        return abs(theta) <= self.theta_max and self.d_min <= d <= self.d_0

    def replace(self, **changes) -> Scenario:
        return dataclasses.replace(self, **changes)

    def with_depths(self, L_t: int | None = None, L_r: int | None = None) -> Scenario:
        L_t = self.L_t if L_t is None else L_t
        L_r = self.L_r if L_r is None else L_r
        return self.replace(L_t=L_t, N=2**L_t, L_r=L_r)

    @classmethod
    def from_config(cls, cfg: dict) -> Scenario:
        unknown = set(cfg) - CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        for key, (fld, to_si, _) in _UNIT_KEYS.items():
            if key in cfg:
                kwargs[fld] = to_si(cfg[key])
        for key in _PLAIN_KEYS:
            if key in cfg:
                kwargs[key] = cfg[key]
        lam = wavelength(kwargs.get("f_c", cls.f_c))
        if "d_x_wavelengths" in cfg:
            kwargs["d_x"] = cfg["d_x_wavelengths"] * lam
        if "d_y_wavelengths" in cfg:
            kwargs["d_y"] = cfg["d_y_wavelengths"] * lam
        if "noise_dbm" in cfg:
            kwargs["noise"] = NoiseModel.from_dbm(cfg["noise_dbm"])
        if "L_t" in kwargs and "N" not in kwargs:
            kwargs["N"] = 2 ** kwargs["L_t"]
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_config(self) -> dict:
        cfg: dict = {"name": self.name}
        for key, (fld, _, from_si) in _UNIT_KEYS.items():
            cfg[key] = from_si(getattr(self, fld))
        for key in _PLAIN_KEYS[1:]:
            cfg[key] = getattr(self, key)
        cfg["mode"] = self.mode.value
        cfg["d_x_wavelengths"] = self.d_x / self.wavelength
        cfg["d_y_wavelengths"] = self.d_y / self.wavelength
        cfg["noise_dbm"] = self.noise.dbm
        return cfg


def load_preset(name: str) -> Scenario:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    text = resources.files("beamloc.presets").joinpath(f"{name}.json").read_text()
    return Scenario.from_config(json.loads(text))


def load_config(path) -> Scenario:
    """Read a scenario from a JSON file; a ``preset`` key loads a base to override."""
    with open(path) as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be an object")
    base = cfg.pop("preset", None)
    if base is not None:
        merged = load_preset(base).to_config()
        merged.update(cfg)
        if "L_t" in cfg and "N" not in cfg:
            merged["N"] = 2 ** cfg["L_t"]
        cfg = merged
    return Scenario.from_config(cfg)
