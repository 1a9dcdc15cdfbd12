"""Two-phase hierarchical localization.

Phase 1 walks the direction codebook down the binary tree with collimated
beams; Phase 2 walks the focusing codebook along the Phase-1 direction. At each
level the receiver reports one power per candidate beam and the strongest one
is refined. The receiver is a measured-power oracle with optional AWGN.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .beam_model import ReceiverAperture, density_kernel
from .codebook import DirectionCodebook, FocusCodebook, children, entry_codewords
from .errors import OutsideAreaError
from .scenario import NoiseModel, Scenario, SearchMode


@dataclass(frozen=True)
class RxGroundTruth:
    """True receiver position in polar form: angle from broadside and range."""

    theta: float
    d: float

    def __post_init__(self) -> None:
        if not self.d > 0 or not abs(self.theta) < math.pi / 2:
            raise OutsideAreaError(f"invalid receiver position theta={self.theta}, d={self.d}")

    @property
    def x(self) -> float:
        return self.d * math.sin(self.theta)

    @property
    def z(self) -> float:
        return self.d * math.cos(self.theta)

    @classmethod
    def from_cartesian(cls, x: float, z: float) -> RxGroundTruth:
        return cls(math.atan2(x, z), math.hypot(x, z))


@dataclass(frozen=True)
class TraceStep:
    phase: int
    level: int
    candidates: tuple[int, ...]
    powers: tuple[float, ...]
    chosen: int


@dataclass
class SearchTrace:
    steps: list[TraceStep] = field(default_factory=list)

    @property
    def pilots(self) -> int:
        return sum(len(s.candidates) for s in self.steps)

    def extend(self, other: SearchTrace) -> None:
        self.steps.extend(other.steps)

    def records(self):
        """One flat record per pilot transmission."""
        for s in self.steps:
            for idx, p in zip(s.candidates, s.powers):
                yield {
                    "phase": s.phase,
                    "level": s.level,
                    "index": idx,
                    "power_w": p,
                    "chosen": idx == s.chosen,
                }

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r) + "\n" for r in self.records())


@dataclass(frozen=True)
class LocationEstimate:
    theta_hat: float
    d_hat: float
    error: float

    @property
    def x(self) -> float:
        return self.d_hat * math.sin(self.theta_hat)

    @property
    def z(self) -> float:
        return self.d_hat * math.cos(self.theta_hat)

    @classmethod
    def against(cls, theta_hat: float, d_hat: float, rx: RxGroundTruth) -> LocationEstimate:
        x = d_hat * math.sin(theta_hat)
        z = d_hat * math.cos(theta_hat)
        return cls(theta_hat, d_hat, math.hypot(x - rx.x, z - rx.z))


def apply_noise(p_r: np.ndarray, noise: NoiseModel, rng: np.random.Generator) -> np.ndarray:
    """Energy-detector output ``|sqrt(P_r) e^{j phi} + n|^2`` for each noiseless power.

    ``n`` is circular complex Gaussian with ``E|n|^2 = P_n``, so the expected
    reading is ``P_r + P_n``. Draws are fresh per pilot.
    """
    p_r = np.asarray(p_r, dtype=float)
    if noise.kind == "none":
        return p_r
    phi = rng.uniform(0.0, 2.0 * np.pi, size=p_r.shape)
    n = rng.standard_normal(size=p_r.shape + (2,)) * math.sqrt(noise.P_n / 2.0)
    amp = np.sqrt(p_r)
    re = amp * np.cos(phi) + n[..., 0]
    im = amp * np.sin(phi) + n[..., 1]
    return re * re + im * im


def measure(beam, rx: RxGroundTruth, aperture: ReceiverAperture, noise: NoiseModel,
            rng: np.random.Generator) -> float:
    """Power reported by the receiver for a single :class:`FocusedBeam`."""
    s = density_kernel(beam.P_t, beam.w_x, beam.w_y, beam.theta_r, beam.inv_f_0, beam.k,
                       rx.x, rx.z)
    return float(apply_noise(np.array([s * aperture.A_r]), noise, rng)[0])


@dataclass(frozen=True)
class Link:
    """Transmit power, receiver aperture and noise shared by every pilot."""

    P_t: float
    aperture: ReceiverAperture
    noise: NoiseModel

    @classmethod
    def of(cls, scenario: Scenario) -> Link:
        return cls(scenario.P_t, scenario.aperture, scenario.noise)


def direction_powers(cb: DirectionCodebook, level: int, idx: np.ndarray,
                     rx: RxGroundTruth, link: Link) -> np.ndarray:
    """Noiseless received power of direction codewords ``idx`` (1-based) at ``rx``."""
    u = cb.centers(level)[idx - 1]
    w = cb.footprints(level)[idx - 1]
    s = density_kernel(link.P_t, w, w, np.arcsin(u), 0.0, cb.geometry.k, rx.x, rx.z)
    return s * link.aperture.A_r


def focus_powers(cb: FocusCodebook, level: int, idx: np.ndarray, theta_r: float,
                 rx: RxGroundTruth, link: Link) -> np.ndarray:
    """Noiseless received power of focusing codewords ``idx`` steered to ``theta_r``."""
    j = level - 1
    f_0 = cb.f_0[j][idx - 1]
    w = cb.w_x[j][idx - 1]
    s = density_kernel(link.P_t, w, w, theta_r, 1.0 / f_0, cb.k, rx.x, rx.z)
    return s * link.aperture.A_r


def _pick(powers: np.ndarray, idx: np.ndarray, ideal_key: np.ndarray | None) -> int:
    # lowest index wins ties; candidates are kept sorted ascending
    if ideal_key is None:
        return int(idx[np.argmax(powers)])
    return int(idx[np.argmin(ideal_key)])


def search_directions(cb: DirectionCodebook, start_level: int, candidates, rx: RxGroundTruth,
                      link: Link, rng: np.random.Generator, ideal: bool = False,
                      ) -> tuple[int, SearchTrace]:
    """Binary-tree direction search from ``start_level`` down to the last level.

    Returns the winning last-level index and the trace.
    """
    trace = SearchTrace()
    idx = np.asarray(sorted(candidates), dtype=int)
    u_rx = math.sin(rx.theta)
    for level in range(start_level, cb.L + 1):
        p = apply_noise(direction_powers(cb, level, idx, rx, link), link.noise, rng)
        key = np.abs(cb.centers(level)[idx - 1] - u_rx) if ideal else None
        win = _pick(p, idx, key)
        trace.steps.append(TraceStep(1, level, tuple(int(i) for i in idx),
                                     tuple(float(v) for v in p), win))
        if level < cb.L:
            idx = np.array(children(win))
    return win, trace


def search_ranges(cb: FocusCodebook, start_level: int, candidates, theta_r: float,
                  rx: RxGroundTruth, link: Link, rng: np.random.Generator,
                  ideal: bool = False) -> tuple[int, SearchTrace]:
    """Binary-tree ranging along ``theta_r`` from ``start_level`` to the last level."""
    trace = SearchTrace()
    idx = np.asarray(sorted(candidates), dtype=int)
    for level in range(start_level, cb.L + 1):
        p = apply_noise(focus_powers(cb, level, idx, theta_r, rx, link), link.noise, rng)
        key = np.abs(cb.distances(level)[idx - 1] - rx.d) if ideal else None
        win = _pick(p, idx, key)
        trace.steps.append(TraceStep(2, level, tuple(int(i) for i in idx),
                                     tuple(float(v) for v in p), win))
        if level < cb.L:
            idx = np.array(children(win))
    return win, trace


def phase1(cb: DirectionCodebook, rx: RxGroundTruth, aperture: ReceiverAperture,
           noise: NoiseModel, rng: np.random.Generator, entry_level: int, theta_max: float,
           *, P_t: float = 1.0, ideal: bool = False) -> tuple[float, SearchTrace]:
    """Beam training: estimate the receiver direction. Returns ``(theta_hat, trace)``."""
    link = Link(P_t, aperture, noise)
    entry = entry_codewords(cb, entry_level, theta_max)
    win, trace = search_directions(cb, entry_level, entry, rx, link, rng, ideal)
    return float(np.arcsin(cb.centers(cb.L)[win - 1])), trace


def phase2(cb: FocusCodebook, theta_hat: float, rx: RxGroundTruth, aperture: ReceiverAperture,
           noise: NoiseModel, rng: np.random.Generator, *, P_t: float = 1.0,
           ideal: bool = False) -> tuple[float, SearchTrace]:
    """Ranging with focused beams along ``theta_hat``. Returns ``(d_hat, trace)``."""
    link = Link(P_t, aperture, noise)
    win, trace = search_ranges(cb, 1, (1, 2), theta_hat, rx, link, rng, ideal)
    return float(cb.distances(cb.L)[win - 1]), trace


def localize(scenario: Scenario, rx: RxGroundTruth, mode: SearchMode | str | None = None,
             rng: np.random.Generator | None = None) -> tuple[LocationEstimate, SearchTrace]:
    """Run both phases for one receiver.

    ``mode`` defaults to the scenario's. In ``perfect_phase1`` mode the direction
    search still runs (and is traced) but Phase 2 is steered to the true angle.
    """
    if not scenario.contains(rx.theta, rx.d):
        raise OutsideAreaError(
            f"receiver at theta={math.degrees(rx.theta):.3f} deg, d={rx.d:.4f} m "
            "is outside the area of interest"
        )
    mode = scenario.mode if mode is None else SearchMode.parse(mode)
    if rng is None:
        rng = np.random.default_rng()
    ideal = mode is SearchMode.IDEAL
    common = dict(P_t=scenario.P_t, ideal=ideal)
    theta_hat, trace = phase1(scenario.direction_codebook, rx, scenario.aperture, scenario.noise,
                              rng, scenario.entry_level, scenario.theta_max, **common)
    steer = rx.theta if mode is SearchMode.PERFECT_PHASE1 else theta_hat
    d_hat, trace2 = phase2(scenario.focus_codebook, steer, rx, scenario.aperture,
                           scenario.noise, rng, **common)
    trace.extend(trace2)
    return LocationEstimate.against(steer, d_hat, rx), trace


def is_success(error: float, resolution: float) -> bool:
    """A localization succeeds when its error is at most the ranging resolution."""
    return error <= resolution
