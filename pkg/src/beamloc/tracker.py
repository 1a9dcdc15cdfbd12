"""Tracking of a user moving on a straight line.

After three full localizations the next position is extrapolated from the last
three estimates, and each epoch scans only four directions at level
``L_t - 3`` (then the usual two per level down to ``L_t``) and four focal
areas at the last focusing level.
"""

from __future__ import annotations

import csv
import io
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .codebook import DirectionCodebook, FocusCodebook
from .errors import ConfigError
from .localizer import (
    LocationEstimate,
    Link,
    RxGroundTruth,
    SearchTrace,
    localize,
    search_directions,
    search_ranges,
)
from .scenario import Scenario, SearchMode

HISTORY = 3
WINDOW = 4
LEVELS_BACK = 3


class InsufficientHistory(Exception):
    """Fewer than three estimates: run a full localization instead."""


@dataclass(frozen=True)
class Trajectory:
    """Constant-speed straight path: ``start + slot * speed * direction``."""

    start: tuple[float, float]
    direction: tuple[float, float]
    speed: float
    n_slots: int

    @property
    def length(self) -> float:
        return self.speed * (self.n_slots - 1)

    def point(self, slot: int) -> tuple[float, float]:
        s = slot * self.speed
        return self.start[0] + s * self.direction[0], self.start[1] + s * self.direction[1]

    def points(self) -> np.ndarray:
        s = np.arange(self.n_slots) * self.speed
        return np.column_stack([self.start[0] + s * self.direction[0],
                                self.start[1] + s * self.direction[1]])


def _segment_min_range(p: np.ndarray, q: np.ndarray) -> float:
    """Closest approach of segment ``pq`` to the transmitter at the origin."""
    d = q - p
    t = np.clip(-np.dot(p, d) / np.dot(d, d), 0.0, 1.0)
    return float(np.hypot(*(p + t * d)))


def random_trajectory(rng: np.random.Generator, scenario: Scenario,
                      max_tries: int = 10_000) -> Trajectory:
    """Straight path of at least ``min_path`` metres inside the area of interest.

    Endpoints are drawn like static receivers and rejected until far enough
    apart; the area is a circular sector, so only the inner ``d_min`` arc can
    cut the segment. Speed per slot is uniform in ``[speed_min, speed_max]``.
    """
    for _ in range(max_tries):
        ends = []
        for _ in range(2):
            th = rng.uniform(-scenario.theta_max, scenario.theta_max)
            d = rng.uniform(scenario.d_min, scenario.d_0)
            ends.append(np.array([d * math.sin(th), d * math.cos(th)]))
        p, q = ends
        length = float(np.hypot(*(q - p)))
        if length < scenario.min_path or _segment_min_range(p, q) < scenario.d_min:
            continue
        speed = rng.uniform(scenario.speed_min, scenario.speed_max)
        n_slots = math.ceil(length / speed)
        u = (q - p) / length
        return Trajectory((float(p[0]), float(p[1])), (float(u[0]), float(u[1])), speed, n_slots)
    raise ConfigError(f"area too small for trajectories of {scenario.min_path} m")


def predict_next(history) -> tuple[float, float]:
    """Extrapolate one slot ahead from the last three ``(x, z)`` estimates."""
    if len(history) < HISTORY:
        raise InsufficientHistory(f"need {HISTORY} estimates, have {len(history)}")
    p0 = np.asarray(history[-3], dtype=float)
    p2 = np.asarray(history[-1], dtype=float)
    nxt = p2 + (p2 - p0) / 2.0
    return float(nxt[0]), float(nxt[1])


def clamp_to_area(point, d_0: float, theta_max: float, d_min: float) -> tuple[float, float]:
    """Pull a predicted ``(x, z)`` back into the sector, angle and range separately."""
    x, z = point
    theta = min(max(math.atan2(x, z), -theta_max), theta_max)
    d = min(max(math.hypot(x, z), d_min), d_0)
    return d * math.sin(theta), d * math.cos(theta)


def nearest_indices(values: np.ndarray, target: float, count: int = WINDOW) -> list[int]:
    """1-based indices of the ``count`` entries closest to ``target``, ascending."""
    order = np.argsort(np.abs(values - target), kind="stable")[:count]
    return sorted(int(i) + 1 for i in order)


@dataclass
class TrackState:
    history: deque = field(default_factory=lambda: deque(maxlen=HISTORY))
    predicted: tuple[float, float] | None = None
    errors: list[float] = field(default_factory=list)
    pilots: list[int] = field(default_factory=list)

    @property
    def ready(self) -> bool:
        return len(self.history) >= HISTORY

    def record(self, est: LocationEstimate, pilots: int) -> None:
        self.history.append((est.x, est.z))
        self.errors.append(est.error)
        self.pilots.append(pilots)


def scan_windows(dcb: DirectionCodebook, fcb: FocusCodebook,
                 predicted: tuple[float, float]) -> tuple[int, list[int], list[int]]:
    """Start level and the four direction and four range candidates around a prediction."""
    x, z = predicted
    level = max(1, dcb.L - LEVELS_BACK)
    u = x / math.hypot(x, z)
    dirs = nearest_indices(dcb.centers(level), u)
    ranges = nearest_indices(fcb.distances(fcb.L), math.hypot(x, z))
    return level, dirs, ranges


def track_step(scenario: Scenario, state: TrackState, rx: RxGroundTruth,
               rng: np.random.Generator) -> tuple[LocationEstimate, TrackState]:
    """Localize the user for one slot and update ``state`` in place.

    Without three past estimates this falls back to full localization.
    """
    if not state.ready:
        est, trace = localize(scenario, rx, rng=rng)
        state.record(est, trace.pilots)
        return est, state
    pred = clamp_to_area(predict_next(state.history), scenario.d_0, scenario.theta_max,
                         scenario.d_min)
    state.predicted = pred
    dcb, fcb = scenario.direction_codebook, scenario.focus_codebook
    level, dirs, ranges = scan_windows(dcb, fcb, pred)
    link = Link.of(scenario)
    ideal = scenario.mode is SearchMode.IDEAL
    win, trace = search_directions(dcb, level, dirs, rx, link, rng, ideal)
    theta_hat = float(np.arcsin(dcb.centers(dcb.L)[win - 1]))
    steer = rx.theta if scenario.mode is SearchMode.PERFECT_PHASE1 else theta_hat
    win_r, trace_r = search_ranges(fcb, fcb.L, ranges, steer, rx, link, rng, ideal)
    trace.extend(trace_r)
    est = LocationEstimate.against(steer, float(fcb.distances(fcb.L)[win_r - 1]), rx)
    state.record(est, trace.pilots)
    return est, state


@dataclass(frozen=True)
class TrackResult:
    truth: np.ndarray
    estimates: np.ndarray
    errors: np.ndarray
    pilots: np.ndarray

    def rows(self, trajectory_id: int = 0):
        for slot, (t, e, err, p) in enumerate(zip(self.truth, self.estimates, self.errors,
                                                  self.pilots)):
            yield (trajectory_id, slot, float(t[0]), float(t[1]), float(e[0]), float(e[1]),
                   float(err), int(p))


def run_track(scenario: Scenario, trajectory: Trajectory,
              rng: np.random.Generator) -> TrackResult:
    state = TrackState()
    truth = trajectory.points()
    est_xz = np.empty_like(truth)
    for slot, (x, z) in enumerate(truth):
        rx = RxGroundTruth.from_cartesian(float(x), float(z))
        if not scenario.contains(rx.theta, rx.d):
            truth = truth[:slot]
            est_xz = est_xz[:slot]
            break
        est, state = track_step(scenario, state, rx, rng)
        est_xz[slot] = est.x, est.z
    return TrackResult(truth, est_xz, np.array(state.errors), np.array(state.pilots, dtype=int))


TRACK_COLUMNS = ("trajectory", "slot", "true_x", "true_z", "est_x", "est_z", "error", "pilots")


def track_csv(results: list[TrackResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACK_COLUMNS)
    for j, res in enumerate(results):
        for row in res.rows(j):
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()
