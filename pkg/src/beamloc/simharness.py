"""Monte-Carlo campaigns over random receiver positions.

Every iteration draws from its own generator seeded by ``(master_seed, i)``,
so results do not depend on how iterations are split across workers.
"""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import ConfigError
from .localizer import RxGroundTruth, localize
from .scenario import NoiseModel, Scenario, SearchMode
from .tracker import TrackResult, random_trajectory, run_track

PERCENTILES = (50.0, 90.0, 99.0, 99.9)


def iteration_rng(master_seed: int, i: int) -> np.random.Generator:
    return np.random.default_rng([master_seed, i])


def sample_rx(rng: np.random.Generator, scenario: Scenario) -> RxGroundTruth:
    """Receiver uniform in angle and in range (not uniform in area)."""
    theta = rng.uniform(-scenario.theta_max, scenario.theta_max)
    d = rng.uniform(scenario.d_min, scenario.d_0)
    return RxGroundTruth(theta, d)


def empirical_cdf(errors) -> tuple[np.ndarray, np.ndarray]:
    """Distinct error values and the fraction of samples at or below each."""
    e = np.asarray(errors, dtype=float)
    if e.size == 0:
        raise ValueError("empirical CDF of an empty sample")
    x, counts = np.unique(e, return_counts=True)
    return x, np.cumsum(counts) / e.size


def nearest_rank(errors, q: float) -> float:
    """``q``-th percentile by nearest rank, no interpolation.

    The rank ``ceil(q n / 100)`` is computed in decimal so that e.g. 99.9 % of
    1000 samples is rank 999, not 1000 as binary floating point would give.
    """
    e = np.sort(np.asarray(errors, dtype=float))
    if e.size == 0:
        raise ValueError("percentile of an empty sample")
    if not 0 <= q <= 100:
        raise ValueError(f"percentile must be in [0, 100], got {q}")
    rank = math.ceil(Fraction(str(q)) * e.size / 100)
    return float(e[max(rank, 1) - 1])


@dataclass(frozen=True)
class ErrorStats:
    n: int
    mean: float
    max: float
    percentiles: dict[float, float]
    success: float
    resolution: float
    mean_pilots: float
    errors: np.ndarray = field(repr=False)

    @classmethod
    def from_errors(cls, errors, resolution: float, pilots=None) -> ErrorStats:
        e = np.sort(np.asarray(errors, dtype=float))
        if e.size == 0:
            raise ValueError("no samples")
        pct = {q: nearest_rank(e, q) for q in PERCENTILES}
        mean_pilots = float(np.mean(pilots)) if pilots is not None else math.nan
        return cls(
            n=int(e.size),
            mean=float(e.mean()),
            max=float(e[-1]),
            percentiles=pct,
            success=float(np.mean(e <= resolution)),
            resolution=resolution,
            mean_pilots=mean_pilots,
            errors=e,
        )

    @property
    def p999(self) -> float:
        return self.percentiles[99.9]

    def cdf(self) -> tuple[np.ndarray, np.ndarray]:
        return empirical_cdf(self.errors)

    def summary(self) -> dict:
        return {
            "n": self.n,
            "mean": self.mean,
            "max": self.max,
            "p999": self.p999,
            "percentiles": {str(q): v for q, v in self.percentiles.items()},
            "success": self.success,
            "resolution": self.resolution,
            "mean_pilots": self.mean_pilots,
        }

    def cdf_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["error_m", "cdf"])
        for x, p in zip(*self.cdf()):
            w.writerow([repr(float(x)), repr(float(p))])
        return buf.getvalue()


def _run_chunk(args) -> tuple[np.ndarray, np.ndarray]:
    scenario, mode, master_seed, start, stop = args
    errors = np.empty(stop - start)
    pilots = np.empty(stop - start, dtype=int)
    for j, i in enumerate(range(start, stop)):
        rng = iteration_rng(master_seed, i)
        rx = sample_rx(rng, scenario)
        est, trace = localize(scenario, rx, mode, rng)
        errors[j] = est.error
        pilots[j] = trace.pilots
    return errors, pilots


def _chunks(n: int, threads: int) -> list[tuple[int, int]]:
    parts = max(1, min(n, threads * 4))
    edges = np.linspace(0, n, parts + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def run_samples(scenario: Scenario, n_iter: int, master_seed: int = 0,
                mode: SearchMode | str | None = None, threads: int = 1,
                ) -> tuple[np.ndarray, np.ndarray]:
    """Per-iteration errors and pilot counts, in iteration order."""
    if n_iter < 1:
        raise ConfigError(f"n_iter must be >= 1, got {n_iter}")
    mode = scenario.mode if mode is None else SearchMode.parse(mode)
    jobs = [(scenario, mode, master_seed, a, b) for a, b in _chunks(n_iter, threads)]
    if threads <= 1:
        parts = [_run_chunk(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def run_campaign(scenario: Scenario, n_iter: int, master_seed: int = 0,
                 mode: SearchMode | str | None = None, threads: int = 1) -> ErrorStats:
    errors, pilots = run_samples(scenario, n_iter, master_seed, mode, threads)
    return ErrorStats.from_errors(errors, scenario.resolution, pilots)


@dataclass(frozen=True)
class SweepPoint:
    noise_dbm: float
    stats: ErrorStats


def noise_sweep(scenario: Scenario, noise_dbm, n_iter: int, master_seed: int = 0,
                threads: int = 1) -> list[SweepPoint]:
    """One campaign per AWGN power. All points share receiver draws."""
    return [
        SweepPoint(float(p), run_campaign(scenario.replace(noise=NoiseModel.from_dbm(p)),
                                          n_iter, master_seed, threads=threads))
        for p in noise_dbm
    ]


def level_sweep(scenario: Scenario, levels, n_iter: int, master_seed: int = 0,
                threads: int = 1) -> dict[int, ErrorStats]:
    """One campaign per last focusing level ``L_r``."""
    out = {}
    for L_r in levels:
        if L_r < 1:
            raise ConfigError(f"L_r must be >= 1, got {L_r}")
        out[int(L_r)] = run_campaign(scenario.with_depths(L_r=int(L_r)), n_iter, master_seed,
                                     threads=threads)
    return out


def sweep_csv(points: list[SweepPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["noise_dbm", "success", "mean_error_m", "p999_error_m", "max_error_m", "n"])
    for pt in points:
        s = pt.stats
        w.writerow([repr(pt.noise_dbm), repr(s.success), repr(s.mean), repr(s.p999),
                    repr(s.max), s.n])
    return buf.getvalue()


def level_sweep_csv(result: dict[int, ErrorStats]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["L_r", "error_m", "cdf"])
    for level, stats in result.items():
        for x, p in zip(*stats.cdf()):
            w.writerow([level, repr(float(x)), repr(float(p))])
    return buf.getvalue()


def summary_json(scenario: Scenario, stats: ErrorStats, n: int, seed: int,
                 mode: SearchMode | None = None, extra: dict | None = None) -> str:
    """JSON summary with the full resolved configuration for provenance."""
    mode = scenario.mode if mode is None else mode
    doc = {
        "scenario": scenario.name,
        "mode": mode.value,
        "n": n,
        "seed": seed,
        "mean": stats.mean,
        "max": stats.max,
        "p999": stats.p999,
        "success": stats.success,
        "mean_pilots": stats.mean_pilots,
        "units": {"mean": "m", "max": "m", "p999": "m", "success": "fraction"},
        "provenance": {"config": scenario.to_config(), "seed": seed, "version": __version__},
    }
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _track_chunk(args) -> list[TrackResult]:
    scenario, master_seed, start, stop = args
    out = []
    for j in range(start, stop):
        rng = iteration_rng(master_seed, j)
        out.append(run_track(scenario, random_trajectory(rng, scenario), rng))
    return out


def run_tracking(scenario: Scenario, n_traj: int, master_seed: int = 0, threads: int = 1,
                 ) -> tuple[ErrorStats, list[TrackResult]]:
    """Track ``n_traj`` random straight-line users; stats pool every epoch."""
    if n_traj < 1:
        raise ConfigError(f"n_traj must be >= 1, got {n_traj}")
    jobs = [(scenario, master_seed, a, b) for a, b in _chunks(n_traj, threads)]
    if threads <= 1:
        parts = [_track_chunk(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_track_chunk, jobs))
    results = [r for part in parts for r in part]
    errors = np.concatenate([r.errors for r in results])
    pilots = np.concatenate([r.pilots for r in results])
    return ErrorStats.from_errors(errors, scenario.resolution, pilots), results
