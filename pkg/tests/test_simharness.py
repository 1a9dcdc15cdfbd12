import json
import math
from fractions import Fraction

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from beamloc.errors import ConfigError
from beamloc.localizer import localize
from beamloc.scenario import NoiseModel, load_preset
from beamloc.simharness import (
    ErrorStats,
    empirical_cdf,
    iteration_rng,
    level_sweep,
    level_sweep_csv,
    nearest_rank,
    noise_sweep,
    run_campaign,
    run_samples,
    run_tracking,
    sample_rx,
    summary_json,
    sweep_csv,
)

from conftest import campaign

S1 = load_preset("scenario1")
S2 = load_preset("scenario2")


# --- sampling -----------------------------------------------------------------------

def test_sample_rx_is_uniform_in_angle_and_range():
    rng = np.random.default_rng(0)
    rx = [sample_rx(rng, S1) for _ in range(100_000)]
    d = np.array([r.d for r in rx])
    th = np.array([r.theta for r in rx])
    assert abs(d.mean() / ((S1.d_min + S1.d_0) / 2) - 1) < 0.01
    assert abs(np.mean(th > 0) - 0.5) < 0.01
    assert np.all((d >= S1.d_min) & (d <= S1.d_0))
    assert np.all(np.abs(th) <= S1.theta_max)
    # uniform in range, so the mean of d^2 differs from the area-uniform value
    assert abs(np.mean(d**2) - (S1.d_0**3 - S1.d_min**3) / (3 * (S1.d_0 - S1.d_min))) < 0.05


def test_iteration_rng_is_independent_of_order():
    a = iteration_rng(3, 17).random(4)
    iteration_rng(3, 16).random(100)
    assert_array_equal(iteration_rng(3, 17).random(4), a)
    assert not np.array_equal(iteration_rng(4, 17).random(4), a)


# --- empirical CDF and percentiles -----------------------------------------------------

def test_cdf_small_example():
    x, p = empirical_cdf([3.0, 1.0, 2.0])
    assert_array_equal(x, [1, 2, 3])
    assert_allclose(p, [1 / 3, 2 / 3, 1])


def test_cdf_constant_is_single_step():
    x, p = empirical_cdf([0.5] * 7)
    assert_array_equal(x, [0.5])
    assert_array_equal(p, [1.0])


def test_cdf_empty_rejected():
    with pytest.raises(ValueError):
        empirical_cdf([])


def test_cdf_within_dkw_band():
    n = 10_000
    u = np.random.default_rng(8).uniform(size=n)
    x, p = empirical_cdf(u)
    eps = math.sqrt(math.log(2 / 1e-3) / (2 * n))
    # sup distance is attained at the jumps, on either side
    below = np.concatenate([[0.0], p[:-1]])
    assert max(np.max(np.abs(p - x)), np.max(np.abs(below - x))) < eps


def test_nearest_rank():
    e = np.arange(1, 1001, dtype=float)
    assert nearest_rank(e, 99.9) == 999.0
    assert nearest_rank(e, 50) == 500.0
    assert nearest_rank(e, 100) == 1000.0
    assert nearest_rank(e, 0) == 1.0
    with pytest.raises(ValueError):
        nearest_rank([], 50)
    e = np.random.default_rng(1).permutation(np.arange(10_000, dtype=float))
    for q in (50, 90, 99, 99.9):
        rank = math.ceil(Fraction(str(q)) / 100 * e.size)
        assert nearest_rank(e, q) == np.sort(e)[rank - 1]


def test_error_stats_invariants():
    s = ErrorStats.from_errors([0.03, 0.01, 0.05, 0.02], 0.04, pilots=[32, 32, 30, 32])
    x, p = s.cdf()
    assert np.all(np.diff(p) > 0) and p[-1] == 1.0
    assert s.max == x[-1] == 0.05
    assert s.mean == pytest.approx(0.0275)
    assert s.success == 0.75
    assert s.mean_pilots == 31.5
    assert s.cdf_csv().splitlines()[0] == "error_m,cdf"
    assert len(s.cdf_csv().splitlines()) == 5


# --- campaigns ------------------------------------------------------------------------

def test_single_iteration_campaign():
    s = run_campaign(S1, 1, 5)
    rng = iteration_rng(5, 0)
    est, trace = localize(S1, sample_rx(rng, S1), rng=rng)
    assert s.n == 1 and s.mean == s.max == est.error
    assert s.mean_pilots == trace.pilots


def test_campaign_rejects_empty():
    with pytest.raises(ConfigError):
        run_campaign(S1, 0)


def test_campaign_reproducible_across_workers():
    sc = S1.replace(noise=NoiseModel.from_dbm(-60))
    e1, p1 = run_samples(sc, 24, 9, threads=1)
    e2, p2 = run_samples(sc, 24, 9, threads=2)
    assert_array_equal(e1, e2)
    assert_array_equal(p1, p2)


def test_noiseless_success_scenario1():
    assert campaign("scenario1", 2000).success >= 0.99


@pytest.mark.xfail(strict=True, reason="off-axis final-level ranging misses near cell edges at "
                                       "d_0 = 10 m; recorded with the acceptance results")
def test_noiseless_success_scenario2():
    assert campaign("scenario2", 2000).success >= 0.99


def test_perfect_direction_never_hurts_on_average():
    measured = campaign("scenario1", 2000)
    perfect = campaign("scenario1", 2000, mode="perfect_phase1")
    assert perfect.mean <= measured.mean + 1e-3


# --- sweeps ---------------------------------------------------------------------------

def test_noise_sweep_shape_and_robust_codebook():
    dbm = [-110.0, -60.0, -50.0, -40.0, 20.0]
    n = 300
    bfr = noise_sweep(S1, dbm, n, 2)
    rbfr = noise_sweep(S1.replace(codebook="rbfr"), dbm, n, 2)
    assert [pt.noise_dbm for pt in bfr] == dbm
    assert bfr[0].stats.success >= 0.97 and rbfr[0].stats.success >= 0.97
    assert bfr[-1].stats.success <= 0.02 and rbfr[-1].stats.success <= 0.02
    for a, b in zip(bfr, rbfr):
        sigma = math.sqrt(max(a.stats.success * (1 - a.stats.success), 1e-4) / n)
        assert b.stats.success >= a.stats.success - 2 * sigma
    success = [pt.stats.success for pt in bfr]
    assert success[0] >= success[2] >= success[-1]


def test_sweep_points_share_receivers():
    pts = noise_sweep(S1, [-120.0, -115.0], 50, 3)
    # far below the signal both points see the same receivers and decisions
    assert_array_equal(pts[0].stats.errors, pts[1].stats.errors)


def test_sweep_csv_columns():
    text = sweep_csv(noise_sweep(S1, [-100.0, 0.0], 5, 1))
    lines = text.splitlines()
    assert lines[0] == "noise_dbm,success,mean_error_m,p999_error_m,max_error_m,n"
    assert len(lines) == 3 and lines[1].startswith("-100.0,")


def test_level_sweep_corner_halves():
    res = level_sweep(S2, [4, 5, 6, 7, 8], 500, 1)
    med = [res[l].percentiles[50.0] for l in range(4, 9)]
    assert np.all(np.diff(med) < 0)
    for a, b in zip(med, med[1:]):
        assert 0.35 <= b / a <= 0.65
    for l, s in res.items():
        assert s.resolution == pytest.approx(0.3 * 10.0 / 2 ** (l - 1))


def test_level_one_error_bounded():
    s = level_sweep(S1, [1], 500, 1)[1]
    assert s.max <= 1.5


def test_level_sweep_deterministic_and_csv():
    a = level_sweep(S1, [2, 3], 40, 6)
    b = level_sweep(S1, [2, 3], 40, 6)
    assert level_sweep_csv(a) == level_sweep_csv(b)
    lines = level_sweep_csv(a).splitlines()
    assert lines[0] == "L_r,error_m,cdf"
    assert {ln.split(",")[0] for ln in lines[1:]} == {"2", "3"}
    with pytest.raises(ConfigError):
        level_sweep(S1, [0], 5)


# --- outputs --------------------------------------------------------------------------

def test_summary_json_keys_and_provenance():
    s = run_campaign(S1, 5, 2)
    doc = json.loads(summary_json(S1, s, 5, 2))
    for key in ("scenario", "mode", "n", "seed", "mean", "max", "p999", "success", "mean_pilots"):
        assert key in doc
    assert doc["scenario"] == "scenario1" and doc["mode"] == "measured"
    cfg = doc["provenance"]["config"]
    assert cfg["d_0_m"] == 5.0 and cfg["P_t_dbm"] == pytest.approx(30.0)
    assert doc["provenance"]["seed"] == 2


def test_tracking_campaign_pools_epochs():
    stats, results = run_tracking(load_preset("scenario1-track"), 3, 4)
    assert len(results) == 3
    assert stats.n == sum(len(r.errors) for r in results)
    with pytest.raises(ConfigError):
        run_tracking(S1, 0)
