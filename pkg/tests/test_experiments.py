"""Experiment drivers: seeded trials, size sweeps, grid check, pattern cuts."""

import numpy as np
import pytest

from holobeam.config import parse_config
from holobeam.experiments import (
    GRIDCHECK_LEVELS,
    GRIDCHECK_MAX_ELEMENTS,
    run_gridcheck,
    run_optimize_trials,
    run_pattern,
    run_sweep,
    run_trial,
    scan_angles,
)

TINY = """
geometry.rows = 2
geometry.cols = 2
geometry.feed_count = 2
channel.users = 2
budget.noise_power_w = 3e-3
optimizer.rate_tolerance = 1e-6
optimizer.coordinate_passes = 2
experiment.seed = 2026
experiment.trials = 3
experiment.sweep_sizes = 2,3
"""

LINE16 = """
geometry.rows = 1
geometry.cols = 16
geometry.feed_count = 1
"""


@pytest.fixture(scope="module")
def tiny():
    return parse_config(TINY)


@pytest.fixture(scope="module")
def line16():
    return parse_config(LINE16)


def test_scan_angles_grid():
    angles = scan_angles()
    assert len(angles) == 1801
    assert angles[0] == -90.0 and angles[-1] == 90.0
    assert angles[900] == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(np.diff(angles), 0.1, atol=1e-12)


def test_run_trial_success(tiny):
    geometry = tiny.build_geometry()
    result = run_trial(geometry, tiny, tiny.seed, trial=0)
    assert result.succeeded
    assert result.error is None
    assert result.seed == tiny.seed ^ 0
    assert result.baseline_rate is not None
    assert result.report.final_rate >= result.baseline_rate - 1e-9


def test_run_optimize_trials_counts_and_seeds(tiny):
    results = run_optimize_trials(tiny)
    assert len(results) == tiny.trials
    for t, r in enumerate(results):
        assert r.trial == t
        assert r.seed == (tiny.seed ^ t) & 0xFFFFFFFFFFFFFFFF
    again = run_optimize_trials(tiny)
    for a, b in zip(results, again):
        assert a.succeeded == b.succeeded
        if a.succeeded:
            assert a.report.rate_trajectory == b.report.rate_trajectory


def test_run_sweep_rebuilds_square_apertures(tiny):
    points = run_sweep(tiny)
    assert [p.size for p in points] == [2, 3]
    for p in points:
        assert p.trials == sum(1 for r in p.results if r.succeeded)
        if p.trials:
            finals = [r.report.final_rate for r in p.results if r.succeeded]
            assert p.proposed_mean == pytest.approx(np.mean(finals), rel=1e-12)
            assert p.proposed_std == pytest.approx(np.std(finals), rel=1e-12)


def test_run_gridcheck_ratios(tiny):
    result = run_gridcheck(tiny)
    assert len(result.rows) == tiny.trials
    for row in result.rows:
        assert row.grid_best_rate > 0.0
        assert row.ratio == pytest.approx(row.optimized_rate / row.grid_best_rate, rel=1e-12)
    assert result.median_ratio == pytest.approx(
        float(np.median([r.ratio for r in result.rows])), rel=1e-12
    )
    assert result.passed == (result.median_ratio >= 0.9)


def test_run_gridcheck_rejects_large_apertures():
    big = parse_config(TINY + "geometry.cols = 4\n")
    assert big.build_geometry().element_count > GRIDCHECK_MAX_ELEMENTS
    with pytest.raises(ValueError):
        run_gridcheck(big)


def test_gridcheck_levels_cover_unit_interval():
    assert GRIDCHECK_LEVELS[0] == 0.0 and GRIDCHECK_LEVELS[-1] == 1.0
    assert all(b > a for a, b in zip(GRIDCHECK_LEVELS, GRIDCHECK_LEVELS[1:]))


def test_run_pattern_shapes_and_quantization(line16):
    angles, gains, amps = run_pattern(line16, [20.0])
    assert len(angles) == len(gains) == 1801
    assert gains.max() == 0.0
    assert amps.shape == (16,)
    assert np.all(amps >= 0.0) and np.all(amps <= 1.0)

    _, gains_q, amps_q = run_pattern(line16, [20.0], quantize="pin-ideal")
    np.testing.assert_array_equal(amps_q, amps)  # reported hologram stays continuous
    assert not np.allclose(gains_q, gains)


def test_run_pattern_validation(line16):
    with pytest.raises(ValueError):
        run_pattern(line16, [])
    with pytest.raises(ValueError):
        run_pattern(line16, [10.0], quantize="binary")
