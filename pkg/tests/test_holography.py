"""Hologram synthesis, diode quantization, and far-field patterns."""

import math

import numpy as np
import pytest

from holobeam.geometry import (
    Direction,
    SurfaceGeometry,
    line_geometry,
    scan_direction,
)
from holobeam.holography import (
    PIN_IDEAL_WEIGHTS,
    PIN_MEASURED_WEIGHTS,
    LobeShortfallError,
    PinState,
    RadiationPattern,
    amplitude_eq1,
    amplitude_map,
    array_factor,
    array_factor_grid,
    average_multibeam,
    find_main_lobes,
    main_lobe_indices,
    multibeam_pattern,
    quantize_pin,
    radiation_pattern,
)


@pytest.fixture
def line16():
    return line_geometry(16, 12e9)


def test_amplitude_frozen_oracle():
    # 12 GHz line, default pitch and index, element n=5, beam at +17 degrees
    g = line_geometry(16, 12e9)
    d = scan_direction(17.0)
    assert amplitude_eq1(g, 0, 0, 5, d) == pytest.approx(0.290830407104717, abs=1e-12)
    assert amplitude_map(g, 0, d)[5] == pytest.approx(0.290830407104717, abs=1e-12)


def test_amplitude_special_phase_offsets():
    # zero phase difference -> 1, half turn -> 0, quarter turn -> 1/2
    g = SurfaceGeometry(
        rows=1,
        cols=2,
        spacing_x=0.01,
        spacing_y=0.01,
        frequency_hz=12e9,
        feed_positions=((0.0, 0.0),),
        waveguide_index=1.0,
    )
    # feed is colocated with element 0: both phases vanish at broadside
    assert amplitude_eq1(g, 0, 0, 0, Direction(0.0, 0.0)) == pytest.approx(1.0, abs=1e-15)
    # endfire along +y cancels object against reference exactly (index 1)
    d_end = Direction(math.pi / 2, math.pi / 2)
    assert amplitude_eq1(g, 0, 0, 1, d_end) == pytest.approx(1.0, abs=1e-12)


def test_amplitude_map_matches_scalar(line16):
    d = scan_direction(-33.0)
    amps = amplitude_map(line16, 0, d)
    assert amps.shape == (16,)
    for n in (0, 3, 9, 15):
        assert amps[n] == pytest.approx(amplitude_eq1(line16, 0, 0, n, d), abs=1e-14)
    assert np.all(amps >= 0.0) and np.all(amps <= 1.0)


def test_multibeam_is_weighted_average(line16):
    d1, d2 = scan_direction(-10.0), scan_direction(35.0)
    m1 = amplitude_map(line16, 0, d1)
    m2 = amplitude_map(line16, 0, d2)
    combo = multibeam_pattern(line16, 0, [(d1, 1.0), (d2, 3.0)])
    np.testing.assert_allclose(combo, (m1 + 3.0 * m2) / 4.0, atol=1e-15)
    single = multibeam_pattern(line16, 0, [(d1, 2.5)])
    np.testing.assert_allclose(single, m1, atol=1e-15)


def test_multibeam_validates_weights(line16):
    d = scan_direction(5.0)
    with pytest.raises(ValueError):
        multibeam_pattern(line16, 0, [])
    with pytest.raises(ValueError):
        multibeam_pattern(line16, 0, [(d, -1.0)])
    with pytest.raises(ValueError):
        multibeam_pattern(line16, 0, [(d, 0.0)])


def test_average_multibeam_over_feeds():
    from holobeam.geometry import planar_geometry

    g = planar_geometry(2, 4, 12e9, feed_count=2)
    beams = [(scan_direction(20.0), 1.0)]
    per_feed = np.stack([multibeam_pattern(g, k, beams) for k in range(2)])
    np.testing.assert_allclose(average_multibeam(g, beams), per_feed.mean(axis=0), atol=1e-15)


def test_quantize_pin_threshold_and_modes():
    amps = np.array([0.0, 0.49, 0.5, 0.51, 1.0])
    state = quantize_pin(amps)
    np.testing.assert_array_equal(state.radiating, [False, False, False, True, True])
    np.testing.assert_allclose(state.weights(), [0.0, 0.0, 0.0, 1.0, 1.0])
    measured = quantize_pin(amps, mode="measured")
    lo, hi = math.sqrt(0.13), math.sqrt(0.37)
    np.testing.assert_allclose(measured.weights(), [lo, lo, lo, hi, hi], atol=1e-15)


def test_pin_weight_constants():
    assert PIN_IDEAL_WEIGHTS == (1.0, 0.0)
    assert PIN_MEASURED_WEIGHTS[0] ** 2 == pytest.approx(0.37)
    assert PIN_MEASURED_WEIGHTS[1] ** 2 == pytest.approx(0.13)


def test_quantize_pin_monotone():
    rng = np.random.default_rng(7)
    a = rng.uniform(0.0, 1.0, size=64)
    b = np.minimum(1.0, a + rng.uniform(0.0, 0.3, size=64))
    low = quantize_pin(a).radiating
    high = quantize_pin(b).radiating
    # raising amplitudes never turns a radiating element off
    assert np.all(high[low])


def test_quantize_pin_validation():
    with pytest.raises(ValueError):
        quantize_pin(np.array([0.2, 1.2]))
    with pytest.raises(ValueError):
        quantize_pin(np.array([[0.2], [0.3]]))
    with pytest.raises(ValueError):
        quantize_pin(np.array([0.2]), threshold=1.0)
    with pytest.raises(ValueError):
        PinState(radiating=np.array([True]), mode="other")


def test_array_factor_full_cancellation():
    # index-1 guide, lossless, endfire along +y: reference phase equals the
    # object phase at every element, so unit weights sum coherently to N
    g = line_geometry(8, 10e9, spacing=0.004, waveguide_index=1.0)
    d = Direction(math.pi / 2, math.pi / 2)
    af = array_factor(g, np.ones(8), np.ones(1), d)
    assert af == pytest.approx(8.0 + 0.0j, abs=1e-9)


def test_array_factor_single_element():
    g = SurfaceGeometry(
        rows=1,
        cols=1,
        spacing_x=0.01,
        spacing_y=0.01,
        frequency_hz=12e9,
        feed_positions=((0.0, 0.0),),
    )
    for angle in (0.0, 25.0, -60.0):
        af = array_factor(g, np.ones(1), np.ones(1), scan_direction(angle))
        assert af == pytest.approx(1.0 + 0.0j, abs=1e-12)


def test_array_factor_attenuation_scales_feed_wave():
    g_loss = line_geometry(4, 12e9, waveguide_index=1.0, attenuation=30.0)
    g_ideal = line_geometry(4, 12e9, waveguide_index=1.0)
    d = Direction(math.pi / 2, math.pi / 2)
    w = np.ones(4)
    af_loss = array_factor(g_loss, w, np.ones(1), d)
    dists = np.arange(4) * g_loss.spacing_y
    assert af_loss == pytest.approx(np.sum(np.exp(-30.0 * dists)), abs=1e-9)
    assert abs(af_loss) < abs(array_factor(g_ideal, w, np.ones(1), d))


def test_array_factor_grid_matches_pointwise(line16):
    dirs = [scan_direction(a) for a in (-40.0, -5.0, 0.0, 18.0, 60.0)]
    w = amplitude_map(line16, 0, scan_direction(18.0))
    grid = array_factor_grid(line16, w, np.ones(1), dirs)
    for i, d in enumerate(dirs):
        assert grid[i] == pytest.approx(array_factor(line16, w, np.ones(1), d), abs=1e-10)


def test_array_factor_shape_checks(line16):
    with pytest.raises(ValueError):
        array_factor(line16, np.ones(15), np.ones(1), scan_direction(0.0))
    with pytest.raises(ValueError):
        array_factor(line16, np.ones(16), np.ones(2), scan_direction(0.0))


def test_radiation_pattern_peak_is_zero_db(line16):
    dirs = [scan_direction(a) for a in np.linspace(-90.0, 90.0, 361)]
    w = amplitude_map(line16, 0, scan_direction(30.0))
    pat = radiation_pattern(line16, w, np.ones(1), dirs)
    assert pat.gains_db.max() == 0.0
    assert np.all(pat.gains_db >= -300.0)
    assert len(pat.directions) == 361


def test_radiation_pattern_rejects_dark_surface(line16):
    dirs = [scan_direction(0.0)]
    with pytest.raises(ValueError):
        radiation_pattern(line16, np.zeros(16), np.ones(1), dirs)


def test_radiation_pattern_grid_shape_validation():
    dirs = (Direction(0.0, 0.0), Direction(0.1, 0.0))
    RadiationPattern(dirs, np.zeros(2), grid_shape=(1, 2))
    with pytest.raises(ValueError):
        RadiationPattern(dirs, np.zeros(2), grid_shape=(2, 2))
    with pytest.raises(ValueError):
        RadiationPattern(dirs, np.zeros(3))


def test_steered_beam_lands_on_target_fine_aperture():
    # a long aperture makes the discrete peak coincide with the commanded
    # angle to within the scan step
    g = line_geometry(256, 12e9)
    angles = np.round(np.arange(-900, 901) * 0.1, 10)
    dirs = [scan_direction(a) for a in angles]
    for target in (0.0, 11.7):
        w = amplitude_map(g, 0, scan_direction(target))
        pat = radiation_pattern(g, w, np.ones(1), dirs)
        peak = angles[int(np.argmax(pat.gains_db))]
        assert abs(peak - target) <= 0.1 + 1e-9


def test_main_lobe_indices_interior_maxima_only():
    dirs = tuple(Direction(0.01 * i, 0.0) for i in range(7))
    gains = np.array([5.0, 1.0, 4.0, 2.0, 6.0, 3.0, 7.0])
    pat = RadiationPattern(dirs, gains)
    # edges (indices 0 and 6) never qualify; interior peaks sorted by gain
    assert main_lobe_indices(pat) == [4, 2]


def test_main_lobe_indices_2d_grid():
    gains = np.array(
        [
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 5.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 7.0],
            [0.0, 0.0, 0.0, 0.0],
        ]
    ).ravel()
    dirs = tuple(Direction(0.01 * i, 0.0) for i in range(16))
    pat = RadiationPattern(dirs, gains, grid_shape=(4, 4))
    # the 7.0 sits on the grid edge, so only the interior 5.0 qualifies
    assert main_lobe_indices(pat) == [5]


def test_find_main_lobes_shortfall_carries_found(line16):
    dirs = [scan_direction(a) for a in np.linspace(-90.0, 90.0, 721)]
    w = amplitude_map(line16, 0, scan_direction(20.0))
    pat = radiation_pattern(line16, w, np.ones(1), dirs)
    top = find_main_lobes(pat, 1)
    assert len(top) == 1
    with pytest.raises(LobeShortfallError) as err:
        find_main_lobes(pat, len(main_lobe_indices(pat)) + 1)
    assert len(err.value.found) == len(main_lobe_indices(pat))
    assert err.value.found[0].theta == top[0].theta
    with pytest.raises(ValueError):
        find_main_lobes(pat, 0)


def test_pattern_csv_format(tmp_path, line16):
    dirs = [scan_direction(a) for a in (-1.0, 0.0, 1.0)]
    w = amplitude_map(line16, 0, scan_direction(0.0))
    pat = radiation_pattern(line16, w, np.ones(1), dirs)
    out = tmp_path / "pattern.csv"
    pat.to_csv(out)
    lines = out.read_text().splitlines()
    assert lines[0] == "theta_deg,phi_deg,gain_db"
    assert len(lines) == 4
    first = lines[1].split(",")
    assert len(first) == 3
    assert float(first[0]) == pytest.approx(1.0)
