"""Flat key-value configuration parsing and block builders."""

import pytest

from holobeam.config import ConfigError, load_config, parse_config
from holobeam.geometry import DEFAULT_SPACING_FRACTION


def test_empty_text_yields_defaults():
    cfg = parse_config("")
    assert cfg["geometry.rows"] == 8
    assert cfg["geometry.cols"] == 8
    assert cfg["geometry.spacing_m"] is None
    assert cfg["channel.users"] == 3
    assert cfg["budget.noise_power_w"] == 1e-4
    assert cfg.seed == 2026
    assert cfg.trials == 20
    assert cfg.sweep_sizes == (4, 8, 12)


def test_overrides_comments_and_repeats():
    cfg = parse_config(
        """
        # full-line comment
        geometry.rows = 2   # trailing comment
        geometry.rows = 4
        channel.users = 2
        optimizer.safeguard = false
        experiment.sweep_sizes = 2, 6
        """
    )
    assert cfg["geometry.rows"] == 4  # last assignment wins
    assert cfg["channel.users"] == 2
    assert cfg["optimizer.safeguard"] is False
    assert cfg.sweep_sizes == (2, 6)


def test_unknown_key_reports_line_number():
    with pytest.raises(ConfigError, match="line 2.*'geometry.row'"):
        parse_config("\ngeometry.row = 4\n")


def test_bad_value_and_missing_equals():
    with pytest.raises(ConfigError, match="bad value"):
        parse_config("geometry.rows = four")
    with pytest.raises(ConfigError, match="expected 'key = value'"):
        parse_config("geometry.rows 4")


def test_spacing_auto_and_explicit():
    auto = parse_config("geometry.spacing_m = auto")
    assert auto["geometry.spacing_m"] is None
    g_auto = auto.build_geometry()
    assert g_auto.spacing_y == pytest.approx(DEFAULT_SPACING_FRACTION * g_auto.wavelength)
    fixed = parse_config("geometry.spacing_m = 0.005")
    assert fixed.build_geometry().spacing_y == 0.005


def test_build_geometry_with_size_override():
    cfg = parse_config("geometry.rows = 8\ngeometry.cols = 8")
    g = cfg.build_geometry(rows=4, cols=4)
    assert g.rows == 4 and g.cols == 4
    assert g.feed_count == cfg["geometry.feed_count"]


def test_builders_reflect_values():
    cfg = parse_config(
        """
        channel.users = 2
        channel.paths = 5
        channel.distance_min_m = 5
        channel.distance_max_m = 50
        budget.transmit_power_w = 1.5
        optimizer.max_iterations = 7
        optimizer.allocation = waterfilling
        """
    )
    ch = cfg.build_channel()
    assert ch.num_users == 2 and ch.path_count == 5
    assert ch.distance_range == (5.0, 50.0)
    assert cfg.build_budget().transmit_power == 1.5
    opt = cfg.build_optimizer()
    assert opt.max_iterations == 7
    assert opt.allocation == "waterfilling"


def test_invalid_block_values_fail_at_load():
    with pytest.raises(ConfigError):
        parse_config("channel.users = 0")
    with pytest.raises(ConfigError):
        parse_config("budget.noise_power_w = 0")
    with pytest.raises(ConfigError):
        parse_config("experiment.trials = 0")
    with pytest.raises(ConfigError):
        parse_config("experiment.sweep_sizes = 0,4")
    with pytest.raises(ConfigError):
        parse_config("optimizer.init = random")


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("geometry.rows = 3\n")
    assert load_config(path)["geometry.rows"] == 3


def test_shipped_configs_parse():
    import os

    here = os.path.join(os.path.dirname(__file__), "..", "configs")
    for name in ("default.cfg", "pattern1d.cfg", "gridcheck.cfg"):
        cfg = load_config(os.path.join(here, name))
        cfg.build_geometry()
