"""Flat key-value experiment configuration.

Files hold one `key = value` pair per line with `#` comments.  Keys are
namespaced by block prefix (geometry., channel., budget., optimizer.,
experiment.); unknown keys are rejected so typos fail loudly.  Missing keys
fall back to the defaults below.  When a key repeats, the last line wins.
"""

from __future__ import annotations

from dataclasses import dataclass

from .beamforming import LinkBudget
from .channel import ChannelConfig
from .geometry import DEFAULT_WAVEGUIDE_INDEX, SurfaceGeometry, planar_geometry
from .optimizer import OptimizerConfig


class ConfigError(ValueError):
    """Malformed configuration file or value."""


def _parse_bool(text: str) -> bool:
    if text.lower() in ("true", "yes", "1"):
        return True
    if text.lower() in ("false", "no", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_spacing(text: str):
    if text.lower() == "auto":
        return None
    return float(text)


def _parse_sizes(text: str) -> tuple[int, ...]:
    sizes = tuple(int(part) for part in text.split(",") if part.strip())
    if not sizes:
        raise ValueError("sweep_sizes must list at least one size")
    return sizes


_SCHEMA = {
    "geometry.rows": (8, int),
    "geometry.cols": (8, int),
    "geometry.frequency_hz": (12e9, float),
    "geometry.spacing_m": (None, _parse_spacing),
    "geometry.waveguide_index": (DEFAULT_WAVEGUIDE_INDEX, float),
    "geometry.attenuation_np_per_m": (0.0, float),
    "geometry.feed_count": (4, int),
    "channel.users": (3, int),
    "channel.paths": (3, int),
    "channel.rician_factor_db": (10.0, float),
    "channel.pathloss_exponent": (2.7, float),
    "channel.distance_min_m": (10.0, float),
    "channel.distance_max_m": (100.0, float),
    "channel.max_theta_deg": (60.0, float),
    "budget.transmit_power_w": (0.5, float),
    "budget.noise_power_w": (1e-4, float),
    "optimizer.max_iterations": (100, int),
    "optimizer.rate_tolerance": (1e-3, float),
    "optimizer.coordinate_passes": (1, int),
    "optimizer.init": ("superposition", str),
    "optimizer.allocation": ("equal", str),
    "optimizer.safeguard": (True, _parse_bool),
    "experiment.seed": (2026, int),
    "experiment.trials": (20, int),
    "experiment.sweep_sizes": ((4, 8, 12), _parse_sizes),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Typed view over one parsed configuration file."""

    values: dict

    def __getitem__(self, key: str):
        return self.values[key]

    def build_geometry(
        self, rows: int | None = None, cols: int | None = None
    ) -> SurfaceGeometry:
        """Surface from the geometry block; rows/cols may be overridden,
        which is how size sweeps rebuild the aperture per point."""
        return planar_geometry(
            rows=rows if rows is not None else self.values["geometry.rows"],
            cols=cols if cols is not None else self.values["geometry.cols"],
            frequency_hz=self.values["geometry.frequency_hz"],
            feed_count=self.values["geometry.feed_count"],
            spacing=self.values["geometry.spacing_m"],
            waveguide_index=self.values["geometry.waveguide_index"],
            attenuation=self.values["geometry.attenuation_np_per_m"],
        )

    def build_channel(self) -> ChannelConfig:
        return ChannelConfig(
            num_users=self.values["channel.users"],
            path_count=self.values["channel.paths"],
            rician_factor_db=self.values["channel.rician_factor_db"],
            pathloss_exponent=self.values["channel.pathloss_exponent"],
            distance_range=(
                self.values["channel.distance_min_m"],
                self.values["channel.distance_max_m"],
            ),
            max_theta_deg=self.values["channel.max_theta_deg"],
        )

    def build_budget(self) -> LinkBudget:
        return LinkBudget(
            transmit_power=self.values["budget.transmit_power_w"],
            noise_power=self.values["budget.noise_power_w"],
        )

    def build_optimizer(self) -> OptimizerConfig:
        return OptimizerConfig(
            max_iterations=self.values["optimizer.max_iterations"],
            rate_tolerance=self.values["optimizer.rate_tolerance"],
            coordinate_passes=self.values["optimizer.coordinate_passes"],
            init=self.values["optimizer.init"],
            allocation=self.values["optimizer.allocation"],
            safeguard=self.values["optimizer.safeguard"],
        )

    @property
    def seed(self) -> int:
        return self.values["experiment.seed"]

    @property
    def trials(self) -> int:
        return self.values["experiment.trials"]

    @property
    def sweep_sizes(self) -> tuple[int, ...]:
        return self.values["experiment.sweep_sizes"]


def parse_config(text: str) -> ExperimentConfig:
    """Parse configuration text; see the module docstring for the format."""
    values = {key: default for key, (default, _) in _SCHEMA.items()}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        _, caster = _SCHEMA[key]
        try:
            values[key] = caster(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc
    config = ExperimentConfig(values)
    _validate(config)
    return config


def load_config(path) -> ExperimentConfig:
    """Read and parse a configuration file."""
    with open(path, "r", encoding="utf-8") as f:
        return parse_config(f.read())


def _validate(config: ExperimentConfig) -> None:
    """Build every block once so bad values surface as ConfigError at load
    time rather than mid-experiment."""
    try:
        config.build_geometry()
        config.build_channel()
        config.build_budget()
        config.build_optimizer()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if config.trials < 1:
        raise ConfigError(f"experiment.trials must be >= 1, got {config.trials}")
    if any(s < 1 for s in config.sweep_sizes):
        raise ConfigError(f"sweep sizes must be >= 1, got {config.sweep_sizes}")
