"""Geometric multipath channel between the surface and single-antenna users.

Each user's channel is a Rician mix of a line-of-sight steering vector and a
few scattered paths, scaled by distance-based path loss normalized to the
nearest user.  Realizations are reproducible: a trial index is folded into
the base seed and all draws happen in a fixed order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Direction, SurfaceGeometry, object_phases


@dataclass(frozen=True)
class ChannelConfig:
    """Propagation parameters.

    distance_range bounds the uniform user-distance draw in meters.
    max_theta_deg caps the polar angle of user and path directions, keeping
    arrivals off the surface plane where the array response degenerates.
    """

    num_users: int
    path_count: int = 3
    rician_factor_db: float = 10.0
    pathloss_exponent: float = 2.7
    distance_range: tuple[float, float] = (10.0, 100.0)
    max_theta_deg: float = 60.0

    def __post_init__(self):
        if self.num_users < 1:
            raise ValueError(f"num_users must be >= 1, got {self.num_users}")
        if self.path_count < 1:
            raise ValueError(f"path_count must be >= 1, got {self.path_count}")
        if self.pathloss_exponent < 0.0:
            raise ValueError("pathloss_exponent must be >= 0")
        lo, hi = self.distance_range
        if not 0.0 < lo <= hi:
            raise ValueError(f"distance_range must satisfy 0 < lo <= hi, got {self.distance_range}")
        if not 0.0 < self.max_theta_deg <= 90.0:
            raise ValueError("max_theta_deg must lie in (0, 90]")


@dataclass(frozen=True)
class ChannelRealization:
    """One drawn channel: matrix rows are per-user vectors over elements."""

    matrix: np.ndarray
    los_directions: tuple[Direction, ...]
    distances: np.ndarray
    pathloss: np.ndarray


def steering_vector(geometry: SurfaceGeometry, direction: Direction) -> np.ndarray:
    """Array response exp(+j * plane-wave phase), shape (element_count,)."""
    return np.exp(1j * object_phases(geometry, direction))


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent per-trial generator: trial index XOR-folded into the seed."""
    return np.random.default_rng((int(seed) ^ int(trial)) & 0xFFFFFFFFFFFFFFFF)


def _draw_direction(
    geometry: SurfaceGeometry, config: ChannelConfig, rng: np.random.Generator
) -> Direction:
    """One arrival direction.  Line geometries only resolve angles in their
    scan plane, so azimuths collapse to the two in-plane choices there."""
    theta = math.radians(rng.uniform(0.0, config.max_theta_deg))
    if geometry.rows == 1:
        phi = math.pi / 2.0 if rng.uniform() < 0.5 else 3.0 * math.pi / 2.0
    elif geometry.cols == 1:
        phi = 0.0 if rng.uniform() < 0.5 else math.pi
    else:
        phi = rng.uniform(0.0, 2.0 * math.pi)
    return Direction(theta=theta, phi=phi)


def generate_channel(
    geometry: SurfaceGeometry, config: ChannelConfig, rng: np.random.Generator
) -> ChannelRealization:
    """Draw one multi-user channel realization.

    Per user, in order: distance, line-of-sight direction, then for each
    scattered path its direction and complex gain.  The Rician factor splits
    power between the line-of-sight component and the path sum; path loss is
    (d / d_nearest)^-exponent so the nearest user sits at unit large-scale.
    Satisfies E||h_l||^2 = pathloss_l * element_count.
    """
    kappa = 10.0 ** (config.rician_factor_db / 10.0)
    los_scale = math.sqrt(kappa / (1.0 + kappa))
    nlos_scale = math.sqrt(1.0 / (1.0 + kappa)) / math.sqrt(config.path_count)

    distances = np.empty(config.num_users)
    los_dirs = []
    rays = []
    lo, hi = config.distance_range
    for l in range(config.num_users):
        distances[l] = rng.uniform(lo, hi)
        los_dirs.append(_draw_direction(geometry, config, rng))
        paths = []
        for _ in range(config.path_count):
            d = _draw_direction(geometry, config, rng)
            re, im = rng.standard_normal(2)
            paths.append((d, (re + 1j * im) / math.sqrt(2.0)))
        rays.append(paths)

    pathloss = (distances / distances.min()) ** (-config.pathloss_exponent)

    matrix = np.empty((config.num_users, geometry.element_count), dtype=complex)
    for l, (los, paths) in enumerate(zip(los_dirs, rays)):
        h = los_scale * steering_vector(geometry, los)
        for d, gain in paths:
            h = h + nlos_scale * gain * steering_vector(geometry, d)
        matrix[l] = math.sqrt(pathloss[l]) * h

    return ChannelRealization(
        matrix=matrix,
        los_directions=tuple(los_dirs),
        distances=distances,
        pathloss=pathloss,
    )


def dump_channel_csv(matrix: np.ndarray, path) -> None:
    """Write a channel matrix as user,element,re,im rows at full precision."""
    m = np.asarray(matrix, dtype=complex)
    with open(path, "w", encoding="utf-8") as f:
        f.write("user,element,re,im\n")
        for l in range(m.shape[0]):
            for p in range(m.shape[1]):
                f.write(f"{l},{p},{m[l, p].real:.17g},{m[l, p].imag:.17g}\n")


def load_channel_csv(path) -> np.ndarray:
    """Inverse of dump_channel_csv."""
    users = []
    elements = []
    values = []
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().strip()
        if header != "user,element,re,im":
            raise ValueError(f"unexpected channel CSV header: {header!r}")
        for line in f:
            l_s, p_s, re_s, im_s = line.strip().split(",")
            users.append(int(l_s))
            elements.append(int(p_s))
            values.append(float(re_s) + 1j * float(im_s))
    num_users = max(users) + 1
    num_elements = max(elements) + 1
    matrix = np.zeros((num_users, num_elements), dtype=complex)
    matrix[users, elements] = values
    return matrix
