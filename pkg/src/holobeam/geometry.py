"""Surface geometry for feed-driven radiating apertures.

Elements sit on a rectangular grid in the z = 0 plane: element (m, n) is at
(m * spacing_x, n * spacing_y) with m indexing rows along x and n indexing
columns along y.  Flattened element order is row-major, p = m * cols + n.
Feeds launch a guided wave that travels in-plane to each element; the guided
path length is the Euclidean feed-to-element distance.

Angle convention: theta is measured from broadside (+z), phi from the +x axis
in the surface plane.  A single-row surface (rows == 1) lies along y and scans
in the y-z plane; the signed scan angle t used by line sweeps maps to
Direction(theta=|t|, phi=pi/2) for t >= 0 and Direction(theta=|t|, phi=3*pi/2)
for t < 0.  A single-column surface scans in the x-z plane with phi in {0, pi}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0

# Default leaky-wave stack: element pitch as a fraction of the free-space
# wavelength and the effective index of the guided mode.  Chosen so that the
# guided-phase carrier lands away from the half-cycle alias where an
# amplitude-only hologram degenerates into mirror twin beams.
DEFAULT_SPACING_FRACTION = 0.185
DEFAULT_WAVEGUIDE_INDEX = 2.11


def free_space_wavenumber(frequency_hz: float) -> float:
    """Free-space wavenumber 2*pi*f/c in rad/m."""
    if frequency_hz <= 0.0:
        raise ValueError(f"frequency must be positive, got {frequency_hz}")
    return 2.0 * math.pi * frequency_hz / SPEED_OF_LIGHT


@dataclass(frozen=True)
class Direction:
    """Propagation direction: polar angle theta in [0, pi/2], azimuth phi in [0, 2*pi)."""

    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi / 2.0 + 1e-12:
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise ValueError(f"phi must lie in [0, 2*pi), got {self.phi}")

    def cosines(self) -> tuple[float, float]:
        """In-plane direction cosines (sin(theta)cos(phi), sin(theta)sin(phi))."""
        st = math.sin(self.theta)
        return st * math.cos(self.phi), st * math.sin(self.phi)


def scan_direction(angle_deg: float, axis: str = "y") -> Direction:
    """Map a signed scan angle in degrees to a Direction in the scan plane.

    axis "y" scans in the y-z plane (single-row surfaces), axis "x" in the
    x-z plane (single-column surfaces).  Positive angles take the positive
    half-axis.
    """
    if axis not in ("x", "y"):
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    t = math.radians(angle_deg)
    if not -math.pi / 2.0 <= t <= math.pi / 2.0:
        raise ValueError(f"scan angle must lie in [-90, 90] degrees, got {angle_deg}")
    if axis == "y":
        phi = math.pi / 2.0 if t >= 0.0 else 3.0 * math.pi / 2.0
    else:
        phi = 0.0 if t >= 0.0 else math.pi
    return Direction(theta=abs(t), phi=phi)


def scan_angle_deg(direction: Direction, axis: str = "y") -> float:
    """Inverse of scan_direction: signed in-plane angle in degrees."""
    if axis == "y":
        sign = 1.0 if math.sin(direction.phi) >= 0.0 else -1.0
    else:
        sign = 1.0 if math.cos(direction.phi) >= 0.0 else -1.0
    return sign * math.degrees(direction.theta)


@dataclass(frozen=True)
class SurfaceGeometry:
    """Rectangular radiating surface with in-plane feeds.

    Parameters
    ----------
    rows, cols : int
        Element grid dimensions along x and y.
    spacing_x, spacing_y : float
        Element pitch in meters.
    frequency_hz : float
        Carrier frequency.
    feed_positions : tuple of (x, y) pairs
        Feed locations in the surface plane, in meters.  Feeds must lie
        within the element bounding box (edges inclusive).
    waveguide_index : float
        Effective refractive index of the guided mode, >= 1.
    attenuation : float
        Guided-wave amplitude decay in nepers per meter, >= 0.
    """

    rows: int
    cols: int
    spacing_x: float
    spacing_y: float
    frequency_hz: float
    feed_positions: tuple[tuple[float, float], ...]
    waveguide_index: float = DEFAULT_WAVEGUIDE_INDEX
    attenuation: float = 0.0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.rows}x{self.cols}")
        if self.spacing_x <= 0.0 or self.spacing_y <= 0.0:
            raise ValueError("element spacing must be positive")
        if self.frequency_hz <= 0.0:
            raise ValueError("frequency must be positive")
        if self.waveguide_index < 1.0:
            raise ValueError(f"waveguide index must be >= 1, got {self.waveguide_index}")
        if self.attenuation < 0.0:
            raise ValueError(f"attenuation must be >= 0, got {self.attenuation}")
        feeds = tuple((float(x), float(y)) for x, y in self.feed_positions)
        if not feeds:
            raise ValueError("at least one feed is required")
        x_max = (self.rows - 1) * self.spacing_x
        y_max = (self.cols - 1) * self.spacing_y
        tol = 1e-9
        for x, y in feeds:
            if not (-tol <= x <= x_max + tol and -tol <= y <= y_max + tol):
                raise ValueError(
                    f"feed ({x}, {y}) lies outside the element bounding box "
                    f"[0, {x_max}] x [0, {y_max}]"
                )
        object.__setattr__(self, "feed_positions", feeds)

    @property
    def element_count(self) -> int:
        return self.rows * self.cols

    @property
    def feed_count(self) -> int:
        return len(self.feed_positions)

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency_hz

    @property
    def wavenumber(self) -> float:
        return free_space_wavenumber(self.frequency_hz)


def element_position(geometry: SurfaceGeometry, m: int, n: int) -> tuple[float, float]:
    """Position (x, y) of element (m, n) in meters."""
    if not (0 <= m < geometry.rows and 0 <= n < geometry.cols):
        raise IndexError(f"element ({m}, {n}) outside {geometry.rows}x{geometry.cols} grid")
    return m * geometry.spacing_x, n * geometry.spacing_y


@lru_cache(maxsize=64)
def _positions_cached(geometry: SurfaceGeometry) -> np.ndarray:
    m = np.repeat(np.arange(geometry.rows), geometry.cols)
    n = np.tile(np.arange(geometry.cols), geometry.rows)
    pos = np.column_stack((m * geometry.spacing_x, n * geometry.spacing_y))
    pos.setflags(write=False)
    return pos


def element_positions(geometry: SurfaceGeometry) -> np.ndarray:
    """All element positions, shape (element_count, 2), row-major order.

    Cached per geometry and returned read-only; copy before mutating.
    """
    return _positions_cached(geometry)


@lru_cache(maxsize=64)
def _distances_cached(geometry: SurfaceGeometry) -> np.ndarray:
    pos = element_positions(geometry)
    feeds = np.asarray(geometry.feed_positions)
    diff = pos[None, :, :] - feeds[:, None, :]
    dist = np.hypot(diff[:, :, 0], diff[:, :, 1])
    dist.setflags(write=False)
    return dist


def feed_distances(geometry: SurfaceGeometry) -> np.ndarray:
    """Guided path lengths, shape (feed_count, element_count).  Cached per
    geometry and returned read-only."""
    return _distances_cached(geometry)


def reference_phase(geometry: SurfaceGeometry, k: int, m: int, n: int) -> float:
    """Guided-wave phase accumulated from feed k to element (m, n), in radians."""
    if not 0 <= k < geometry.feed_count:
        raise IndexError(f"feed index {k} outside 0..{geometry.feed_count - 1}")
    x, y = element_position(geometry, m, n)
    fx, fy = geometry.feed_positions[k]
    d = math.hypot(x - fx, y - fy)
    return geometry.waveguide_index * geometry.wavenumber * d


@lru_cache(maxsize=64)
def _reference_phases_cached(geometry: SurfaceGeometry) -> np.ndarray:
    phases = geometry.waveguide_index * geometry.wavenumber * feed_distances(geometry)
    phases.setflags(write=False)
    return phases


def reference_phases(geometry: SurfaceGeometry) -> np.ndarray:
    """Guided-wave phases, shape (feed_count, element_count).  Cached per
    geometry and returned read-only."""
    return _reference_phases_cached(geometry)


def reference_amplitude(geometry: SurfaceGeometry, k: int, m: int, n: int) -> float:
    """Guided-wave amplitude surviving propagation from feed k to element (m, n)."""
    if not 0 <= k < geometry.feed_count:
        raise IndexError(f"feed index {k} outside 0..{geometry.feed_count - 1}")
    x, y = element_position(geometry, m, n)
    fx, fy = geometry.feed_positions[k]
    d = math.hypot(x - fx, y - fy)
    return math.exp(-geometry.attenuation * d)


@lru_cache(maxsize=64)
def _reference_amplitudes_cached(geometry: SurfaceGeometry) -> np.ndarray:
    amps = np.exp(-geometry.attenuation * feed_distances(geometry))
    amps.setflags(write=False)
    return amps


def reference_amplitudes(geometry: SurfaceGeometry) -> np.ndarray:
    """Guided-wave amplitudes, shape (feed_count, element_count).  Cached
    per geometry and returned read-only."""
    return _reference_amplitudes_cached(geometry)


def object_phase(geometry: SurfaceGeometry, m: int, n: int, direction: Direction) -> float:
    """Free-space phase of a plane wave toward `direction` at element (m, n)."""
    x, y = element_position(geometry, m, n)
    ux, uy = direction.cosines()
    return geometry.wavenumber * (x * ux + y * uy)


def object_phases(geometry: SurfaceGeometry, direction: Direction) -> np.ndarray:
    """Plane-wave phases for all elements, shape (element_count,)."""
    ux, uy = direction.cosines()
    pos = element_positions(geometry)
    return geometry.wavenumber * (pos[:, 0] * ux + pos[:, 1] * uy)


def object_phase_matrix(geometry: SurfaceGeometry, directions) -> np.ndarray:
    """Plane-wave phases for many directions, shape (len(directions), element_count)."""
    u = np.array([d.cosines() for d in directions])
    pos = element_positions(geometry)
    return geometry.wavenumber * (u @ pos.T)


def _default_spacing(frequency_hz: float) -> float:
    return DEFAULT_SPACING_FRACTION * SPEED_OF_LIGHT / frequency_hz


def line_geometry(
    num_elements: int,
    frequency_hz: float,
    spacing: float | None = None,
    waveguide_index: float = DEFAULT_WAVEGUIDE_INDEX,
    attenuation: float = 0.0,
) -> SurfaceGeometry:
    """Single-row surface along y, fed from the line start at the origin."""
    if spacing is None:
        spacing = _default_spacing(frequency_hz)
    return SurfaceGeometry(
        rows=1,
        cols=num_elements,
        spacing_x=spacing,
        spacing_y=spacing,
        frequency_hz=frequency_hz,
        feed_positions=((0.0, 0.0),),
        waveguide_index=waveguide_index,
        attenuation=attenuation,
    )


def planar_geometry(
    rows: int,
    cols: int,
    frequency_hz: float,
    feed_count: int = 4,
    spacing: float | None = None,
    waveguide_index: float = DEFAULT_WAVEGUIDE_INDEX,
    attenuation: float = 0.0,
) -> SurfaceGeometry:
    """Rectangular surface with feeds evenly spaced along the x = 0 edge.

    Feed k sits at y = k * Ly / feed_count where Ly is the aperture length
    along y, so a single feed lands at the corner and K feeds split the edge
    into K equal segments.
    """
    if feed_count < 1:
        raise ValueError(f"feed_count must be >= 1, got {feed_count}")
    if spacing is None:
        spacing = _default_spacing(frequency_hz)
    ly = (cols - 1) * spacing
    feeds = tuple((0.0, k * ly / feed_count) for k in range(feed_count))
    return SurfaceGeometry(
        rows=rows,
        cols=cols,
        spacing_x=spacing,
        spacing_y=spacing,
        frequency_hz=frequency_hz,
        feed_positions=feeds,
        waveguide_index=waveguide_index,
        attenuation=attenuation,
    )
