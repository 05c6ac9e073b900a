"""Amplitude hologram synthesis and far-field pattern evaluation.

The surface steers by amplitude only.  Each element scales the guided
reference wave by a real weight in [0, 1]; the weight map is computed by
interfering the reference wave with the desired outgoing plane wave and
keeping the real part, shifted and scaled into [0, 1]:

    weight = (cos(object_phase - reference_phase) + 1) / 2

Multiple beams superpose as a weighted average of single-beam maps.  Hardware
with binary diode control is modeled by thresholding the continuous map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    Direction,
    SurfaceGeometry,
    object_phase,
    object_phase_matrix,
    object_phases,
    reference_amplitudes,
    reference_phase,
    reference_phases,
)

# Amplitude weights of the two diode states, per element.  "measured" squares
# to the bench radiated-power efficiencies (0.37 radiating, 0.13 shorted);
# "ideal" is a lossless switch.
PIN_IDEAL_WEIGHTS = (1.0, 0.0)
PIN_MEASURED_WEIGHTS = (math.sqrt(0.37), math.sqrt(0.13))

PATTERN_FLOOR_DB = -300.0


def interference_real(
    geometry: SurfaceGeometry, k: int, m: int, n: int, direction: Direction
) -> float:
    """Real part of the interference between the target wave and feed k's
    reference wave at element (m, n).  Lies in [-1, 1]."""
    obj = object_phase(geometry, m, n, direction)
    ref = reference_phase(geometry, k, m, n)
    return math.cos(obj - ref)


def amplitude_eq1(
    geometry: SurfaceGeometry, k: int, m: int, n: int, direction: Direction
) -> float:
    """Hologram weight for a single beam: interference shifted into [0, 1]."""
    return (interference_real(geometry, k, m, n, direction) + 1.0) / 2.0


def amplitude_map(geometry: SurfaceGeometry, k: int, direction: Direction) -> np.ndarray:
    """Single-beam hologram for feed k over all elements, shape (element_count,)."""
    obj = object_phases(geometry, direction)
    ref = reference_phases(geometry)[k]
    return (np.cos(obj - ref) + 1.0) / 2.0


def multibeam_pattern(
    geometry: SurfaceGeometry,
    k: int,
    beams: list[tuple[Direction, float]],
) -> np.ndarray:
    """Hologram for feed k carrying several beams at once.

    Each beam is a (direction, weight) pair with weight >= 0; the result is
    the weight-normalized average of the single-beam maps, so it stays in
    [0, 1] and reduces to amplitude_map for a single beam.
    """
    if not beams:
        raise ValueError("at least one beam is required")
    weights = np.array([w for _, w in beams], dtype=float)
    if np.any(weights < 0.0):
        raise ValueError("beam weights must be nonnegative")
    total = weights.sum()
    if total <= 0.0:
        raise ValueError("beam weights must not all be zero")
    maps = np.stack([amplitude_map(geometry, k, d) for d, _ in beams])
    return (weights @ maps) / total


def average_multibeam(
    geometry: SurfaceGeometry, beams: list[tuple[Direction, float]]
) -> np.ndarray:
    """Multibeam hologram averaged over all feeds.

    The element weights are shared by every feed, so when several feeds
    drive the surface a single map must compromise between their reference
    phases; the per-feed maps are averaged with equal feed weight.
    """
    maps = np.stack(
        [multibeam_pattern(geometry, k, beams) for k in range(geometry.feed_count)]
    )
    return maps.mean(axis=0)


@dataclass(frozen=True)
class PinState:
    """Binary diode configuration: radiating[p] is True where the diode is
    biased off and the element couples power out."""

    radiating: np.ndarray
    mode: str

    def __post_init__(self):
        if self.mode not in ("ideal", "measured"):
            raise ValueError(f"mode must be 'ideal' or 'measured', got {self.mode!r}")
        object.__setattr__(self, "radiating", np.asarray(self.radiating, dtype=bool))

    def weights(self) -> np.ndarray:
        off_w, on_w = PIN_IDEAL_WEIGHTS if self.mode == "ideal" else PIN_MEASURED_WEIGHTS
        return np.where(self.radiating, off_w, on_w)


def quantize_pin(
    amplitudes: np.ndarray, threshold: float = 0.5, mode: str = "ideal"
) -> PinState:
    """Quantize a continuous hologram to per-element diode states.

    Weights above the threshold bias the diode off, which lets the element
    radiate; the rest are shorted.  Monotone: raising an amplitude never
    turns a radiating element off.
    """
    amps = np.asarray(amplitudes, dtype=float)
    if amps.ndim != 1:
        raise ValueError(f"amplitudes must be a vector, got shape {amps.shape}")
    if np.any(amps < 0.0) or np.any(amps > 1.0):
        raise ValueError("amplitudes must lie in [0, 1]")
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    return PinState(radiating=amps > threshold, mode=mode)


def _folded_reference(geometry: SurfaceGeometry, feed_excitations) -> np.ndarray:
    """Per-element reference field summed over feeds, shape (element_count,)."""
    exc = np.asarray(feed_excitations, dtype=complex)
    if exc.shape != (geometry.feed_count,):
        raise ValueError(
            f"feed excitations must have shape ({geometry.feed_count},), got {exc.shape}"
        )
    ref = reference_amplitudes(geometry) * np.exp(-1j * reference_phases(geometry))
    return exc @ ref


def array_factor(
    geometry: SurfaceGeometry,
    element_weights,
    feed_excitations,
    direction: Direction,
) -> complex:
    """Far-field array factor in one direction.

    Sums feed excitation x guided reference x element weight x plane-wave
    phase over feeds (outer) and elements in row-major order (inner).
    """
    w = _check_weights(geometry, element_weights)
    g = _folded_reference(geometry, feed_excitations)
    return complex(np.sum(w * g * np.exp(1j * object_phases(geometry, direction))))


def array_factor_grid(
    geometry: SurfaceGeometry,
    element_weights,
    feed_excitations,
    directions,
) -> np.ndarray:
    """Array factor over a list of directions, shape (len(directions),)."""
    w = _check_weights(geometry, element_weights)
    g = _folded_reference(geometry, feed_excitations)
    phases = object_phase_matrix(geometry, directions)
    return np.exp(1j * phases) @ (w * g)


def _check_weights(geometry: SurfaceGeometry, element_weights) -> np.ndarray:
    w = np.asarray(element_weights, dtype=float)
    if w.shape != (geometry.element_count,):
        raise ValueError(
            f"element weights must have shape ({geometry.element_count},), got {w.shape}"
        )
    return w


@dataclass(frozen=True)
class RadiationPattern:
    """Normalized power pattern over a direction grid.

    gains_db holds 20*log10|AF| shifted so the peak is exactly 0 dB, floored
    at PATTERN_FLOOR_DB.  grid_shape, when set, gives the (rows, cols) layout
    of the direction list for 2-D lobe searches; otherwise the list is an
    ordered 1-D sweep.
    """

    directions: tuple[Direction, ...]
    gains_db: np.ndarray
    grid_shape: tuple[int, int] | None = None

    def __post_init__(self):
        gains = np.asarray(self.gains_db, dtype=float)
        if gains.shape != (len(self.directions),):
            raise ValueError("one gain per direction required")
        if self.grid_shape is not None:
            r, c = self.grid_shape
            if r * c != len(self.directions):
                raise ValueError(f"grid_shape {self.grid_shape} does not tile {len(self.directions)} points")
        object.__setattr__(self, "gains_db", gains)

    def to_csv(self, path) -> None:
        """Write theta_deg, phi_deg, gain_db rows with 6 decimal places."""
        with open(path, "w", encoding="utf-8") as f:
            f.write("theta_deg,phi_deg,gain_db\n")
            for d, g in zip(self.directions, self.gains_db):
                f.write(f"{math.degrees(d.theta):.6f},{math.degrees(d.phi):.6f},{g:.6f}\n")


def radiation_pattern(
    geometry: SurfaceGeometry,
    element_weights,
    feed_excitations,
    directions,
    grid_shape: tuple[int, int] | None = None,
) -> RadiationPattern:
    """Evaluate the normalized power pattern on a direction grid."""
    af = array_factor_grid(geometry, element_weights, feed_excitations, directions)
    mag = np.abs(af)
    peak = mag.max()
    if peak <= 0.0:
        raise ValueError("pattern has no radiated power")
    with np.errstate(divide="ignore"):
        gains = 20.0 * np.log10(mag / peak)
    gains = np.maximum(gains, PATTERN_FLOOR_DB)
    return RadiationPattern(tuple(directions), gains, grid_shape)


class LobeShortfallError(Exception):
    """Raised when a pattern has fewer distinct main lobes than requested.

    Carries the lobes that were found, strongest first, in `found`.
    """

    def __init__(self, requested: int, found: list[Direction]):
        super().__init__(f"found {len(found)} main lobe(s), requested {requested}")
        self.requested = requested
        self.found = found


def main_lobe_indices(pattern: RadiationPattern) -> list[int]:
    """Indices of strict local maxima of the gain grid, strongest first.

    A 1-D sweep point qualifies when it exceeds both neighbors; a 2-D grid
    point when it exceeds its 4-neighborhood.  Grid-edge points never
    qualify (they lack a neighbor on one side).
    """
    g = pattern.gains_db
    idx = []
    if pattern.grid_shape is None:
        for i in range(1, len(g) - 1):
            if g[i] > g[i - 1] and g[i] > g[i + 1]:
                idx.append(i)
    else:
        rows, cols = pattern.grid_shape
        grid = g.reshape(rows, cols)
        for r in range(1, rows - 1):
            for c in range(1, cols - 1):
                v = grid[r, c]
                if (
                    v > grid[r - 1, c]
                    and v > grid[r + 1, c]
                    and v > grid[r, c - 1]
                    and v > grid[r, c + 1]
                ):
                    idx.append(r * cols + c)
    idx.sort(key=lambda i: g[i], reverse=True)
    return idx


def find_main_lobes(pattern: RadiationPattern, count: int) -> list[Direction]:
    """Directions of the `count` strongest main lobes, strongest first."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    idx = main_lobe_indices(pattern)
    if len(idx) < count:
        raise LobeShortfallError(count, [pattern.directions[i] for i in idx])
    return [pattern.directions[i] for i in idx[:count]]
