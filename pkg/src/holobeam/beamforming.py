"""Digital zero-forcing stage behind the holographic aperture.

The cascade is: digital beamformer V (feeds x users), then the surface
response Q (elements x feeds) fixed by the hologram, then the channel
H (users x elements).  Zero-forcing inverts the effective channel H @ Q and
splits the power budget equally or by waterfilling.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import SurfaceGeometry, reference_amplitudes, reference_phases

CONDITION_LIMIT = 1e12


@lru_cache(maxsize=64)
def _guided_wave(geometry: SurfaceGeometry) -> np.ndarray:
    """Feed-to-element guided field at unit drive, shape (feeds, elements):
    amplitude decay with conjugated propagation phase.  Read-only."""
    field = reference_amplitudes(geometry) * np.exp(-1j * reference_phases(geometry))
    field.setflags(write=False)
    return field


@dataclass(frozen=True)
class LinkBudget:
    """Total transmit power and per-user noise power, in watts."""

    transmit_power: float
    noise_power: float

    def __post_init__(self):
        if self.transmit_power <= 0.0:
            raise ValueError(f"transmit_power must be positive, got {self.transmit_power}")
        if self.noise_power <= 0.0:
            raise ValueError(f"noise_power must be positive, got {self.noise_power}")


class SingularChannelError(Exception):
    """Effective channel too ill-conditioned to invert."""

    def __init__(self, condition_number: float):
        super().__init__(
            f"effective channel condition number {condition_number:.3e} "
            f"exceeds {CONDITION_LIMIT:.0e}"
        )
        self.condition_number = condition_number


def holographic_response(geometry: SurfaceGeometry, amplitudes) -> np.ndarray:
    """Surface response Q, shape (element_count, feed_count).

    Q[p, k] is the hologram weight at element p times feed k's guided wave
    sampled there: amplitude decay with conjugated propagation phase.
    """
    amps = np.asarray(amplitudes, dtype=float)
    if amps.shape != (geometry.element_count,):
        raise ValueError(
            f"amplitudes must have shape ({geometry.element_count},), got {amps.shape}"
        )
    if np.any(amps < 0.0) or np.any(amps > 1.0):
        raise ValueError("amplitudes must lie in [0, 1]")
    return amps[:, None] * _guided_wave(geometry).T


def effective_channel(channel_matrix: np.ndarray, response: np.ndarray) -> np.ndarray:
    """Users x feeds channel seen by the digital stage: H @ Q."""
    return channel_matrix @ response


def zf_beamformer(
    effective: np.ndarray, budget: LinkBudget, allocation: str = "equal"
) -> np.ndarray:
    """Zero-forcing beamformer for the effective channel, shape (feeds, users).

    Columns are pseudo-inverse directions scaled so the per-user powers q_l
    sum to the budget.  "equal" splits the budget uniformly; "waterfilling"
    solves q_l = max(0, mu - noise * ||v0_l||^2) with mu found by bisection.

    Raises SingularChannelError when the condition number of the effective
    channel exceeds CONDITION_LIMIT, and ValueError when there are more
    users than feeds.
    """
    h_eff = np.asarray(effective, dtype=complex)
    if h_eff.ndim != 2:
        raise ValueError(f"effective channel must be a matrix, got shape {h_eff.shape}")
    num_users, num_feeds = h_eff.shape
    if num_users > num_feeds:
        raise ValueError(f"{num_users} users need at least as many feeds, got {num_feeds}")
    if allocation not in ("equal", "waterfilling"):
        raise ValueError(f"allocation must be 'equal' or 'waterfilling', got {allocation!r}")

    cond = np.linalg.cond(h_eff)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise SingularChannelError(cond)

    gram = h_eff @ h_eff.conj().T
    directions = h_eff.conj().T @ np.linalg.solve(gram, np.eye(num_users))
    norms = np.linalg.norm(directions, axis=0)

    if allocation == "equal":
        powers = np.full(num_users, budget.transmit_power / num_users)
    else:
        powers = _waterfill(budget.noise_power * norms**2, budget.transmit_power)

    return directions / norms * np.sqrt(powers)


def _waterfill(costs: np.ndarray, total: float) -> np.ndarray:
    """Powers max(0, mu - cost_l) with sum equal to `total` (1e-12 absolute)."""
    lo = costs.min()
    hi = costs.max() + total
    for _ in range(200):
        mu = 0.5 * (lo + hi)
        spent = np.maximum(0.0, mu - costs).sum()
        if abs(spent - total) <= 1e-12:
            break
        if spent < total:
            lo = mu
        else:
            hi = mu
    return np.maximum(0.0, mu - costs)


def user_sinr(
    channel_matrix: np.ndarray,
    response: np.ndarray,
    beamformer: np.ndarray,
    noise_power: float,
) -> np.ndarray:
    """Per-user SINR under the full cascade, shape (num_users,).

    Entry l is |g_ll|^2 over the sum of |g_lj|^2 for j != l plus noise,
    where g = H @ Q @ V.
    """
    if noise_power <= 0.0:
        raise ValueError(f"noise_power must be positive, got {noise_power}")
    gains = channel_matrix @ response @ beamformer
    power = np.abs(gains) ** 2
    signal = np.diag(power)
    interference = power.sum(axis=1) - signal
    return signal / (interference + noise_power)


def sum_rate(sinrs) -> float:
    """Sum of log2(1 + SINR) over users, in bits/s/Hz."""
    g = np.asarray(sinrs, dtype=float)
    if np.any(g < 0.0):
        raise ValueError("SINR values must be nonnegative")
    return float(np.sum(np.log2(1.0 + g)))
