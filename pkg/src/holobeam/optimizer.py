"""Alternating sum-rate optimization of the hologram and the digital stage.

The sum rate is a ratio-of-quadratics in the element amplitudes.  Each outer
iteration refreshes fractional-programming auxiliaries (one SINR-like scalar
and one complex residual per user), which turns the rate into a concave
quadratic surrogate in the amplitudes; the surrogate is maximized by cyclic
coordinate ascent with closed-form per-element updates, then the digital
zero-forcing stage is recomputed.  A safeguard rejects any outer step that
lowers the true rate, so the recorded trajectory never decreases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .beamforming import (
    LinkBudget,
    SingularChannelError,
    effective_channel,
    holographic_response,
    sum_rate,
    user_sinr,
    zf_beamformer,
)
from .geometry import Direction, SurfaceGeometry, object_phase_matrix, scan_direction
from .holography import average_multibeam, multibeam_pattern

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class OptimizerConfig:
    """Loop controls.

    init picks the primary starting hologram: "superposition" aims beams at
    each user's strongest arrival estimated from the channel, "uniform_half"
    sets every element to 0.5.  With multi_start the loop additionally runs
    from a small deterministic pool of alternative holograms and keeps the
    best outcome; the post-inversion rate landscape is multimodal enough
    that single starts routinely park in poor basins.  surrogate_refreshes
    is the number of auxiliary refresh plus coordinate sweep rounds applied
    per outer iteration, before the digital stage is re-solved.  allocation
    is forwarded to the digital stage.
    """

    max_iterations: int = 100
    rate_tolerance: float = 1e-3
    coordinate_passes: int = 1
    surrogate_refreshes: int = 4
    init: str = "superposition"
    allocation: str = "equal"
    safeguard: bool = True
    multi_start: bool = True

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.rate_tolerance <= 0.0:
            raise ValueError(f"rate_tolerance must be positive, got {self.rate_tolerance}")
        if self.coordinate_passes < 1:
            raise ValueError(f"coordinate_passes must be >= 1, got {self.coordinate_passes}")
        if self.surrogate_refreshes < 1:
            raise ValueError(
                f"surrogate_refreshes must be >= 1, got {self.surrogate_refreshes}"
            )
        if self.init not in ("superposition", "uniform_half"):
            raise ValueError(f"init must be 'superposition' or 'uniform_half', got {self.init!r}")
        if self.allocation not in ("equal", "waterfilling"):
            raise ValueError(
                f"allocation must be 'equal' or 'waterfilling', got {self.allocation!r}"
            )


@dataclass(frozen=True)
class FpAuxiliaries:
    """Fractional-programming auxiliaries: per-user SINR estimates gamma and
    complex residuals y, both frozen while the hologram is updated."""

    gamma: np.ndarray
    y: np.ndarray


@dataclass
class OptimizationReport:
    """Outcome of one optimization run.

    rate_trajectory[0] is the rate of the initial hologram; one entry is
    appended per accepted outer iteration.  converged is False only when the
    iteration budget ran out before the rate change fell below tolerance.
    """

    rate_trajectory: list[float]
    amplitudes: np.ndarray
    beamformer: np.ndarray
    iterations: int
    converged: bool
    diagnostics: dict = field(default_factory=dict)

    @property
    def final_rate(self) -> float:
        return self.rate_trajectory[-1]


def _unit_response(geometry: SurfaceGeometry) -> np.ndarray:
    """Surface response with all amplitudes at 1, shape (elements, feeds)."""
    return holographic_response(geometry, np.ones(geometry.element_count))


def _aux_from_gains(gains: np.ndarray, noise_power: float) -> FpAuxiliaries:
    power = np.abs(gains) ** 2
    signal = np.diag(power)
    total = power.sum(axis=1)
    denom = total - signal + noise_power
    gamma = signal / denom
    y = np.sqrt(1.0 + gamma) * np.diag(gains) / (total + noise_power)
    return FpAuxiliaries(gamma=gamma, y=y)


def update_auxiliaries(
    channel_matrix: np.ndarray,
    response: np.ndarray,
    beamformer: np.ndarray,
    noise_power: float,
) -> FpAuxiliaries:
    """Closed-form auxiliary refresh at the current operating point.

    gamma_l is the exact SINR; y_l = sqrt(1 + gamma_l) * g_ll / (total
    received power + noise), the maximizer of the surrogate's quadratic
    term.  With these values the surrogate equals the true sum rate.
    """
    return _aux_from_gains(channel_matrix @ response @ beamformer, noise_power)


def surrogate_value(
    channel_matrix: np.ndarray,
    response: np.ndarray,
    beamformer: np.ndarray,
    aux: FpAuxiliaries,
    noise_power: float,
) -> float:
    """Concave surrogate of the sum rate for frozen auxiliaries, in bits.

    Equals the true sum rate when aux comes from update_auxiliaries at the
    same operating point, and lower-bounds it elsewhere.
    """
    gains = channel_matrix @ response @ beamformer
    power = np.abs(gains) ** 2
    total = power.sum(axis=1)
    cross = 2.0 * np.sqrt(1.0 + aux.gamma) * np.real(np.conj(aux.y) * np.diag(gains))
    quad = np.abs(aux.y) ** 2 * (total + noise_power)
    terms = np.log(1.0 + aux.gamma) - aux.gamma + cross - quad
    return float(terms.sum() / _LN2)


def _coupling(geometry, channel_matrix, beamformer):
    """Per-coordinate couplings: gains are linear in each amplitude with
    slope C[l, j, p] = H[l, p] * (unit response @ V)[p, j]."""
    u = _unit_response(geometry) @ beamformer
    return u, channel_matrix


def surrogate_gradient(
    geometry: SurfaceGeometry,
    channel_matrix: np.ndarray,
    amplitudes: np.ndarray,
    beamformer: np.ndarray,
    aux: FpAuxiliaries,
) -> np.ndarray:
    """Analytic gradient of the surrogate in the element amplitudes."""
    u, h = _coupling(geometry, channel_matrix, beamformer)
    gains = (h * np.asarray(amplitudes)) @ u
    w2 = np.abs(aux.y) ** 2
    sq = np.sqrt(1.0 + aux.gamma)
    # linear term: d/dm_p of 2*sq_l*Re(conj(y_l) g_ll) summed over l
    t1 = np.real(np.einsum("l,lp,pl->p", sq * np.conj(aux.y), h, u))
    # quadratic term: d/dm_p of w2_l * sum_j |g_lj|^2
    t2 = np.real(np.einsum("l,lp,pj,lj->p", w2, np.conj(h), np.conj(u), gains))
    return 2.0 * (t1 - t2) / _LN2


def _sweep(
    h: np.ndarray,
    u: np.ndarray,
    m: np.ndarray,
    gains: np.ndarray,
    aux: FpAuxiliaries,
    passes: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic coordinate ascent on the surrogate over the box [0, 1].

    Each coordinate sees a concave quadratic whose vertex is taken and
    clipped to the box; a degenerate (linear) coordinate moves to the
    favorable endpoint and stays put on a tie.  Gains are maintained
    incrementally, so a full pass costs O(elements x users^2).  Returns the
    updated amplitudes and gains.  The per-iteration matrices are tiny, so
    the inner loop runs on plain Python complexes to dodge array overhead.
    """
    num_users, count = h.shape
    w2 = np.abs(aux.y) ** 2
    sq = np.sqrt(1.0 + aux.gamma)
    # curvature is amplitude-independent: A_p = sum_l w2_l |H_lp|^2 sum_j |U_pj|^2
    curvature = (np.abs(u) ** 2).sum(axis=1) * (w2 @ np.abs(h) ** 2)
    t1 = np.real(np.einsum("l,lp,pl->p", sq * np.conj(aux.y), h, u))

    users = range(num_users)
    gl = gains.tolist()
    hl = h.T.tolist()
    hcl = np.conj(h.T).tolist()
    ul = u.tolist()
    ucl = np.conj(u).tolist()
    w2l = w2.tolist()
    t1l = t1.tolist()
    curvl = curvature.tolist()
    ml = m.tolist()

    for _ in range(passes):
        for p in range(count):
            ucp = ucl[p]
            hcp = hcl[p]
            t2 = 0.0
            for l in users:
                row = gl[l]
                acc = 0j
                for j in users:
                    acc += row[j] * ucp[j]
                t2 += (w2l[l] * hcp[l] * acc).real
            slope = t1l[p] - t2
            current = ml[p]
            if curvl[p] > 0.0:
                target = current + slope / curvl[p]
                if target < 0.0:
                    target = 0.0
                elif target > 1.0:
                    target = 1.0
            elif slope > 0.0:
                target = 1.0
            elif slope < 0.0:
                target = 0.0
            else:
                target = current
            delta = target - current
            if delta != 0.0:
                ml[p] = target
                hp = hl[p]
                up = ul[p]
                for l in users:
                    coef = delta * hp[l]
                    row = gl[l]
                    for j in users:
                        row[j] += coef * up[j]
    return np.array(ml), np.array(gl, dtype=complex)


def holographic_update(
    geometry: SurfaceGeometry,
    channel_matrix: np.ndarray,
    amplitudes: np.ndarray,
    beamformer: np.ndarray,
    aux: FpAuxiliaries,
    passes: int = 1,
) -> np.ndarray:
    """One round of cyclic coordinate ascent on the surrogate, for frozen
    auxiliaries and digital beamformer.  Returns the new amplitudes."""
    u, h = _coupling(geometry, channel_matrix, beamformer)
    m = np.array(amplitudes, dtype=float)
    gains = (h * m) @ u
    m, _ = _sweep(h, u, m, gains, aux, passes)
    return m


@lru_cache(maxsize=8)
def _scan_basis(geometry: SurfaceGeometry):
    """Direction grid and conjugated steering matrix for arrival estimation."""
    if geometry.rows == 1 or geometry.cols == 1:
        axis = "y" if geometry.rows == 1 else "x"
        dirs = tuple(scan_direction(a / 2.0, axis) for a in range(-179, 180))
    else:
        dirs = tuple(
            Direction(math.radians(t), math.radians(p))
            for t in range(0, 90)
            for p in range(0, 360, 5)
        )
    basis = np.exp(-1j * object_phase_matrix(geometry, dirs))
    return dirs, basis


def dominant_direction(geometry: SurfaceGeometry, user_channel: np.ndarray) -> Direction:
    """Arrival direction whose steering vector best correlates with the
    user's channel vector, over a fixed direction grid."""
    dirs, basis = _scan_basis(geometry)
    scores = np.abs(basis @ np.asarray(user_channel, dtype=complex))
    return dirs[int(np.argmax(scores))]


def superposition_init(geometry: SurfaceGeometry, channel_matrix: np.ndarray) -> np.ndarray:
    """Multibeam hologram aimed at each user's dominant arrival, equal
    weights, averaged over feeds."""
    h = np.asarray(channel_matrix, dtype=complex)
    beams = [(dominant_direction(geometry, h[l]), 1.0) for l in range(h.shape[0])]
    return average_multibeam(geometry, beams)


def baseline_superposition(
    channel_matrix: np.ndarray,
    geometry: SurfaceGeometry,
    budget: LinkBudget,
    allocation: str = "equal",
) -> tuple[np.ndarray, np.ndarray, float]:
    """One-shot reference scheme: superposition hologram plus zero-forcing.

    Returns (amplitudes, beamformer, sum rate).  Raises SingularChannelError
    when the resulting effective channel cannot be inverted.
    """
    amplitudes = superposition_init(geometry, channel_matrix)
    response = holographic_response(geometry, amplitudes)
    beamformer = zf_beamformer(effective_channel(channel_matrix, response), budget, allocation)
    sinrs = user_sinr(channel_matrix, response, beamformer, budget.noise_power)
    return amplitudes, beamformer, sum_rate(sinrs)


def _single_run(
    h: np.ndarray,
    geometry: SurfaceGeometry,
    budget: LinkBudget,
    config: OptimizerConfig,
    start: np.ndarray,
) -> OptimizationReport:
    """One safeguarded alternation from a given starting hologram.

    Raises SingularChannelError when the start itself cannot be inverted;
    a singularity appearing mid-run rolls back to the last good operating
    point and stops.
    """

    noise = budget.noise_power
    unit = _unit_response(geometry)

    def solve(amps):
        response = holographic_response(geometry, amps)
        beamformer = zf_beamformer(
            effective_channel(h, response), budget, config.allocation
        )
        rate = sum_rate(user_sinr(h, response, beamformer, noise))
        return response, beamformer, rate

    m = np.array(start, dtype=float)
    diagnostics = {}
    response, beamformer, rate = solve(m)

    trajectory = [rate]
    converged = False
    for _ in range(config.max_iterations):
        u = unit @ beamformer
        m_next = m
        gains = (h * m_next) @ u
        for _ in range(config.surrogate_refreshes):
            aux = _aux_from_gains(gains, noise)
            m_next, gains = _sweep(h, u, m_next, gains, aux, config.coordinate_passes)
        try:
            response_next, beamformer_next, rate_next = solve(m_next)
        except SingularChannelError:
            diagnostics["singular_rollback"] = True
            converged = True
            break
        if config.safeguard and rate_next < rate:
            diagnostics["safeguard_rollback"] = True
            converged = True
            break
        m, response, beamformer = m_next, response_next, beamformer_next
        trajectory.append(rate_next)
        if abs(rate_next - rate) < config.rate_tolerance:
            rate = rate_next
            converged = True
            break
        rate = rate_next

    diagnostics["per_user_sinr"] = user_sinr(h, response, beamformer, budget.noise_power)
    diagnostics["radiated_power"] = float(
        np.linalg.norm(response @ beamformer, "fro") ** 2
    )
    return OptimizationReport(
        rate_trajectory=trajectory,
        amplitudes=m,
        beamformer=beamformer,
        iterations=len(trajectory) - 1,
        converged=converged,
        diagnostics=diagnostics,
    )


def _start_pool(
    geometry: SurfaceGeometry, h: np.ndarray, primary: str
) -> list[tuple[str, np.ndarray]]:
    """Deterministic starting holograms, the configured primary first.

    The pool covers the superposition map and its complement, the flat
    half-on map, one single-beam map per user, and the per-feed multibeam
    maps; near-duplicates are dropped.
    """
    num_users = h.shape[0]
    sup = superposition_init(geometry, h)
    uniform = np.full(geometry.element_count, 0.5)
    named = [
        ("superposition", sup),
        ("uniform_half", uniform),
        ("complement", 1.0 - sup),
    ]
    if primary == "uniform_half":
        named[0], named[1] = named[1], named[0]
    dirs = [dominant_direction(geometry, h[l]) for l in range(num_users)]
    for l, d in enumerate(dirs):
        named.append((f"user{l}_beam", average_multibeam(geometry, [(d, 1.0)])))
    beams = [(d, 1.0) for d in dirs]
    for k in range(geometry.feed_count):
        named.append((f"feed{k}_multibeam", multibeam_pattern(geometry, k, beams)))

    pool = []
    for name, amps in named:
        if any(np.allclose(amps, kept, atol=1e-9) for _, kept in pool):
            continue
        pool.append((name, amps))
    return pool


def optimize(
    channel_matrix: np.ndarray,
    geometry: SurfaceGeometry,
    budget: LinkBudget,
    config: OptimizerConfig = OptimizerConfig(),
    initial_amplitudes: np.ndarray | None = None,
) -> OptimizationReport:
    """Alternate auxiliary refresh, hologram ascent, and zero-forcing until
    the rate change falls below tolerance or the iteration budget runs out.

    initial_amplitudes overrides everything and runs a single warm start.
    Otherwise, with multi_start the loop runs once per pooled start and the
    best final rate wins (the reported trajectory is the winning run's);
    without it, only the configured init runs, retrying once from the
    uniform_half hologram when the start is singular.  All-starts-singular
    surfaces SingularChannelError.
    """
    h = np.asarray(channel_matrix, dtype=complex)
    if h.ndim != 2 or h.shape[1] != geometry.element_count:
        raise ValueError(
            f"channel must be (users, {geometry.element_count}), got {h.shape}"
        )

    if initial_amplitudes is not None:
        return _single_run(h, geometry, budget, config, np.asarray(initial_amplitudes))

    if not config.multi_start:
        if config.init == "superposition":
            start = superposition_init(geometry, h)
        else:
            start = np.full(geometry.element_count, 0.5)
        try:
            return _single_run(h, geometry, budget, config, start)
        except SingularChannelError:
            if config.init == "uniform_half":
                raise
            report = _single_run(
                h, geometry, budget, config, np.full(geometry.element_count, 0.5)
            )
            report.diagnostics["init_fallback"] = "uniform_half"
            return report

    best = None
    best_name = None
    failure = None
    for name, start in _start_pool(geometry, h, config.init):
        try:
            report = _single_run(h, geometry, budget, config, start)
        except SingularChannelError as exc:
            failure = exc
            continue
        if best is None or report.final_rate > best.final_rate:
            best, best_name = report, name
    if best is None:
        raise failure
    best.diagnostics["winning_start"] = best_name
    return best
