"""Reproducible experiment drivers shared by the command-line tool and tests.

Every trial derives its own random stream from the experiment seed and the
trial index, so trials are independent of execution order and a re-run with
the same configuration reproduces every number exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .beamforming import (
    SingularChannelError,
    effective_channel,
    holographic_response,
    sum_rate,
    user_sinr,
    zf_beamformer,
)
from .channel import generate_channel, trial_rng
from .config import ExperimentConfig
from .geometry import SurfaceGeometry, scan_direction
from .holography import average_multibeam, quantize_pin, radiation_pattern
from .optimizer import OptimizationReport, baseline_superposition, optimize

GRIDCHECK_MAX_ELEMENTS = 6
GRIDCHECK_LEVELS = (0.0, 0.25, 0.5, 0.75, 1.0)
GRIDCHECK_THRESHOLD = 0.9


@dataclass
class TrialResult:
    """One channel draw: reference-scheme rate plus the optimizer outcome.

    Either piece may be missing when its effective channel was singular;
    `error` keeps the reason for the log.
    """

    trial: int
    seed: int
    baseline_rate: float | None
    report: OptimizationReport | None
    error: str | None = None

    @property
    def succeeded(self) -> bool:
        return self.report is not None


def run_trial(
    geometry: SurfaceGeometry, config: ExperimentConfig, seed: int, trial: int
) -> TrialResult:
    """Draw one channel and run both the reference scheme and the optimizer."""
    stream_seed = (int(seed) ^ int(trial)) & 0xFFFFFFFFFFFFFFFF
    channel = generate_channel(geometry, config.build_channel(), trial_rng(seed, trial))
    budget = config.build_budget()
    optimizer_config = config.build_optimizer()

    baseline_rate = None
    try:
        _, _, baseline_rate = baseline_superposition(
            channel.matrix, geometry, budget, optimizer_config.allocation
        )
    except SingularChannelError:
        pass

    try:
        report = optimize(channel.matrix, geometry, budget, optimizer_config)
    except SingularChannelError as exc:
        return TrialResult(trial, stream_seed, baseline_rate, None, str(exc))
    return TrialResult(trial, stream_seed, baseline_rate, report)


def run_optimize_trials(
    config: ExperimentConfig,
    geometry: SurfaceGeometry | None = None,
    seed: int | None = None,
    trials: int | None = None,
) -> list[TrialResult]:
    """All trials for one geometry, in trial order."""
    geom = geometry if geometry is not None else config.build_geometry()
    base_seed = config.seed if seed is None else seed
    count = config.trials if trials is None else trials
    return [run_trial(geom, config, base_seed, t) for t in range(count)]


@dataclass
class SweepPoint:
    """Aggregates over the successful trials at one aperture size."""

    size: int
    proposed_mean: float
    baseline_mean: float
    proposed_std: float
    trials: int
    results: list[TrialResult]


def run_sweep(config: ExperimentConfig, seed: int | None = None) -> list[SweepPoint]:
    """Square-aperture size sweep: rows = cols = size for each configured size."""
    points = []
    for size in config.sweep_sizes:
        geometry = config.build_geometry(rows=size, cols=size)
        results = run_optimize_trials(config, geometry=geometry, seed=seed)
        finals = np.array([r.report.final_rate for r in results if r.succeeded])
        baselines = np.array(
            [r.baseline_rate for r in results if r.baseline_rate is not None]
        )
        points.append(
            SweepPoint(
                size=size,
                proposed_mean=float(finals.mean()) if finals.size else math.nan,
                baseline_mean=float(baselines.mean()) if baselines.size else math.nan,
                proposed_std=float(finals.std()) if finals.size else math.nan,
                trials=int(finals.size),
                results=results,
            )
        )
    return points


@dataclass
class GridcheckRow:
    seed: int
    grid_best_rate: float
    optimized_rate: float

    @property
    def ratio(self) -> float:
        return self.optimized_rate / self.grid_best_rate


@dataclass
class GridcheckResult:
    rows: list[GridcheckRow]
    median_ratio: float
    passed: bool


def _grid_best_rate(channel_matrix, geometry, budget, allocation) -> float:
    """Exhaustive search over the quantized amplitude grid; singular
    combinations are skipped."""
    best = -math.inf
    for combo in itertools.product(GRIDCHECK_LEVELS, repeat=geometry.element_count):
        response = holographic_response(geometry, np.array(combo))
        try:
            beamformer = zf_beamformer(
                effective_channel(channel_matrix, response), budget, allocation
            )
        except SingularChannelError:
            continue
        rate = sum_rate(user_sinr(channel_matrix, response, beamformer, budget.noise_power))
        if rate > best:
            best = rate
    if not math.isfinite(best):
        raise SingularChannelError(math.inf)
    return best


def run_gridcheck(config: ExperimentConfig, seed: int | None = None) -> GridcheckResult:
    """Compare the optimizer against brute force on a tiny aperture.

    The amplitude grid has 5 levels per element, so the aperture is capped
    at GRIDCHECK_MAX_ELEMENTS elements.  Reports the per-seed rate ratios
    and whether their median clears GRIDCHECK_THRESHOLD.  The optimizer
    works on the continuous box, so ratios above 1 are legitimate.
    """
    geometry = config.build_geometry()
    if geometry.element_count > GRIDCHECK_MAX_ELEMENTS:
        raise ValueError(
            f"grid check supports at most {GRIDCHECK_MAX_ELEMENTS} elements, "
            f"configured geometry has {geometry.element_count}"
        )
    budget = config.build_budget()
    optimizer_config = config.build_optimizer()
    base_seed = config.seed if seed is None else seed

    rows = []
    for s in range(config.trials):
        channel = generate_channel(
            geometry, config.build_channel(), trial_rng(base_seed, s)
        )
        try:
            grid_best = _grid_best_rate(
                channel.matrix, geometry, budget, optimizer_config.allocation
            )
            report = optimize(channel.matrix, geometry, budget, optimizer_config)
        except SingularChannelError:
            continue
        rows.append(
            GridcheckRow(
                seed=(int(base_seed) ^ s) & 0xFFFFFFFFFFFFFFFF,
                grid_best_rate=grid_best,
                optimized_rate=report.final_rate,
            )
        )
    if not rows:
        raise SingularChannelError(math.inf)
    median = float(np.median([r.ratio for r in rows]))
    return GridcheckResult(rows=rows, median_ratio=median, passed=median >= GRIDCHECK_THRESHOLD)


def scan_angles(step_deg: float = 0.1, span_deg: float = 90.0) -> np.ndarray:
    """Signed scan grid [-span, span] inclusive, in degrees."""
    count = int(round(2.0 * span_deg / step_deg))
    return np.linspace(-span_deg, span_deg, count + 1)


def run_pattern(
    config: ExperimentConfig,
    beam_angles_deg: list[float],
    quantize: str = "none",
):
    """Far-field cut for a hologram carrying one beam per listed angle.

    Returns (angles_deg, gains_db, amplitudes).  The cut is taken in the
    geometry's scan plane: the y-z plane unless the surface is a single
    column.  quantize: "none", "pin-ideal", or "pin-measured".
    """
    if not beam_angles_deg:
        raise ValueError("at least one beam angle is required")
    geometry = config.build_geometry()
    axis = "x" if geometry.cols == 1 else "y"
    beams = [(scan_direction(a, axis), 1.0) for a in beam_angles_deg]
    amplitudes = average_multibeam(geometry, beams)

    if quantize == "none":
        weights = amplitudes
    elif quantize in ("pin-ideal", "pin-measured"):
        weights = quantize_pin(amplitudes, mode=quantize.split("-", 1)[1]).weights()
    else:
        raise ValueError(f"unknown quantize mode {quantize!r}")

    angles = scan_angles()
    directions = [scan_direction(a, axis) for a in angles]
    excitations = np.ones(geometry.feed_count)
    pattern = radiation_pattern(geometry, weights, excitations, directions)
    return angles, pattern.gains_db, amplitudes
