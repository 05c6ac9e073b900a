"""Command-line experiment harness.

Four commands, all driven by a flat key-value configuration file:

  pattern    far-field cut of a multibeam hologram, optionally quantized
  optimize   sum-rate optimization over seeded random channel trials
  sweep      aperture size sweep, optimized scheme against the baseline
  gridcheck  optimizer against exhaustive search on a tiny aperture

Results land in the output directory as CSV files (6 decimal places, stable
row order); --svg renders matplotlib figures alongside them.  Re-running a
command with the same configuration and seed reproduces the CSVs byte for
byte.

Exit codes: 0 success, 2 invalid arguments or configuration, 3 I/O failure,
4 no usable experiment result (every trial singular, or grid check failed).
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from .beamforming import SingularChannelError
from .config import ConfigError, load_config
from . import plots


def _parse_beams(text: str) -> list[float]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("at least one beam angle is required")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise ValueError(f"beam angles must be numbers, got {text!r}") from None


def _write_csv(path, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(header + "\n")
        for row in rows:
            f.write(row + "\n")
    print(f"wrote {path}")


def _local_peaks(angles, gains, count: int):
    """Strict local maxima of a 1-D cut, strongest first, at most `count`."""
    peaks = [
        i
        for i in range(1, len(gains) - 1)
        if gains[i] > gains[i - 1] and gains[i] > gains[i + 1]
    ]
    peaks.sort(key=lambda i: gains[i], reverse=True)
    return [(angles[i], gains[i]) for i in peaks[:count]]


def _cmd_pattern(config, args) -> int:
    from .experiments import run_pattern

    beams = _parse_beams(args.beams)
    angles, gains, _ = run_pattern(config, beams, args.quantize)
    _write_csv(
        os.path.join(args.out, "pattern.csv"),
        "theta_deg,gain_db",
        (f"{a:.6f},{g:.6f}" for a, g in zip(angles, gains)),
    )
    for angle, gain in _local_peaks(angles, gains, len(beams)):
        print(f"main lobe at {angle:+.1f} deg ({gain:.2f} dB)")
    if args.svg:
        path = os.path.join(args.out, "pattern.svg")
        plots.pattern_figure(angles, gains, beams, path)
        print(f"wrote {path}")
    return 0


def _cmd_optimize(config, args) -> int:
    from .experiments import run_optimize_trials

    seed = config.seed if args.seed is None else args.seed
    results = run_optimize_trials(config, seed=seed)

    rows = []
    for r in results:
        final = r.report.final_rate if r.succeeded else math.nan
        baseline = r.baseline_rate if r.baseline_rate is not None else math.nan
        iterations = r.report.iterations if r.succeeded else 0
        rows.append(f"{r.seed},{final:.6f},{baseline:.6f},{iterations}")
        if r.succeeded:
            print(
                f"trial {r.trial}: rate {final:.4f} bits/s/Hz "
                f"(baseline {baseline:.4f}, {iterations} iterations)"
            )
        else:
            print(f"trial {r.trial}: skipped ({r.error})")
    _write_csv(
        os.path.join(args.out, "optimize_summary.csv"),
        "seed,final_rate,baseline_rate,iterations",
        rows,
    )

    succeeded = [r for r in results if r.succeeded]
    for r in succeeded:
        _write_csv(
            os.path.join(args.out, f"convergence_trial{r.trial:03d}.csv"),
            "iteration,sum_rate",
            (
                f"{i},{rate:.6f}"
                for i, rate in enumerate(r.report.rate_trajectory)
            ),
        )
    if args.svg and succeeded:
        path = os.path.join(args.out, "convergence.svg")
        plots.convergence_figure(
            [(f"trial {r.trial}", r.report.rate_trajectory) for r in succeeded], path
        )
        print(f"wrote {path}")

    if not succeeded:
        print("error: every trial hit a singular channel", file=sys.stderr)
        return 4
    mean = sum(r.report.final_rate for r in succeeded) / len(succeeded)
    print(f"mean rate over {len(succeeded)} successful trial(s): {mean:.4f} bits/s/Hz")
    return 0


def _cmd_sweep(config, args) -> int:
    from .experiments import run_sweep

    seed = config.seed if args.seed is None else args.seed
    points = run_sweep(config, seed=seed)
    _write_csv(
        os.path.join(args.out, "sweep.csv"),
        "M,rate_proposed_mean,rate_baseline_mean,rate_proposed_std,trials",
        (
            f"{p.size},{p.proposed_mean:.6f},{p.baseline_mean:.6f},"
            f"{p.proposed_std:.6f},{p.trials}"
            for p in points
        ),
    )
    for p in points:
        print(
            f"size {p.size}: optimized {p.proposed_mean:.4f}, "
            f"baseline {p.baseline_mean:.4f} bits/s/Hz over {p.trials} trial(s)"
        )
    if args.svg:
        path = os.path.join(args.out, "sweep.svg")
        plots.sweep_figure(
            [p.size for p in points],
            [p.proposed_mean for p in points],
            [p.baseline_mean for p in points],
            path,
        )
        print(f"wrote {path}")
    if all(p.trials == 0 for p in points):
        print("error: every trial at every size failed", file=sys.stderr)
        return 4
    return 0


def _cmd_gridcheck(config, args) -> int:
    from .experiments import run_gridcheck

    seed = config.seed if args.seed is None else args.seed
    result = run_gridcheck(config, seed=seed)
    _write_csv(
        os.path.join(args.out, "gridcheck.csv"),
        "seed,grid_best_rate,optimized_rate,ratio",
        (
            f"{r.seed},{r.grid_best_rate:.6f},{r.optimized_rate:.6f},{r.ratio:.6f}"
            for r in result.rows
        ),
    )
    verdict = "PASS" if result.passed else "FAIL"
    print(f"median optimality ratio {result.median_ratio:.6f} ({verdict})")
    return 0 if result.passed else 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holobeam",
        description="Holographic surface beamforming experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="configuration file path")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--seed", type=int, default=None, help="override experiment.seed")
        p.add_argument("--svg", action="store_true", help="also render SVG figures")

    p = sub.add_parser("pattern", help="far-field cut of a multibeam hologram")
    common(p)
    p.add_argument(
        "--beams",
        required=True,
        help="comma-separated signed scan angles in degrees, e.g. --beams=-3,23",
    )
    p.add_argument(
        "--quantize",
        choices=["none", "pin-ideal", "pin-measured"],
        default="none",
        help="diode quantization applied to the hologram",
    )
    p.set_defaults(handler=_cmd_pattern)

    p = sub.add_parser("optimize", help="sum-rate optimization over channel trials")
    common(p)
    p.set_defaults(handler=_cmd_optimize)

    p = sub.add_parser("sweep", help="aperture size sweep against the baseline")
    common(p)
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("gridcheck", help="optimizer vs exhaustive grid, tiny aperture")
    common(p)
    p.set_defaults(handler=_cmd_gridcheck)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    try:
        os.makedirs(args.out, exist_ok=True)
        return args.handler(config, args)
    except SingularChannelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
