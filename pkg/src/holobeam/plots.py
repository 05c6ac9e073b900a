"""SVG figure rendering for the command-line reports.

Figures are written next to the CSV outputs.  Rendering is deterministic:
the SVG backend gets a fixed hash salt and no timestamp metadata, so a
re-run with the same inputs reproduces the files byte for byte.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

matplotlib.rcParams["svg.hashsalt"] = "holobeam"

_SAVEFIG = {"format": "svg", "metadata": {"Date": None}}


def pattern_figure(angles_deg, gains_db, beam_angles_deg, path) -> None:
    """Far-field cut with the requested beam angles marked."""
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.plot(angles_deg, gains_db, lw=1.0)
    for a in beam_angles_deg:
        ax.axvline(a, color="tab:red", ls="--", lw=0.8)
    ax.set_xlim(angles_deg[0], angles_deg[-1])
    ax.set_ylim(-60.0, 3.0)
    ax.set_xlabel("scan angle (deg)")
    ax.set_ylabel("normalized gain (dB)")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)


def convergence_figure(trajectories, path) -> None:
    """Sum-rate trajectories, one line per trial."""
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    for label, rates in trajectories:
        ax.plot(range(len(rates)), rates, lw=1.0, label=label)
    ax.set_xlabel("outer iteration")
    ax.set_ylabel("sum rate (bits/s/Hz)")
    ax.grid(True, alpha=0.3)
    if len(trajectories) <= 8:
        ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)


def sweep_figure(sizes, proposed_means, baseline_means, path) -> None:
    """Mean sum rate against aperture size for both schemes."""
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.plot(sizes, proposed_means, "o-", label="optimized")
    ax.plot(sizes, baseline_means, "s--", label="superposition baseline")
    ax.set_xticks(list(sizes))
    ax.set_xlabel("aperture size (elements per side)")
    ax.set_ylabel("mean sum rate (bits/s/Hz)")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)
