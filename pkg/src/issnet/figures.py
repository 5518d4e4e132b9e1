"""Figure rendering for experiment and report artifacts.

matplotlib is imported lazily with the Agg backend so library users
who never plot pay nothing, and rendering works without a display.
Every function writes one PNG and returns its path.  Curves and points
are downsampled with fixed strides, never randomly, so a rerun draws
the identical picture.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

from .truncate import InterfaceRecording
from .wellposed import GrowthProfile


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _sample_steps(total: int, cap: int) -> list[int]:
    if total <= cap:
        return list(range(total))
    stride = -(-total // cap)
    ks = list(range(0, total, stride))
    if ks[-1] != total - 1:
        ks.append(total - 1)
    return ks


def trajectory_fan(
    series: Mapping[int, Sequence[float]],
    path: str | Path,
    title: str = "cell densities",
    max_lines: int = 200,
    max_points: int = 2000,
) -> Path:
    """One curve per observed subsystem over the run."""
    plt = _plt()
    path = Path(path)
    indices = sorted(series)[:max_lines]
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    for i in indices:
        values = series[i]
        ks = _sample_steps(len(values), max_points)
        ax.plot(ks, [values[k] for k in ks], lw=0.8, alpha=0.7)
    ax.set_xlabel("step k")
    ax.set_ylabel("state")
    ax.set_title(f"{title} ({len(indices)} of {len(series)} series)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def decay_with_envelope(
    v_series: Sequence[float],
    alpha: float,
    input_bound: float,
    path: str | Path,
    title: str = "network storage decay",
) -> Path:
    """Semilog V(k) against the certified envelope max(alpha^k V0, bound)."""
    plt = _plt()
    path = Path(path)
    ks = list(range(len(v_series)))
    envelope = []
    level = v_series[0] if v_series else 0.0
    for _ in ks:
        envelope.append(max(level, input_bound))
        level = alpha * level
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.semilogy(ks, [max(v, 1e-300) for v in v_series], lw=1.2, label="V(k)")
    ax.semilogy(ks, envelope, lw=1.0, ls="--", label="certified envelope")
    ax.axhline(input_bound, color="gray", lw=0.8, ls=":", label="input bound")
    ax.set_xlabel("step k")
    ax.set_ylabel("V")
    ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def growth_profile_figure(profile: GrowthProfile, path: str | Path) -> Path:
    """Empirical local gain per index, one curve per probe radius."""
    plt = _plt()
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    for pos, r in enumerate(profile.radii):
        ax.plot(
            profile.indices,
            [profile.gains[i][pos] for i in profile.indices],
            lw=1.0,
            marker=".",
            ms=2.5,
            label=f"radius {r:g}",
        )
    ax.axhline(profile.cap, color="gray", lw=0.8, ls=":", label="divergence cap")
    if profile.cap_witness is not None:
        ax.axvline(profile.cap_witness[0], color="red", lw=0.8, ls="--")
    ax.set_xlabel("subsystem index")
    ax.set_ylabel("empirical gain")
    verdict = "diverges" if profile.diverges else "bounded"
    ax.set_title(f"local growth profile ({verdict})")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def interface_figure(recording: InterfaceRecording, path: str | Path) -> Path:
    """Sup norm of the recorded boundary signal over time."""
    plt = _plt()
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ks = list(range(len(recording.sup_norms)))
    ax.plot(ks, recording.sup_norms, lw=1.2)
    ax.set_xlabel("step k")
    ax.set_ylabel("|interface|_sup")
    ax.set_title(f"interface signal, {len(recording.interface)} boundary subsystems of 1..{recording.n}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def gain_margin_figure(alpha, radius: float, path: str | Path) -> Path:
    """Aggregate contraction gain against the identity on [0, radius]."""
    plt = _plt()
    path = Path(path)
    n = 256
    rs = [radius * j / (n - 1) for j in range(n)]
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.plot(rs, rs, ls="--", lw=1.0, color="gray", label="identity")
    ax.plot(rs, [alpha(r) for r in rs], lw=1.4, label="alpha")
    ax.set_xlabel("r")
    ax.set_ylabel("gain value")
    ax.set_title("contraction gain vs identity")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
