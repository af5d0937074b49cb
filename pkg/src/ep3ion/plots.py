"""Figure rendering for the reporting path.

Each helper draws one pipeline's summary figure and writes it next to
the delimited output.  The Agg backend keeps rendering headless, and
the PNG date chunk is stripped so identical runs produce identical
bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

TWO_PI = 2.0 * np.pi
_META = {"Date": None}  # no timestamp chunk: outputs must be bit-reproducible


def _save(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata=_META)
    plt.close(fig)


def plot_spectrum(ratios: np.ndarray, energies: np.ndarray, gamma: float, path: str) -> None:
    """Re and Im eigenenergy branches against omega/gamma."""
    energies = np.asarray(energies)
    fig, (ax_re, ax_im) = plt.subplots(1, 2, figsize=(8.0, 3.2))
    for k in range(energies.shape[1]):
        ax_re.plot(ratios, energies[:, k].real / TWO_PI, "-", lw=1.5)
        ax_im.plot(ratios, energies[:, k].imag / TWO_PI, "-", lw=1.5)
    for ax, label in ((ax_re, "Re E / 2$\\pi$ (MHz)"), (ax_im, "Im E / 2$\\pi$ (MHz)")):
        ax.axvline(1.0, color="0.8", lw=0.8, zorder=0)
        ax.set_xlabel("$\\Omega/\\gamma$")
        ax.set_ylabel(label)
    _save(fig, path)


def plot_line(
    detunings: np.ndarray,
    populations: np.ndarray,
    errbars: np.ndarray | None,
    fit_curve: np.ndarray | None,
    path: str,
) -> None:
    """One absorption line with its fitted model curve."""
    x = np.asarray(detunings) / TWO_PI
    fig, ax = plt.subplots(figsize=(4.6, 3.2))
    if errbars is not None and np.any(np.asarray(errbars) > 0):
        ax.errorbar(x, populations, yerr=errbars, fmt="o", ms=3.5, capsize=2, lw=1)
    else:
        ax.plot(x, populations, "o", ms=3.5)
    if fit_curve is not None:
        ax.plot(x, fit_curve, "-", lw=1.5)
    ax.set_xlabel("$\\delta_a$ / 2$\\pi$ (MHz)")
    ax.set_ylabel("$N_a$")
    _save(fig, path)


def plot_bands(
    thetas: np.ndarray,
    bands: np.ndarray,
    e_b: complex,
    windings: list[float],
    m: int,
    path: str,
) -> None:
    """Band trajectories in the complex energy plane with the base energy."""
    fig, ax = plt.subplots(figsize=(4.6, 4.0))
    for k in range(bands.shape[1]):
        ax.plot(bands[:, k].real / TWO_PI, bands[:, k].imag / TWO_PI, "-", lw=1.2)
        ax.plot(bands[0, k].real / TWO_PI, bands[0, k].imag / TWO_PI, "o", ms=4)
    ax.plot(e_b.real / TWO_PI, e_b.imag / TWO_PI, "k*", ms=11)
    w_text = ", ".join(f"{w:+.3f}" for w in windings)
    ax.set_title(f"m = {m}; W = {w_text}", fontsize=10)
    ax.set_xlabel("Re E / 2$\\pi$ (MHz)")
    ax.set_ylabel("Im E / 2$\\pi$ (MHz)")
    _save(fig, path)


def plot_tomography(
    grid: np.ndarray,
    values: np.ndarray,
    zero_angles: list[float],
    excluded: list[bool],
    kind: str,
    path: str,
) -> None:
    """Population-difference scan with detected and excluded zeros."""
    fig, ax = plt.subplots(figsize=(4.6, 3.2))
    ax.axhline(0.0, color="0.8", lw=0.8, zorder=0)
    ax.plot(grid, values, "o-", ms=3, lw=1)
    for angle, drop in zip(zero_angles, excluded):
        if drop:
            ax.plot(angle, 0.0, "rx", ms=9, mew=2)
        else:
            ax.plot(angle, 0.0, "g^", ms=8)
    ax.set_xlabel("$\\varphi$ (rad)")
    ax.set_ylabel(f"$D_{{{kind}}}(\\varphi)$")
    _save(fig, path)


def plot_quench(
    gamma_t: np.ndarray,
    values: np.ndarray,
    fitted: np.ndarray | None,
    ylabel: str,
    path: str,
) -> None:
    """Quench-response samples with the winning fitted model."""
    fig, ax = plt.subplots(figsize=(4.6, 3.2))
    ax.plot(gamma_t, values, "o", ms=3.5)
    if fitted is not None:
        dense = np.linspace(gamma_t.min(), gamma_t.max(), 400)
        ax.plot(dense, np.interp(dense, gamma_t, fitted), "-", lw=1.2, alpha=0.9)
    ax.set_xlabel("$\\gamma t$")
    ax.set_ylabel(ylabel)
    _save(fig, path)


def plot_lambda_triplet(ratios: np.ndarray, lambdas: np.ndarray, gamma: float, path: str) -> None:
    """Intrinsic eigenvalue triplet against omega/gamma, in units of gamma."""
    lambdas = np.asarray(lambdas)
    fig, (ax_re, ax_im) = plt.subplots(1, 2, figsize=(8.0, 3.2))
    for k in range(lambdas.shape[1]):
        ax_re.plot(ratios, lambdas[:, k].real / gamma, "o-", ms=3, lw=1)
        ax_im.plot(ratios, lambdas[:, k].imag / gamma, "o-", ms=3, lw=1)
    for ax, label in ((ax_re, "Re $\\lambda/\\gamma$"), (ax_im, "Im $\\lambda/\\gamma$")):
        ax.axvline(1.0, color="0.8", lw=0.8, zorder=0)
        ax.set_xlabel("$\\Omega/\\gamma$")
        ax.set_ylabel(label)
    _save(fig, path)
