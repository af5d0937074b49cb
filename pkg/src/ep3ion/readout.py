"""Phase-scan estimation of density-matrix coherences.

Only the population of level 1 is detected.  To read a coherence
rho_ij = r e^{i chi}, an analysis pulse R(pi/2, beta) on a transition
touching level 1 converts the coherence into a beta-dependent
population,

    N1(beta) = (rho_ii + rho_jj)/2 +- r sin(chi - beta),

and a scan over beta (12 uniform phases by default) is regressed on
[1, sin(beta), cos(beta)] to recover amplitude and phase.  Pairs not
touching level 1 are routed through a pi pre-pulse on 1-3, which maps
rho_03 -> i rho'_01 and rho_23 -> i rho'_21 onto scannable pairs; the
i is removed by a -pi/2 phase offset.

Each scan point is a binomial draw of ``shots`` detections, optionally
corrupted by a symmetric discrimination-flip probability f, which
biases the amplitude by the factor (1 - 2f) and leaves the phase
unbiased.  ``exact=True`` skips sampling and regresses on the exact
populations (still including the flip bias), which is useful as an
infinite-shot limit.
"""

from __future__ import annotations

import numpy as np

from ep3ion import pulses

DEFAULT_PHASES = 12

# pair -> (needs 1-3 pre-pulse, scanned (i, j), sign of the sin(chi - beta)
# term when level 1 is detected, additive phase offset)
_PAIR_TABLE: dict[tuple[int, int], tuple[bool, tuple[int, int], float, float]] = {
    (0, 1): (False, (0, 1), +1.0, 0.0),
    (1, 2): (False, (1, 2), -1.0, 0.0),
    (1, 3): (False, (1, 3), -1.0, 0.0),
    (0, 3): (True, (0, 1), +1.0, -np.pi / 2),
    (2, 3): (True, (2, 1), +1.0, -np.pi / 2),
}


def default_phase_grid(points: int = DEFAULT_PHASES) -> np.ndarray:
    """Uniform analysis phases covering [0, 2*pi)."""
    if points < 4:
        raise ValueError("need at least 4 analysis phases")
    return np.arange(points) * (2.0 * np.pi / points)


def phase_scan_readout(
    rho: np.ndarray,
    pair: tuple[int, int],
    betas: np.ndarray | None = None,
    shots: int = 200,
    rng: np.random.Generator | int | None = None,
    exact: bool = False,
    flip_prob: float = 0.0,
) -> tuple[float, float]:
    """Estimate (|rho_ij|, arg rho_ij) for a supported level pair.

    ``rho`` may live on any register holding levels 0..3 (4- or 5-level).
    Returns the amplitude estimate r_hat >= 0 and the phase chi_hat in
    (-pi, pi].
    """
    pair = (int(pair[0]), int(pair[1]))
    if pair not in _PAIR_TABLE:
        raise ValueError(f"unsupported readout pair {pair}; one level must map onto a scan")
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 4:
        raise ValueError("rho must be square and hold at least levels 0..3")
    if not 0.0 <= flip_prob < 0.5:
        raise ValueError("flip probability must lie in [0, 0.5)")
    if betas is None:
        betas = default_phase_grid()
    betas = np.asarray(betas, dtype=float)
    if betas.size < 4:
        raise ValueError("need at least 4 analysis phases")
    if not exact and shots < 1:
        raise ValueError("shots must be positive unless exact=True")

    dim = rho.shape[0]
    prepulse, scan, _, offset = _PAIR_TABLE[pair]
    if prepulse:
        u = pulses.rotation(pulses.PulseOp(1, 3, np.pi, 0.0), dim)
        rho = u @ rho @ u.conj().T

    gen = np.random.default_rng(rng)
    y = np.empty(betas.size)
    for k, beta in enumerate(betas):
        r = pulses.rotation(pulses.PulseOp(scan[0], scan[1], np.pi / 2, beta), dim)
        n1 = float(np.clip((r @ rho @ r.conj().T)[1, 1].real, 0.0, 1.0))
        q = n1 * (1.0 - 2.0 * flip_prob) + flip_prob
        y[k] = q if exact else gen.binomial(shots, q) / shots

    design = np.column_stack([np.ones_like(betas), np.sin(betas), np.cos(betas)])
    (_, a_s, a_c), *_ = np.linalg.lstsq(design, y, rcond=None)

    sign = _PAIR_TABLE[pair][2]
    r_hat = float(np.hypot(a_s, a_c))
    chi_hat = float(np.angle(np.exp(1j * (np.arctan2(sign * a_c, -sign * a_s) + offset))))
    return r_hat, chi_hat
