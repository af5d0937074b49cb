"""The 4-level master-equation generator as a 16x16 non-Hermitian operator.

Beyond the boundary modes |psi_n><3| and |3><psi_n| inherited from the
effective Hamiltonian, the generator carries an intrinsic eigenvalue
triplet

    lambda_pm = -2*gamma +- i*sqrt(omega^2 - gamma^2),  lambda_0 = -2*gamma,

whose eigenmatrices live on the |0>,|1>,|2> block and coalesce into a
single matrix rho_EP at omega = gamma: a third-order exceptional point
of the generator itself, distinct from the Hamiltonian one.

The triplet is identified in the numerical spectrum by eigenvalue
proximity to the closed forms, and eigenmatrices are rescaled to the
printed gauge, whose (0,1) entry equals (lambda + 3*gamma)/gamma.  Near
the coalescence the matching is ambiguous; the spectrum is then flagged
and the coalesced subspace returned without gauge fixing.

Detection uses sigma(0) = |u1><u1| with u1 = (|0> - i|2>)/sqrt(2): the
anti-PT conjugation D*conj(.)*D with D = diag(1,-1,1,1) maps the
evolution of |u1><u1| onto that of |u2><u2|, so the trace-free
combination rho_12 - rho_01 equals 2 Re(sigma_12 - sigma_01) and is
measurable from a single prepared state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ep3ion import linalg, readout
from ep3ion.model import SQRT2, SystemParams, build_reduced_hamiltonian, build_reduced_jumps
from ep3ion.dynamics import Superoperator, unvec, vec, vectorize_lindblad

_MATCH_TOL = 1e-6


@dataclass
class LiouvillianEigens:
    """Full 16-value spectrum with the intrinsic triplet singled out.

    ``selected`` indexes (lambda_plus, lambda_minus, lambda_0) within
    ``eigenvalues``; ``eigenmatrices`` are the corresponding 4x4
    eigenmatrices in the printed gauge (Frobenius-normalized without
    gauge when ``condition_flag`` marks the coalescence regime).
    """

    eigenvalues: np.ndarray
    selected: tuple[int, int, int]
    eigenmatrices: list[np.ndarray]
    condition_flag: bool


def build_liouvillian(p: SystemParams) -> Superoperator:
    """Vectorized generator of the reduced 4-level master equation."""
    return vectorize_lindblad(build_reduced_hamiltonian(p), build_reduced_jumps(p))


def closed_form_lambdas(omega: float, gamma: float) -> tuple[complex, complex, complex]:
    """(lambda_plus, lambda_minus, lambda_0) of the intrinsic triplet."""
    s = np.sqrt(complex(omega**2 - gamma**2))
    return (-2.0 * gamma + 1j * s, -2.0 * gamma - 1j * s, complex(-2.0 * gamma))


def intrinsic_eigenmatrices_closed(
    omega: float, gamma: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The printed (rho_plus, rho_minus, rho_0) eigenmatrices.

    Trace-free, supported off |3>, and all equal to ep_eigenmatrix() at
    omega = gamma.  beta = sqrt(omega^2/gamma^2 - 1) is imaginary in the
    broken phase; the matrices stay exact eigenmatrices either way.
    """
    if omega <= 0 or gamma <= 0:
        raise ValueError("omega and gamma must be positive")
    beta = np.sqrt(complex(omega**2 / gamma**2 - 1.0))
    ratio = omega / gamma

    def pm(sign: float) -> np.ndarray:
        m = np.zeros((4, 4), dtype=complex)
        m[0, 1] = m[1, 0] = 1.0 + sign * 1j * beta
        m[1, 2] = m[2, 1] = 1.0 - sign * 1j * beta
        m[0, 2] = 1j * SQRT2 * ratio
        m[2, 0] = -1j * SQRT2 * ratio
        return m

    rho_0 = np.zeros((4, 4), dtype=complex)
    rho_0[0, 1] = rho_0[1, 0] = 1.0
    rho_0[1, 2] = rho_0[2, 1] = 1.0
    rho_0[0, 2] = 1j * SQRT2 / ratio
    rho_0[2, 0] = -1j * SQRT2 / ratio
    return pm(+1.0), pm(-1.0), rho_0


def ep_eigenmatrix() -> np.ndarray:
    """The coalesced eigenmatrix rho_EP at omega = gamma."""
    m = np.zeros((4, 4), dtype=complex)
    m[0, 1] = m[1, 0] = 1.0
    m[1, 2] = m[2, 1] = 1.0
    m[0, 2] = 1j * SQRT2
    m[2, 0] = -1j * SQRT2
    return m


def liouvillian_spectrum(p: SystemParams) -> LiouvillianEigens:
    """Full spectrum of the 16x16 generator with the intrinsic triplet.

    The triplet is matched to the closed-form eigenvalues within 1e-6;
    degenerate matching near omega = gamma sets ``condition_flag``.
    """
    if not p.is_symmetric:
        raise ValueError("intrinsic-triplet analysis assumes the symmetric configuration")
    gamma = p.gamma1
    s = build_liouvillian(p)
    es = linalg.eig(s.mat)
    targets = closed_form_lambdas(p.omega1, gamma)

    scale = max(abs(t) for t in targets) + 1e-30
    ambiguous = (
        abs(targets[0] - targets[1]) <= _MATCH_TOL * scale
        or abs(targets[0] - targets[2]) <= _MATCH_TOL * scale
        or abs(targets[1] - targets[2]) <= _MATCH_TOL * scale
    )

    taken: list[int] = []
    for lam in targets:
        dist = np.abs(es.values - lam)
        dist[taken] = np.inf
        k = int(np.argmin(dist))
        if dist[k] > _MATCH_TOL * max(scale, 1.0):
            raise ValueError(
                f"no eigenvalue within {_MATCH_TOL} of the closed form {lam:.6g}"
            )
        taken.append(k)

    flagged = es.condition_flag or ambiguous
    mats: list[np.ndarray] = []
    for lam, k in zip(targets, taken):
        m = unvec(es.vectors[:, k], 4)
        if flagged:
            m = m / np.linalg.norm(m)
        else:
            target_01 = (lam + 3.0 * gamma) / gamma
            if abs(m[0, 1]) < 1e-12:
                raise ValueError("eigenmatrix (0,1) entry vanishes; cannot gauge-fix")
            m = m * (target_01 / m[0, 1])
        mats.append(m)
    return LiouvillianEigens(
        eigenvalues=es.values, selected=tuple(taken), eigenmatrices=mats,
        condition_flag=flagged,
    )


def apt_conjugate(m: np.ndarray) -> np.ndarray:
    """Anti-PT conjugation D conj(M) D with D = diag(1,-1,1,1)."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError("apt_conjugate expects a 4x4 matrix")
    d = np.array([1.0, -1.0, 1.0, 1.0])
    return d[:, None] * m.conj() * d[None, :]


def u1_state() -> np.ndarray:
    """(|0> - i|2>)/sqrt(2) in the 4-level basis."""
    return np.array([1.0, 0.0, -1j, 0.0], dtype=complex) / SQRT2


def u2_state() -> np.ndarray:
    """(|0> + i|2>)/sqrt(2), the anti-PT image of u1."""
    return np.array([1.0, 0.0, 1j, 0.0], dtype=complex) / SQRT2


def detect_ep3(
    p: SystemParams,
    t_grid: np.ndarray,
    shots: int | None = None,
    rng: np.random.Generator | int | None = None,
    flip_prob: float = 0.0,
) -> np.ndarray:
    """The measurable transition signal 2 Re(sigma_12 - sigma_01) over t_grid.

    sigma(t) evolves from |u1><u1| under the full master equation.  With
    ``shots`` the two off-diagonal elements are estimated through the
    phase-scan readout emulator instead of read exactly.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if (t_grid < 0).any():
        raise ValueError("times must be non-negative")
    u1 = u1_state()
    sigma0 = np.outer(u1, u1.conj())
    s = build_liouvillian(p)
    props = linalg.expm_batch(s.mat[None, :, :] * t_grid[:, None, None])
    vecs = props @ vec(sigma0)

    gen = np.random.default_rng(rng) if shots is not None else None
    out = np.empty(len(t_grid))
    for k in range(len(t_grid)):
        sigma_t = unvec(vecs[k], 4)
        sigma_t = 0.5 * (sigma_t + sigma_t.conj().T)
        if shots is None:
            out[k] = 2.0 * (sigma_t[1, 2] - sigma_t[0, 1]).real
        else:
            r12, chi12 = readout.phase_scan_readout(
                sigma_t, (1, 2), shots=shots, rng=gen, flip_prob=flip_prob
            )
            r01, chi01 = readout.phase_scan_readout(
                sigma_t, (0, 1), shots=shots, rng=gen, flip_prob=flip_prob
            )
            out[k] = 2.0 * (r12 * np.cos(chi12) - r01 * np.cos(chi01))
    return out
