"""Lindblad and effective non-Hermitian propagation.

Vectorization is column-stacking throughout: vec(rho) concatenates the
columns of rho, so vec(A rho B) = kron(B.T, A) vec(rho) and the master
equation d(rho)/dt = L[rho] becomes d(vec rho)/dt = S vec(rho) with

    S = -i (kron(I, H) - kron(H.T, I))
        + sum_mu [ kron(conj(L_mu), L_mu)
                   - 1/2 kron(I, L_mu^dag L_mu)
                   - 1/2 kron((L_mu^dag L_mu).T, I) ].

Propagation is by dense matrix exponential; the largest generator here
is 36x36 (six levels), where expm is both exact and cheap.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ep3ion import linalg

log = logging.getLogger(__name__)

_HERM_TOL = 1e-9


@dataclass(frozen=True)
class Superoperator:
    """Vectorized master-equation generator acting on vec(rho)."""

    dim: int
    mat: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.mat, dtype=complex)
        if m.shape != (self.dim**2, self.dim**2):
            raise ValueError(f"generator shape {m.shape} does not match dim {self.dim}")
        object.__setattr__(self, "mat", m)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """L[rho] for a matrix-valued argument."""
        return unvec(self.mat @ vec(rho), self.dim)


def vec(rho: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    rho = np.asarray(rho, dtype=complex)
    return rho.reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of :func:`vec`."""
    return np.asarray(v, dtype=complex).reshape((dim, dim), order="F")


def vectorize_lindblad(h: np.ndarray, jumps: list[np.ndarray]) -> Superoperator:
    """Build the vectorized Lindblad generator for H and jump operators."""
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    if h.shape != (n, n):
        raise ValueError("Hamiltonian must be square")
    ident = np.eye(n, dtype=complex)
    s = -1j * (np.kron(ident, h) - np.kron(h.T, ident))
    for L in jumps:
        L = np.asarray(L, dtype=complex)
        if L.shape != (n, n):
            raise ValueError("jump operator dimension mismatch")
        ldl = L.conj().T @ L
        s += np.kron(L.conj(), L)
        s -= 0.5 * np.kron(ident, ldl)
        s -= 0.5 * np.kron(ldl.T, ident)
    return Superoperator(dim=n, mat=s)


def propagate_lindblad(s: Superoperator, rho0: np.ndarray, t: float) -> np.ndarray:
    """Evolve rho0 for time t under the generator.

    Lindblad evolution preserves Hermiticity, so for Hermitian input the
    output is symmetrized to remove roundoff skew (the discarded part is
    logged).  Non-Hermitian inputs, used when propagating eigenmatrices
    or coherence sectors on their own, are returned untouched.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (s.dim, s.dim):
        raise ValueError(f"state shape {rho0.shape} does not match generator dim {s.dim}")
    rho_t = unvec(linalg.expm(s.mat * t) @ vec(rho0), s.dim)
    scale = max(1.0, float(np.abs(rho0).max()))
    if np.abs(rho0 - rho0.conj().T).max() <= _HERM_TOL * scale:
        skew = float(np.abs(rho_t - rho_t.conj().T).max())
        if skew > 1e-12:
            log.debug("hermiticity deviation %.3e symmetrized away at t=%g", skew, t)
        rho_t = 0.5 * (rho_t + rho_t.conj().T)
    return rho_t


def propagate_nh(h: np.ndarray, v0: np.ndarray, t: float) -> np.ndarray:
    """Evolve a state vector under exp(-i H t) for non-Hermitian H."""
    h = np.asarray(h, dtype=complex)
    v0 = np.asarray(v0, dtype=complex)
    return linalg.expm(-1j * h * t) @ v0


def offdiag_sector(rho: np.ndarray) -> np.ndarray:
    """The shelf-coherence column (rho_03, rho_13, rho_23) of a 4-level state.

    Under the reduced master equation this column is closed and evolves
    as v(t) = exp(-i Heff t) v(0) with the 3x3 effective Hamiltonian:
    the shelf |3> is untouched by drives and jumps, so the recycling
    terms cannot feed it.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("offdiag_sector expects a 4x4 density matrix")
    return rho[:3, 3].copy()
