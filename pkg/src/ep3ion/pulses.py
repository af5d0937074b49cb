"""Coherent pulse algebra for state preparation on the 5-level register.

Levels 0..3 are the dynamics manifold; index 4 is the auxiliary probe
level |a>.  A resonant pulse on the i-j transition with area alpha and
phase beta applies

    R_ij(alpha, beta) = exp(-i alpha T_ij(beta)),
    T_ij(beta) = (e^{i beta}|i><j| + e^{-i beta}|j><i|) / 2,

so R|j> = cos(alpha/2)|j> - i sin(alpha/2) e^{i beta}|i>.  The two-tone
pulse drives 1-0 and 1-2 simultaneously with equal weight, generating
exp(-i alpha Sx) on the spin-1 block.

Sequences are lists applied first-element-first to the initialized
state |1>.  Each prep_* helper below returns the sequence that maps |1>
onto the advertised target (up to a global phase):

    probe   -> |a>
    quench  -> (|0> + |3>)/sqrt(2)
    uz(phi) -> (u_z(phi) + |3>)/sqrt(2)   and likewise ux, u0
    u1      -> (|0> - i|2>)/sqrt(2)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ep3ion import linalg
from ep3ion.model import SQRT2

DIM = 5
AUX = 4


@dataclass(frozen=True)
class PulseOp:
    """Single-transition pulse R_ij(alpha, beta)."""

    i: int
    j: int
    alpha: float
    beta: float = 0.0

    def __post_init__(self) -> None:
        if self.i == self.j:
            raise ValueError("pulse needs two distinct levels")
        if min(self.i, self.j) < 0:
            raise ValueError("level indices must be non-negative")


@dataclass(frozen=True)
class TwoTonePulse:
    """Equal-weight 1-0 and 1-2 drive, exp(-i alpha Sx) on levels 0..2."""

    alpha: float


def generator(op: PulseOp | TwoTonePulse, dim: int = DIM) -> np.ndarray:
    """Hermitian generator T such that the pulse is exp(-i alpha T)."""
    t = np.zeros((dim, dim), dtype=complex)
    if isinstance(op, TwoTonePulse):
        if dim < 3:
            raise ValueError("two-tone pulse needs levels 0..2")
        t[1, 0] = t[1, 2] = 1.0 / SQRT2
        t[0, 1] = t[2, 1] = 1.0 / SQRT2
        return t
    if max(op.i, op.j) >= dim:
        raise ValueError(f"pulse levels ({op.i},{op.j}) exceed dimension {dim}")
    t[op.i, op.j] = 0.5 * np.exp(1j * op.beta)
    t[op.j, op.i] = 0.5 * np.exp(-1j * op.beta)
    return t


def rotation(op: PulseOp | TwoTonePulse, dim: int = DIM) -> np.ndarray:
    """Unitary matrix of a single pulse."""
    return linalg.expm(-1j * op.alpha * generator(op, dim))


def apply_sequence(
    seq: list[PulseOp | TwoTonePulse], start: int | np.ndarray, dim: int = DIM
) -> np.ndarray:
    """Apply pulses in list order; start is a level index or a state vector."""
    if isinstance(start, (int, np.integer)):
        if not 0 <= start < dim:
            raise ValueError(f"start level {start} outside register of dimension {dim}")
        psi = basis_state(int(start), dim)
    else:
        psi = np.asarray(start, dtype=complex)
        if psi.ndim != 1:
            raise ValueError("start must be a level index or a state vector")
    for op in seq:
        psi = rotation(op, psi.shape[0]) @ psi
    return psi


def basis_state(level: int, dim: int = DIM) -> np.ndarray:
    psi = np.zeros(dim, dtype=complex)
    psi[level] = 1.0
    return psi


def prepare(seq: list[PulseOp | TwoTonePulse], dim: int = DIM) -> np.ndarray:
    """Run a sequence from the initialized level |1>."""
    return apply_sequence(seq, 1, dim)


def prep_probe() -> list[PulseOp | TwoTonePulse]:
    return [PulseOp(1, AUX, np.pi, 0.0)]


def prep_quench() -> list[PulseOp | TwoTonePulse]:
    return [PulseOp(1, 0, np.pi / 2, 0.0), PulseOp(1, 3, np.pi, 0.0)]


def prep_uz(phi: float) -> list[PulseOp | TwoTonePulse]:
    return [
        PulseOp(1, 3, np.pi / 2, np.pi),
        PulseOp(1, 0, np.pi / 2, -phi),
        PulseOp(1, 2, np.pi / 2, phi + np.pi),
        PulseOp(1, 0, np.pi, -phi),
    ]


def prep_ux(phi: float) -> list[PulseOp | TwoTonePulse]:
    # The first four pulses land on (|EP> + |3>)/sqrt(2); the two-tone
    # pulse then rotates the spin-1 block by exp(i phi Sx).
    return [
        PulseOp(1, 3, np.pi / 2, np.pi),
        PulseOp(1, 0, np.pi / 2, 0.0),
        PulseOp(1, 2, np.pi / 2, np.pi),
        PulseOp(1, 0, np.pi, 0.0),
        TwoTonePulse(-phi),
    ]


def prep_u0(phi: float) -> list[PulseOp | TwoTonePulse]:
    return [
        PulseOp(1, 3, np.pi / 2, np.pi),
        PulseOp(1, 0, 2.0 * phi, 0.0),
        PulseOp(1, 2, np.pi, 0.0),
        PulseOp(1, 0, np.pi / 2, 0.0),
        PulseOp(1, 2, np.pi, 0.0),
    ]


def prep_u1() -> list[PulseOp | TwoTonePulse]:
    return [PulseOp(1, 2, np.pi / 2, np.pi / 2), PulseOp(1, 0, np.pi, 0.0)]
