"""Operators and closed forms for the dissipative three-level system.

The physical system is a driven three-level manifold |0>, |1>, |2> with
population loss out of |1> and |2| at rates gamma1 and gamma2.  Each
lost quantum is recycled into |0>, back into the leaky level itself, or
into a fourth shelf level |3>, with equal branching, so the reduced
master equation lives on the four levels |0>..|3> with six jump
operators of strength c_n = sqrt(2*gamma_n/3).

Dropping the jump (recycling) terms leaves the effective non-Hermitian
Hamiltonian on |0>..|2>:

    Heff = [[-delta0, omega1/sqrt(2), 0],
            [omega1/sqrt(2), -delta1 - i*gamma1, omega2/sqrt(2)],
            [0, omega2/sqrt(2), -i*gamma2]]

In the symmetric configuration (omega1 = omega2 = omega, gamma2 =
2*gamma1, no detunings) this is omega*Sx + i*gamma*Sz - i*gamma*I in
spin-1 notation, which is PT symmetric up to the -i*gamma shift and has
a third-order exceptional point at omega = gamma.

All rates are rad/us.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SQRT2 = np.sqrt(2.0)

#: Default decay branching fraction of the auxiliary level into the
#: dark shelf manifold.
BRANCH_F_DEFAULT = 0.816


@dataclass(frozen=True)
class SystemParams:
    """Drive and decay parameters of the three-level system (rad/us).

    delta0 and delta1 are detunings of the two drives, entering Heff as
    diag(-delta0, -delta1, 0).
    """

    omega1: float
    omega2: float
    gamma1: float
    gamma2: float
    delta0: float = 0.0
    delta1: float = 0.0

    def __post_init__(self) -> None:
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise ValueError("decay rates must be non-negative")

    @classmethod
    def symmetric(cls, omega: float, gamma: float) -> "SystemParams":
        """The PT-symmetric working point: equal drives, gamma2 = 2*gamma1."""
        return cls(omega1=omega, omega2=omega, gamma1=gamma, gamma2=2.0 * gamma)

    @property
    def is_symmetric(self) -> bool:
        scale = max(abs(self.omega1), abs(self.gamma1), 1e-300)
        return (
            abs(self.omega1 - self.omega2) <= 1e-12 * scale
            and abs(self.gamma2 - 2.0 * self.gamma1) <= 1e-12 * scale
        )


@dataclass(frozen=True)
class AuxParams:
    """Auxiliary probe level parameters.

    omega_a couples |1><a| at strength omega_a/2; delta_a enters as
    -delta_a |a><a|.  gamma_a is the inverse lifetime of |a| (1/tau_a)
    and branch_f the fraction of its decay that shelves into the dark
    manifold counted together with |a| by the measurement.  n0 is the
    state-preparation-and-measurement scale of the line.
    """

    omega_a: float
    delta_a: float = 0.0
    gamma_a: float = 1.0 / 7400.0
    branch_f: float = BRANCH_F_DEFAULT
    n0: float = 1.0

    def __post_init__(self) -> None:
        if self.gamma_a < 0:
            raise ValueError("gamma_a must be non-negative")
        if not 0.0 <= self.branch_f <= 1.0:
            raise ValueError("branch_f must lie in [0, 1]")
        if not 0.0 < self.n0 <= 1.0:
            raise ValueError("n0 must lie in (0, 1]")


@dataclass(frozen=True)
class FullParams:
    """Six-level model with the fast intermediate levels kept explicit.

    j1, j2 couple |1>,|2> to their fast partners |e1>,|e2>, which decay
    at total rate big_gamma with equal branching into three channels.
    Adiabatic elimination of the fast levels gives the reduced rates
    gamma_n = 2*j_n**2/big_gamma of ``base``.  The elimination is only
    trustworthy for j_n << big_gamma: construction fails above
    big_gamma/10 and sets ``elimination_warning`` above big_gamma/50.
    """

    j1: float
    j2: float
    big_gamma: float
    base: SystemParams = field(compare=False)
    elimination_warning: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        if self.big_gamma <= 0:
            raise ValueError("big_gamma must be positive")
        if max(self.j1, self.j2) > self.big_gamma / 10.0:
            raise ValueError("couplings too strong for adiabatic elimination (j > big_gamma/10)")

    @classmethod
    def from_rates(
        cls, gamma1: float, gamma2: float, big_gamma: float, omega1: float, omega2: float
    ) -> "FullParams":
        """Build from target reduced rates, inverting gamma_n = 2*j_n**2/big_gamma."""
        j1 = np.sqrt(gamma1 * big_gamma / 2.0)
        j2 = np.sqrt(gamma2 * big_gamma / 2.0)
        base = SystemParams(omega1=omega1, omega2=omega2, gamma1=gamma1, gamma2=gamma2)
        warn = max(j1, j2) > big_gamma / 50.0
        return cls(j1=j1, j2=j2, big_gamma=big_gamma, base=base, elimination_warning=warn)


@dataclass(frozen=True)
class SymmetryOp:
    """A (possibly antiunitary) symmetry U = unitary_part * K.

    ``conjugates`` marks the antiunitary case, where K is elementwise
    complex conjugation applied before the unitary sandwich.
    """

    unitary_part: np.ndarray
    conjugates: bool

    def __post_init__(self) -> None:
        u = np.asarray(self.unitary_part, dtype=complex)
        if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-12):
            raise ValueError("unitary_part is not unitary")
        object.__setattr__(self, "unitary_part", u)


def spin1(axis: str) -> np.ndarray:
    """Spin-1 matrix Sx or Sz in the |0>,|1>,|2> basis."""
    if axis == "x":
        return np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / SQRT2
    if axis == "z":
        return np.diag([1.0, 0.0, -1.0]).astype(complex)
    raise ValueError(f"unknown spin-1 axis {axis!r} (use 'x' or 'z')")


def ep_state() -> np.ndarray:
    """The coalesced eigenstate (-1, i*sqrt(2), 1)/2 at the EP3."""
    return np.array([-1.0, 1j * SQRT2, 1.0], dtype=complex) / 2.0


def pt_symmetry_op() -> SymmetryOp:
    """Parity-time operation: level reversal times conjugation; fixes heff."""
    return SymmetryOp(unitary_part=np.fliplr(np.eye(3)).astype(complex), conjugates=True)


def apt_symmetry_op() -> SymmetryOp:
    """Anti-PT operation diag(1,-1,1) times conjugation; negates heff."""
    return SymmetryOp(unitary_part=np.diag([1.0, -1.0, 1.0]).astype(complex), conjugates=True)


def symmetry_transform(op: SymmetryOp, m: np.ndarray) -> np.ndarray:
    """Apply U M U^-1 with elementwise conjugation first when antiunitary."""
    m = np.asarray(m, dtype=complex)
    if op.conjugates:
        m = m.conj()
    u = op.unitary_part
    return u @ m @ u.conj().T


def build_heff(p: SystemParams) -> np.ndarray:
    """Effective non-Hermitian Hamiltonian on |0>,|1>,|2> (3x3)."""
    h = np.zeros((3, 3), dtype=complex)
    h[0, 1] = h[1, 0] = p.omega1 / SQRT2
    h[1, 2] = h[2, 1] = p.omega2 / SQRT2
    h[0, 0] = -p.delta0
    h[1, 1] = -p.delta1 - 1j * p.gamma1
    h[2, 2] = -1j * p.gamma2
    return h


def build_heff_aux(p: SystemParams, a: AuxParams) -> np.ndarray:
    """Effective Hamiltonian with the probe level, basis |0>,|1>,|2>,|a> (4x4)."""
    h = np.zeros((4, 4), dtype=complex)
    h[:3, :3] = build_heff(p)
    h[1, 3] = h[3, 1] = a.omega_a / 2.0
    h[3, 3] = -a.delta_a
    return h


def build_reduced_hamiltonian(p: SystemParams) -> np.ndarray:
    """Hermitian drive Hamiltonian on |0>..|3> (the shelf |3> is uncoupled)."""
    h = np.zeros((4, 4), dtype=complex)
    h[0, 1] = h[1, 0] = p.omega1 / SQRT2
    h[1, 2] = h[2, 1] = p.omega2 / SQRT2
    h[0, 0] = -p.delta0
    h[1, 1] = -p.delta1
    return h


def build_reduced_jumps(p: SystemParams) -> list[np.ndarray]:
    """The six jump operators on |0>..|3>, strength c_n = sqrt(2*gamma_n/3).

    Loss from |1> branches equally to |0>, |1>, |3>; loss from |2> to
    |0>, |2>, |3>.  Summing L^dag L gives diag(0, 2*gamma1, 2*gamma2, 0),
    consistent with build_heff via Heff = H - (i/2) sum L^dag L.
    """
    c1 = np.sqrt(2.0 * p.gamma1 / 3.0)
    c2 = np.sqrt(2.0 * p.gamma2 / 3.0)
    jumps = []
    for target, source, c in (
        (0, 1, c1), (1, 1, c1), (3, 1, c1),
        (0, 2, c2), (2, 2, c2), (3, 2, c2),
    ):
        L = np.zeros((4, 4), dtype=complex)
        L[target, source] = c
        jumps.append(L)
    return jumps


def build_full_model(fp: FullParams) -> tuple[np.ndarray, list[np.ndarray]]:
    """Six-level Hamiltonian and jumps, basis |0>,|1>,|2>,|3>,|e1>,|e2>.

    The fast levels decay at total rate big_gamma with equal branching:
    |e1> -> {|0>,|1>,|3>} and |e2> -> {|0>,|2>,|3>}, each channel at
    strength sqrt(big_gamma/3).
    """
    p = fp.base
    h = np.zeros((6, 6), dtype=complex)
    h[0, 1] = h[1, 0] = p.omega1 / SQRT2
    h[1, 2] = h[2, 1] = p.omega2 / SQRT2
    h[0, 0] = -p.delta0
    h[1, 1] = -p.delta1
    h[1, 4] = h[4, 1] = fp.j1
    h[2, 5] = h[5, 2] = fp.j2
    c = np.sqrt(fp.big_gamma / 3.0)
    jumps = []
    for target, source in ((0, 4), (1, 4), (3, 4), (0, 5), (2, 5), (3, 5)):
        L = np.zeros((6, 6), dtype=complex)
        L[target, source] = c
        jumps.append(L)
    return h, jumps


def closed_form_spectrum(
    omega: float, gamma: float
) -> tuple[complex, complex, complex, np.ndarray, np.ndarray, np.ndarray]:
    """Analytic spectrum of heff = omega*Sx + i*gamma*Sz (symmetric config).

    Returns (E_plus, E_minus, E_0, psi_plus, psi_minus, psi_0) with
    E_pm = +-sqrt(omega**2 - gamma**2) and E_0 = 0.  The eigenvectors
    are returned in a fixed gauge (not renormalized): psi_pm have unit
    norm only in the unbroken phase omega > gamma, and all three reduce
    to the coalesced state ep_state() at omega = gamma.

    The full Heff = heff - i*gamma*I spectrum is these values shifted
    by -i*gamma.
    """
    if omega == 0:
        raise ValueError("closed form requires a nonzero drive")
    s = np.sqrt(complex(omega**2 - gamma**2))
    e_plus = s
    e_minus = -s
    e_0 = 0.0 + 0.0j
    psi_plus = np.array(
        [-(gamma - 1j * s) / (2.0 * omega), 1j / SQRT2, (gamma + 1j * s) / (2.0 * omega)],
        dtype=complex,
    )
    psi_minus = np.array(
        [-(gamma + 1j * s) / (2.0 * omega), 1j / SQRT2, (gamma - 1j * s) / (2.0 * omega)],
        dtype=complex,
    )
    psi_0 = np.array([-omega / SQRT2, 1j * gamma, omega / SQRT2], dtype=complex)
    psi_0 = psi_0 / np.sqrt(omega**2 + gamma**2)
    return e_plus, e_minus, e_0, psi_plus, psi_minus, psi_0
