"""Eigenstate tomography through symmetry-constrained trial families.

The symmetries of the effective Hamiltonian restrict its eigenstates to
one-parameter families: rotations of the coalesced state around z (the
oscillating phase, omega > gamma), around x (the decaying phase,
omega < gamma), and the u_0 family containing the middle eigenstate.
Preparing ``(|u> + |3>)/sqrt(2)`` maps u onto the shelf-coherence column
rho_j3, whose normalized profile is stationary exactly when u is an
eigenstate.  Scanning the family angle and locating zeros of

    delta |rho_j3^n|^2 = |v_j(dt)|^2/|v(dt)|^2 - |v_j(0)|^2/|v(0)|^2

therefore finds the eigenstates without full state reconstruction.

Zeros are located by linear interpolation between samples of opposite
sign; a sample smaller than ``ZERO_ATOL`` in magnitude is accepted as a
zero on its own, which is what a tangent (double) zero at the
exceptional point produces.  Two exclusion rules remove the spurious
zeros the x family exhibits for negative angles: the positional rule
(drop the smallest and largest zero of that region) and a quantitative
eigen-residual threshold.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ep3ion import linalg
from ep3ion.model import SQRT2, SystemParams, build_heff, build_reduced_hamiltonian, build_reduced_jumps
from ep3ion.dynamics import propagate_lindblad, vectorize_lindblad
from ep3ion import readout

log = logging.getLogger(__name__)

#: Eigen-residual threshold: a zero whose state u has
#: ||(Heff - <u|Heff|u>) u|| above this fraction of ||Heff||_2 is spurious.
RESIDUAL_THRESHOLD = 0.1

#: |delta| at or below this counts as an on-grid (tangent) zero.
ZERO_ATOL = 1e-12

#: Default evolution time in units of 1/gamma.
GAMMA_DT_DEFAULT = 0.5

_KINDS = ("z", "x", "zero")


@dataclass(frozen=True)
class TrialFamily:
    """One member of a symmetry-constrained trial-state family."""

    kind: str
    angle: float

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown trial family {self.kind!r} (use z, x, or zero)")


@dataclass
class ZeroCrossing:
    """A located zero of the scan, with its bracketing samples.

    For an interpolated zero the samples have opposite signs and the
    angle lies strictly between them; for a tangent zero sitting on a
    grid sample (|value| <= ZERO_ATOL) both samples are the neighbors
    of that grid point and may share a sign.
    """

    angle: float
    left_sample: tuple[float, float]
    right_sample: tuple[float, float]
    excluded: bool = False
    reason: str = ""


@dataclass
class EigenstateSet:
    """Reconstructed eigenstates with their family angles.

    ``complete`` is False when some scan region produced no retained
    zeros; the corresponding state entries are None.
    """

    psi_plus: np.ndarray | None
    psi_minus: np.ndarray | None
    psi_zero: np.ndarray | None
    phi_plus: float | None
    phi_minus: float | None
    phi_zero: float | None
    kind: str
    complete: bool = field(default=True)


def trial_state(f: TrialFamily) -> np.ndarray:
    """Unit-norm trial state of the requested family and angle.

    The z and x families are rotations exp(i*phi*Sz), exp(i*phi*Sx) of
    the coalesced state; u_0 interpolates toward the middle eigenstate,
    reaching it at angle tan^-1(omega/gamma).
    """
    a = f.angle
    if f.kind == "z":
        return 0.5 * np.array([-np.exp(1j * a), 1j * SQRT2, np.exp(-1j * a)], dtype=complex)
    if f.kind == "x":
        return np.array(
            [-(1.0 + np.sin(a)) / 2.0, 1j * np.cos(a) / SQRT2, (1.0 - np.sin(a)) / 2.0],
            dtype=complex,
        )
    return np.array([-np.sin(a), 1j * SQRT2 * np.cos(a), np.sin(a)], dtype=complex) / SQRT2


def _normalized_profile(v: np.ndarray) -> np.ndarray:
    norm2 = float((v.conj() @ v).real)
    if norm2 < 1e-24:
        raise ValueError("state fully decayed; increase amplitude or reduce dt")
    return np.abs(v) ** 2 / norm2


def delta_rho_norm(f: TrialFamily, p: SystemParams, dt: float, j: int) -> float:
    """Normalized shelf-coherence drift of component j over time dt.

    Zero (to numerical accuracy) exactly when the trial state is an
    eigenvector of the effective Hamiltonian.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if j not in (0, 1, 2):
        raise ValueError("component index must be 0, 1, or 2")
    h = build_heff(p)
    v0 = trial_state(f) / 2.0
    vt = linalg.expm(-1j * h * dt) @ v0
    return float((_normalized_profile(vt) - _normalized_profile(v0))[j])


def delta_rho_norm_sampled(
    f: TrialFamily,
    p: SystemParams,
    dt: float,
    j: int,
    shots: int,
    rng: np.random.Generator | int | None = None,
    flip_prob: float = 0.0,
) -> float:
    """Shot-noise emulation of :func:`delta_rho_norm`.

    The prepared state (|u> + |3>)/sqrt(2) is propagated under the full
    4-level master equation (not just the coherence sector), and each
    |rho_k3| at t = 0 and t = dt is estimated through the phase-scan
    readout.
    """
    gen = np.random.default_rng(rng)
    u = trial_state(f)
    w = np.zeros(4, dtype=complex)
    w[:3] = u / SQRT2
    w[3] = 1.0 / SQRT2
    rho0 = np.outer(w, w.conj())
    s = vectorize_lindblad(build_reduced_hamiltonian(p), build_reduced_jumps(p))
    rho_t = propagate_lindblad(s, rho0, dt)

    def profile(rho: np.ndarray) -> np.ndarray:
        mags = np.array([
            readout.phase_scan_readout(
                rho, (k, 3), shots=shots, rng=gen, flip_prob=flip_prob
            )[0]
            for k in range(3)
        ])
        total = float(mags @ mags)
        if total < 1e-24:
            raise ValueError("state fully decayed; increase amplitude or reduce dt")
        return mags**2 / total

    return float((profile(rho_t) - profile(rho0))[j])


def default_grid(kind: str, points: int = 61) -> np.ndarray:
    """Scan grid: [-pi, pi] for the z/x families, [0, pi/2] for u_0."""
    if kind == "zero":
        return np.linspace(0.0, np.pi / 2.0, points)
    if kind in ("z", "x"):
        return np.linspace(-np.pi, np.pi, points)
    raise ValueError(f"unknown trial family {kind!r}")


def _eigen_residual(u: np.ndarray, h: np.ndarray, hnorm: float) -> float:
    lam = (u.conj() @ h @ u) / (u.conj() @ u)
    return float(np.linalg.norm((h - lam * np.eye(3)) @ u) / (hnorm * np.linalg.norm(u)))


def scan_profile(
    kind: str,
    p: SystemParams,
    dt: float,
    j: int,
    grid: np.ndarray,
    shots: int | None = None,
    rng: np.random.Generator | int | None = None,
    flip_prob: float = 0.0,
) -> np.ndarray:
    """Sample delta_rho_norm over a grid (shot-noise emulated when shots set)."""
    grid = np.asarray(grid, dtype=float)
    gen = np.random.default_rng(rng) if shots is not None else None
    values = np.empty(len(grid))
    for k, a in enumerate(grid):
        f = TrialFamily(kind=kind, angle=a)
        if shots is None:
            values[k] = delta_rho_norm(f, p, dt, j)
        else:
            values[k] = delta_rho_norm_sampled(f, p, dt, j, shots, gen, flip_prob)
    return values


def scan_zeros(
    kind: str,
    p: SystemParams,
    dt: float,
    j: int,
    grid: np.ndarray,
    shots: int | None = None,
    rng: np.random.Generator | int | None = None,
    flip_prob: float = 0.0,
    values: np.ndarray | None = None,
) -> list[ZeroCrossing]:
    """Scan delta_rho_norm over a grid and locate its zeros.

    With ``shots`` set, every sample goes through the shot-noise
    emulator; precomputed ``values`` (from :func:`scan_profile`) skip
    the sampling.  Exclusion marks (never removals) are applied
    afterward: the positional rule for the x family on negative angles
    needs at least three zeros there, and the residual rule applies
    everywhere.
    """
    grid = np.asarray(grid, dtype=float)
    if len(grid) < 9:
        raise ValueError("need at least 9 grid points to scan for zeros")
    if not (np.diff(grid) > 0).all():
        raise ValueError("grid must be strictly increasing")
    if values is None:
        values = scan_profile(kind, p, dt, j, grid, shots=shots, rng=rng, flip_prob=flip_prob)
    else:
        values = np.asarray(values, dtype=float)
        if values.shape != grid.shape:
            raise ValueError("values must match the grid point for point")

    zeros: list[ZeroCrossing] = []
    on_grid = np.abs(values) <= ZERO_ATOL
    for k in range(len(grid)):
        if on_grid[k]:
            left = (grid[k - 1], values[k - 1]) if k > 0 else (grid[k], values[k])
            right = (grid[k + 1], values[k + 1]) if k + 1 < len(grid) else (grid[k], values[k])
            zeros.append(ZeroCrossing(angle=float(grid[k]), left_sample=left, right_sample=right))
    for k in range(len(grid) - 1):
        if on_grid[k] or on_grid[k + 1]:
            continue
        if values[k] * values[k + 1] < 0.0:
            a, b = grid[k], grid[k + 1]
            fa, fb = values[k], values[k + 1]
            angle = a - fa * (b - a) / (fb - fa)
            zeros.append(ZeroCrossing(
                angle=float(angle), left_sample=(float(a), float(fa)),
                right_sample=(float(b), float(fb)),
            ))
    zeros.sort(key=lambda z: z.angle)
    if not zeros:
        log.info("no sign change of delta_rho_norm over the %s grid", kind)
        return zeros

    if kind == "x":
        negative = [z for z in zeros if z.angle < 0.0]
        if len(negative) >= 3:
            negative[0].excluded = True
            negative[0].reason = "positional: smallest zero of the negative-angle region"
            negative[-1].excluded = True
            negative[-1].reason = "positional: largest zero of the negative-angle region"

    h = build_heff(p)
    hnorm = float(np.linalg.norm(h, 2))
    for z in zeros:
        resid = _eigen_residual(trial_state(TrialFamily(kind=kind, angle=z.angle)), h, hnorm)
        if resid > RESIDUAL_THRESHOLD:
            z.excluded = True
            sep = "; " if z.reason else ""
            z.reason += f"{sep}eigen-residual {resid:.3f} above {RESIDUAL_THRESHOLD}"
    return zeros


def extract_eigenstates(
    p: SystemParams,
    dt: float | None = None,
    grids: dict[str, np.ndarray] | None = None,
    shots: int | None = None,
    rng: np.random.Generator | int | None = None,
    flip_prob: float = 0.0,
    record: dict | None = None,
) -> EigenstateSet:
    """Run the scans and reconstruct the three eigenstates.

    The paired states come from the z family for omega >= gamma and
    from the x family below, with the retained zeros averaged per sign
    region (a tangent zero at angle 0 feeds both regions).  Component
    indices follow the scans these families resolve best: j=2 for z,
    j=1 for x, j=2 for the u_0 family.  Pass a dict as ``record`` to
    capture the raw scans: it is filled with kind -> (grid, values,
    zeros).
    """
    if not p.is_symmetric:
        raise ValueError("eigenstate tomography assumes the symmetric configuration")
    if dt is None:
        dt = GAMMA_DT_DEFAULT / p.gamma1
    kind = "z" if p.omega1 >= p.gamma1 else "x"
    j_pair = 2 if kind == "z" else 1
    grids = grids or {}
    pair_grid = grids.get(kind, default_grid(kind))
    zero_grid = grids.get("zero", default_grid("zero"))

    gen = np.random.default_rng(rng) if shots is not None else None
    pair_values = scan_profile(kind, p, dt, j_pair, pair_grid, shots=shots, rng=gen, flip_prob=flip_prob)
    pair_zeros = scan_zeros(kind, p, dt, j_pair, pair_grid, values=pair_values)
    mid_values = scan_profile("zero", p, dt, 2, zero_grid, shots=shots, rng=gen, flip_prob=flip_prob)
    mid_zeros = scan_zeros("zero", p, dt, 2, zero_grid, values=mid_values)
    if record is not None:
        record[kind] = (pair_grid, pair_values, pair_zeros)
        record["zero"] = (zero_grid, mid_values, mid_zeros)

    plus = [z.angle for z in pair_zeros if not z.excluded and z.angle >= 0.0]
    minus = [z.angle for z in pair_zeros if not z.excluded and z.angle <= 0.0]
    mid = [z.angle for z in mid_zeros if not z.excluded]

    phi_plus = float(np.mean(plus)) if plus else None
    phi_minus = float(np.mean(minus)) if minus else None
    phi_zero = float(np.mean(mid)) if mid else None

    def state(phi: float | None, k: str) -> np.ndarray | None:
        return trial_state(TrialFamily(kind=k, angle=phi)) if phi is not None else None

    complete = None not in (phi_plus, phi_minus, phi_zero)
    if not complete:
        log.warning(
            "partial eigenstate extraction: regions without retained zeros "
            "(phi_plus=%s, phi_minus=%s, phi_zero=%s)", phi_plus, phi_minus, phi_zero,
        )
    return EigenstateSet(
        psi_plus=state(phi_plus, kind), psi_minus=state(phi_minus, kind),
        psi_zero=state(phi_zero, "zero"), phi_plus=phi_plus, phi_minus=phi_minus,
        phi_zero=phi_zero, kind=kind, complete=complete,
    )


def inner_products(states: EigenstateSet | tuple[np.ndarray, np.ndarray, np.ndarray]) -> tuple[float, float, float]:
    """Pairwise eigenstate overlaps (|<psi-|psi+>|, |<psi+|psi0>|, |<psi-|psi0>|)."""
    if isinstance(states, EigenstateSet):
        trio = (states.psi_plus, states.psi_minus, states.psi_zero)
        if any(s is None for s in trio):
            raise ValueError("incomplete eigenstate set has no defined overlaps")
    else:
        trio = states
    plus, minus, zero = (np.asarray(s, dtype=complex) for s in trio)
    for s in (plus, minus, zero):
        if abs(np.linalg.norm(s) - 1.0) > 1e-9:
            raise ValueError("inner_products expects unit-norm states")
    return (
        float(np.abs(minus.conj() @ plus)),
        float(np.abs(plus.conj() @ zero)),
        float(np.abs(minus.conj() @ zero)),
    )
