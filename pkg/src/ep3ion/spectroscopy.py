"""Absorption spectroscopy on the probe level and spectral topology.

A weakly coupled probe level |a> is prepared, evolved for a fixed time,
and its surviving population read out as a function of the probe
detuning delta_a.  Dips of the resulting line sit at the real parts of
the complex eigenenergies and their widths encode the imaginary parts,
so fitting lines against the model recovers the full non-Hermitian
spectrum.  Tracking fitted eigenvalue triplets along a closed detuning
loop and accumulating the phase of E_n(theta) - E_B yields the
fractional spectral winding that certifies a third-order exceptional
point.

The measured population differs from the bare survival probability
|<a|exp(-i Heff t)|a>|**2 because |a> itself decays during the evolution
and most of that decay shelves into a dark manifold counted together
with |a>.  With kappa = -ln(N_nh)/t the corrected line is

    N_tgt = n0 exp(-gamma_a t) N_nh
          + branch_f * gamma_a/(gamma_a + kappa) * n0 (1 - exp(-gamma_a t) N_nh).

Fitting uses a derivative-free simplex with hard constraint projection:
the two decay rates are clamped to within 5% of their across-line means
with the means locked to gamma2_bar = 2*gamma1_bar, both drive Rabi
rates share one parameter per line, and the line scale n0 is profiled
out exactly.  Multi-start jitter makes the search robust to the noise
floor of shot-sampled lines.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ep3ion import linalg
from ep3ion.model import AuxParams, SQRT2, SystemParams
from ep3ion.model import build_heff, build_reduced_hamiltonian, build_reduced_jumps

_GAMMA_BAND = 0.05  # per-line decay rates stay within 5% of the shared mean
_TIE_TOL = 1e-9


@dataclass(frozen=True)
class SpectralLine:
    """One measured (or synthesized) absorption line.

    detunings are strictly increasing, rad/us.  populations is the mean
    surviving-population estimate per grid point and errbars its spread
    over repeated rounds (zeros for exact lines).  shots == 0 marks the
    infinite-statistics limit.
    """

    detunings: np.ndarray
    populations: np.ndarray
    errbars: np.ndarray
    t_evolve: float
    shots: int
    rounds: int

    def __post_init__(self) -> None:
        d = np.asarray(self.detunings, dtype=float)
        p = np.asarray(self.populations, dtype=float)
        e = np.asarray(self.errbars, dtype=float)
        if not (len(d) == len(p) == len(e)):
            raise ValueError("detunings, populations, errbars must have equal length")
        if len(d) > 1 and not (np.diff(d) > 0).all():
            raise ValueError("detunings must be strictly increasing")
        if (p < 0).any() or (p > 1).any():
            raise ValueError("populations must lie in [0, 1]")
        if self.t_evolve <= 0:
            raise ValueError("t_evolve must be positive")
        object.__setattr__(self, "detunings", d)
        object.__setattr__(self, "populations", p)
        object.__setattr__(self, "errbars", e)


@dataclass
class LineParams:
    """Per-line model parameters (rad/us; n0 dimensionless)."""

    omega: float
    gamma1: float
    gamma2: float
    n0: float = 1.0
    delta0: float = 0.0
    delta1: float = 0.0

    def to_system(self) -> SystemParams:
        return SystemParams(
            omega1=self.omega, omega2=self.omega,
            gamma1=self.gamma1, gamma2=self.gamma2,
            delta0=self.delta0, delta1=self.delta1,
        )


@dataclass
class FitResult:
    """Outcome of a constrained multi-line fit."""

    lines: list[LineParams]
    loss: float
    restarts: int
    converged: bool
    gamma_clamped: list[bool]
    gbar1: float


@dataclass
class BandSet:
    """Eigenvalue bands tracked along a closed parameter loop.

    bands has shape (K, 3): row k holds the three band values at
    thetas[k], permutation-matched for continuity.  seam[n] is the band
    index that band n continues into after one full loop, and m is the
    order of that permutation (the number of loop traversals needed to
    close every band).
    """

    thetas: np.ndarray
    bands: np.ndarray
    m: int
    seam: tuple[int, ...]
    ambiguous: bool = field(default=False)


# ---------------------------------------------------------------------------
# line shapes


def _aux_ham_stack(
    omega: np.ndarray,
    gamma1: np.ndarray,
    gamma2: np.ndarray,
    delta0: np.ndarray,
    delta1: np.ndarray,
    omega_a: float,
    detunings: np.ndarray,
) -> np.ndarray:
    """Stack of 4x4 probe Hamiltonians over (line, detuning)."""
    m = len(omega)
    n = len(detunings)
    h = np.zeros((m, n, 4, 4), dtype=complex)
    h[..., 0, 1] = h[..., 1, 0] = (omega / SQRT2)[:, None]
    h[..., 1, 2] = h[..., 2, 1] = (omega / SQRT2)[:, None]
    h[..., 0, 0] = (-delta0)[:, None]
    h[..., 1, 1] = (-delta1 - 1j * gamma1)[:, None]
    h[..., 2, 2] = (-1j * gamma2)[:, None]
    h[..., 1, 3] = h[..., 3, 1] = omega_a / 2.0
    h[..., 3, 3] = -detunings[None, :]
    return h


def _nh_curves(params: np.ndarray, omega_a: float, t: float, detunings: np.ndarray) -> np.ndarray:
    """Survival probability curves for rows (omega, gamma1, gamma2, delta0, delta1)."""
    h = _aux_ham_stack(
        params[:, 0], params[:, 1], params[:, 2], params[:, 3], params[:, 4],
        omega_a, detunings,
    )
    u = linalg.expm_batch(-1j * t * h)
    nh = np.abs(u[..., 3, 3]) ** 2
    return np.minimum(nh, 1.0)


def _lifetime_correction(nh: np.ndarray, t: float, gamma_a: float, branch_f: float) -> np.ndarray:
    """Map bare survival to the measured line at unit n0."""
    if gamma_a == 0.0:
        return nh
    nh = np.maximum(nh, 1e-300)
    kappa = -np.log(nh) / t
    surviving = np.exp(-gamma_a * t) * nh
    shelved = branch_f * gamma_a / (gamma_a + kappa) * (1.0 - surviving)
    return surviving + shelved


def na_nh(p: SystemParams, a: AuxParams, t: float) -> float:
    """Bare probe survival |<a|exp(-i Heff t)|a>|^2 (jump terms dropped)."""
    if t < 0:
        raise ValueError("t must be non-negative")
    row = np.array([[p.omega1, p.gamma1, p.gamma2, p.delta0, p.delta1]])
    if p.omega1 != p.omega2:
        raise ValueError("na_nh assumes a shared Rabi rate omega1 == omega2")
    return float(_nh_curves(row, a.omega_a, t, np.array([a.delta_a]))[0, 0])


def na_tgt(p: SystemParams, a: AuxParams, t: float) -> float:
    """Measured probe population including its own finite lifetime.

    At t = 0 the defined limit n0 is returned.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0.0:
        return a.n0
    nh = na_nh(p, a, t)
    return float(a.n0 * _lifetime_correction(np.array([nh]), t, a.gamma_a, a.branch_f)[0])


def na_nh_curve(p: SystemParams, a: AuxParams, t: float, detunings: np.ndarray) -> np.ndarray:
    """Vectorized :func:`na_nh` over a detuning grid."""
    detunings = np.asarray(detunings, dtype=float)
    row = np.array([[p.omega1, p.gamma1, p.gamma2, p.delta0, p.delta1]])
    return _nh_curves(row, a.omega_a, t, detunings)[0]


def na_tgt_curve(p: SystemParams, a: AuxParams, t: float, detunings: np.ndarray) -> np.ndarray:
    """Vectorized :func:`na_tgt` over a detuning grid."""
    nh = na_nh_curve(p, a, t, detunings)
    return a.n0 * _lifetime_correction(nh, t, a.gamma_a, a.branch_f)


def default_detuning_grid(points: int = 41, span: float = 2.0 * np.pi * 0.1) -> np.ndarray:
    """Symmetric probe-detuning grid (rad/us), default +-2*pi*0.1 MHz."""
    if points < 2:
        raise ValueError("need at least two grid points")
    return np.linspace(-span, span, points)


def build_probe_model(p: SystemParams, a: AuxParams) -> tuple[np.ndarray, list[np.ndarray]]:
    """Five-level master-equation model including the probe level.

    Basis |0>,|1>,|2>,|3>,|a>: the dynamics manifold with its six jump
    operators, plus the coherent probe drive omega_a/2 on 1-a at
    detuning delta_a.  Probe-level decay is deliberately absent (the
    lifetime correction handles it analytically), so propagating
    |a><a| under this model isolates the quantum-jump contribution
    ignored by na_nh.
    """
    h = np.zeros((5, 5), dtype=complex)
    h[:4, :4] = build_reduced_hamiltonian(p)
    h[1, 4] = h[4, 1] = a.omega_a / 2.0
    h[4, 4] = -a.delta_a
    jumps = []
    for jump in build_reduced_jumps(p):
        l5 = np.zeros((5, 5), dtype=complex)
        l5[:4, :4] = jump
        jumps.append(l5)
    return h, jumps


def synth_line(
    p: SystemParams,
    a: AuxParams,
    t: float,
    detunings: np.ndarray,
    shots: int = 200,
    rounds: int = 5,
    rng: np.random.Generator | int | None = None,
    exact: bool = False,
) -> SpectralLine:
    """Synthesize one absorption line with binomial shot statistics.

    Each grid point is sampled as ``rounds`` independent
    Binomial(shots, N_tgt)/shots draws; the line records their mean and
    sample spread.  ``exact=True`` returns the shots -> infinity limit
    (shots recorded as 0).
    """
    detunings = np.asarray(detunings, dtype=float)
    curve = na_tgt_curve(p, a, t, detunings)
    curve = np.clip(curve, 0.0, 1.0)
    if exact:
        return SpectralLine(
            detunings=detunings, populations=curve,
            errbars=np.zeros_like(curve), t_evolve=t, shots=0, rounds=0,
        )
    if shots <= 0 or rounds <= 0:
        raise ValueError("shots and rounds must be positive unless exact=True")
    gen = np.random.default_rng(rng)
    draws = gen.binomial(shots, np.tile(curve, (rounds, 1))) / shots
    pops = draws.mean(axis=0)
    errs = draws.std(axis=0, ddof=1) if rounds > 1 else np.zeros_like(pops)
    return SpectralLine(
        detunings=detunings, populations=pops, errbars=errs,
        t_evolve=t, shots=shots, rounds=rounds,
    )


# ---------------------------------------------------------------------------
# constrained fitting


def project_rates(gammas: np.ndarray, max_iter: int = 120) -> tuple[np.ndarray, float, np.ndarray]:
    """Project per-line (gamma1, gamma2) rows onto the constraint set.

    The feasible set ties the across-line means to gamma2_bar =
    2*gamma1_bar and keeps each rate within 5% of its mean.  Projection
    alternates mean reconciliation with clamping until stationary.
    Returns (projected rows, gamma1_bar, clamped-row mask).
    """
    g = np.array(gammas, dtype=float)
    g = np.maximum(g, 1e-12)
    for _ in range(max_iter):
        gbar1 = 0.5 * (g[:, 0].mean() + g[:, 1].mean() / 2.0)
        lo1, hi1 = (1.0 - _GAMMA_BAND) * gbar1, (1.0 + _GAMMA_BAND) * gbar1
        lo2, hi2 = 2.0 * lo1, 2.0 * hi1
        new = np.column_stack([np.clip(g[:, 0], lo1, hi1), np.clip(g[:, 1], lo2, hi2)])
        if np.abs(new - g).max() <= 1e-16 * max(gbar1, 1e-300):
            g = new
            break
        g = new
    gbar1 = 0.5 * (g[:, 0].mean() + g[:, 1].mean() / 2.0)
    clamped = (
        (np.abs(g[:, 0] - np.asarray(gammas, dtype=float)[:, 0]) > 1e-12 * gbar1)
        | (np.abs(g[:, 1] - np.asarray(gammas, dtype=float)[:, 1]) > 1e-12 * gbar1)
    )
    return g, float(gbar1), clamped


def _pack(rows: np.ndarray, fit_detunings: bool) -> np.ndarray:
    x = np.concatenate([np.log(rows[:, :3]), rows[:, 3:5]], axis=1) if fit_detunings \
        else np.log(rows[:, :3])
    return x.reshape(-1)


def _unpack(x: np.ndarray, nlines: int, fit_detunings: bool, fixed_deltas: np.ndarray) -> np.ndarray:
    width = 5 if fit_detunings else 3
    x = x.reshape(nlines, width)
    rows = np.zeros((nlines, 5))
    rows[:, :3] = np.exp(np.clip(x[:, :3], -60.0, 60.0))
    rows[:, 3:5] = x[:, 3:5] if fit_detunings else fixed_deltas
    return rows


def _project_rows(rows: np.ndarray) -> tuple[np.ndarray, float, np.ndarray]:
    out = rows.copy()
    g, gbar1, clamped = project_rates(rows[:, 1:3])
    out[:, 1:3] = g
    return out, gbar1, clamped


def _profiled_loss(
    rows: np.ndarray,
    lines: list[SpectralLine],
    aux: AuxParams,
) -> tuple[float, np.ndarray]:
    """Sum of squares with the per-line scale n0 profiled out exactly."""
    total = 0.0
    n0s = np.empty(len(lines))
    for i, line in enumerate(lines):
        nh = _nh_curves(rows[i : i + 1], aux.omega_a, line.t_evolve, line.detunings)[0]
        curve = _lifetime_correction(nh, line.t_evolve, aux.gamma_a, aux.branch_f)
        denom = float(curve @ curve)
        n0 = float(curve @ line.populations) / denom if denom > 0 else 1.0
        n0 = float(np.clip(n0, 1e-6, 1.0))
        resid = line.populations - n0 * curve
        total += float(resid @ resid)
        n0s[i] = n0
    return total, n0s


def fit_spectra(
    lines: list[SpectralLine],
    aux: AuxParams,
    init: list[LineParams],
    fit_detunings: bool = False,
    restarts: int = 8,
    rng: np.random.Generator | int | None = None,
    line_maxfev: int = 300,
    joint_maxfev: int = 3500,
    joint_rounds: int = 2,
) -> FitResult:
    """Fit one or more lines with the shared-rate constraints.

    Stage one fits every line independently with ``restarts`` simplex
    starts (the first from ``init``, the rest jittered by +-20%); stage
    two polishes all lines jointly under the constraint projection.
    Rabi rates are shared between the two drives by construction and
    n0 is profiled, so each line contributes three free shape
    parameters (five with ``fit_detunings``).
    """
    if len(lines) != len(init):
        raise ValueError("need one init per line")
    if not lines:
        raise ValueError("no lines to fit")
    gen = np.random.default_rng(rng)
    nl = len(lines)

    init_rows = np.array(
        [[q.omega, q.gamma1, q.gamma2, q.delta0, q.delta1] for q in init], dtype=float
    )
    if (init_rows[:, :3] <= 0).any():
        raise ValueError("init rates must be positive")
    fixed_deltas = init_rows[:, 3:5].copy()

    def _jitter(x0: np.ndarray, nrows: int) -> np.ndarray:
        width = 5 if fit_detunings else 3
        x = x0.reshape(nrows, width).copy()
        x[:, :3] += np.log(1.0 + gen.uniform(-0.2, 0.2, size=(nrows, 3)))
        if fit_detunings:
            scale = np.maximum(np.abs(x[:, 3:5]), 0.2 * np.exp(x[:, 1:2]))
            x[:, 3:5] += gen.uniform(-0.2, 0.2, size=(nrows, 2)) * scale
        return x.reshape(-1)

    def line_objective(x: np.ndarray, i: int) -> float:
        rows = _unpack(x, 1, fit_detunings, fixed_deltas[i : i + 1])
        rows, _, _ = _project_rows(rows)
        loss, _ = _profiled_loss(rows, [lines[i]], aux)
        return loss

    stage_one = np.zeros_like(init_rows)
    for i in range(nl):
        best_x, best_f = None, np.inf
        x0 = _pack(init_rows[i : i + 1], fit_detunings)
        for k in range(max(restarts, 1)):
            start = x0.copy() if k == 0 else _jitter(x0, 1)
            res = minimize(
                line_objective, start, args=(i,), method="Nelder-Mead",
                options=dict(maxfev=line_maxfev, xatol=1e-7, fatol=1e-14),
            )
            if res.fun < best_f:
                best_x, best_f = res.x, res.fun
        stage_one[i] = _unpack(best_x, 1, fit_detunings, fixed_deltas[i : i + 1])[0]

    def joint_objective(x: np.ndarray) -> float:
        rows = _unpack(x, nl, fit_detunings, fixed_deltas)
        rows, _, _ = _project_rows(rows)
        loss, _ = _profiled_loss(rows, lines, aux)
        return loss

    x = _pack(stage_one, fit_detunings)
    converged = True
    for _ in range(max(joint_rounds, 1)):
        res = minimize(
            joint_objective, x, method="Nelder-Mead",
            options=dict(maxfev=joint_maxfev, xatol=1e-8, fatol=1e-15, adaptive=True),
        )
        x = res.x
        converged = bool(res.success)

    rows = _unpack(x, nl, fit_detunings, fixed_deltas)
    rows, gbar1, clamped = _project_rows(rows)
    loss, n0s = _profiled_loss(rows, lines, aux)
    fitted = [
        LineParams(
            omega=float(r[0]), gamma1=float(r[1]), gamma2=float(r[2]),
            n0=float(n0s[i]), delta0=float(r[3]), delta1=float(r[4]),
        )
        for i, r in enumerate(rows)
    ]
    return FitResult(
        lines=fitted, loss=float(loss), restarts=restarts,
        converged=converged, gamma_clamped=list(map(bool, clamped)), gbar1=gbar1,
    )


def eigenenergies_from_fit(result: FitResult, index: int) -> linalg.EigenSystem:
    """Complex eigenenergies of the effective Hamiltonian at fitted parameters."""
    return linalg.eig(build_heff(result.lines[index].to_system()))


def pooled_loop_triplets(fitted: list[LineParams]) -> np.ndarray:
    """Eigenvalue triplets rebuilt from loop-pooled shared rates.

    Every line of a detuning loop shares one physical (omega, gamma)
    pair; only the detunings differ.  Single-line estimates near the
    triple degeneracy scatter by more than the loop's closest approach
    to typical base energies, which breaks band stitching, so the
    shared rates are pooled by median, the symmetric structure
    gamma2 = 2*gamma1 is restored exactly (gamma1 is the
    well-identified rate), and the triplets are recomputed at each
    line's own detunings.  The residual pooled-rate error is then a
    smooth loop-wide distortion that permutation matching tolerates.
    """
    if not fitted:
        raise ValueError("need at least one fitted line")
    omega = float(np.median([lp.omega for lp in fitted]))
    gamma1 = float(np.median([lp.gamma1 for lp in fitted]))
    out = np.empty((len(fitted), 3), dtype=complex)
    for k, lp in enumerate(fitted):
        p = SystemParams(
            omega1=omega, omega2=omega, gamma1=gamma1, gamma2=2.0 * gamma1,
            delta0=lp.delta0, delta1=lp.delta1,
        )
        out[k] = linalg.eig(build_heff(p)).values
    return out


# ---------------------------------------------------------------------------
# band tracking and spectral winding


def _best_two_costs(prev: np.ndarray, next_: np.ndarray) -> tuple[tuple[int, ...], float, float]:
    costs = []
    for perm in itertools.permutations(range(len(prev))):
        costs.append((float(np.abs(prev - next_[list(perm)]).sum()), perm))
    costs.sort(key=lambda c: (c[0], c[1]))
    best = costs[0]
    second = costs[1][0] if len(costs) > 1 else np.inf
    return best[1], best[0], second


def track_bands(thetas: np.ndarray, triplets: np.ndarray) -> BandSet:
    """Permutation-match eigenvalue triplets along a closed loop.

    thetas must cover [0, 2*pi) uniformly with the endpoint excluded.
    The seam permutation compares the last matched triplet against the
    first (theta = 2*pi is the same operator as theta = 0); its order is
    the number m of loop traversals after which every band closes.
    """
    thetas = np.asarray(thetas, dtype=float)
    triplets = np.asarray(triplets, dtype=complex)
    k_pts = len(thetas)
    if triplets.shape != (k_pts, 3):
        raise ValueError("triplets must have shape (len(thetas), 3)")
    if k_pts < 8:
        raise ValueError("loop grid too coarse to track bands")
    step = 2.0 * np.pi / k_pts
    if not np.allclose(np.diff(thetas), step, rtol=0, atol=1e-9) or abs(thetas[0]) > 1e-12:
        raise ValueError("thetas must uniformly cover [0, 2*pi) starting at 0")

    bands = np.empty_like(triplets)
    bands[0] = triplets[0]
    ambiguous = False
    for k in range(1, k_pts):
        perm, best, second = _best_two_costs(bands[k - 1], triplets[k])
        ambiguous = ambiguous or (second - best) <= _TIE_TOL
        bands[k] = triplets[k][list(perm)]

    seam, best, second = _best_two_costs(bands[-1], bands[0])
    ambiguous = ambiguous or (second - best) <= _TIE_TOL

    m = 1
    perm = seam
    identity = tuple(range(3))
    while perm != identity:
        perm = tuple(seam[p] for p in perm)
        m += 1
        if m > 3:
            raise RuntimeError("seam permutation of three bands has order > 3")
    return BandSet(thetas=thetas, bands=bands, m=m, seam=seam, ambiguous=ambiguous)


def winding_number(bs: BandSet, e_b: complex, band: int) -> float:
    """Fractional winding of one stitched band around the base energy e_b.

    The band is continued through its seam permutation for m loop
    copies, closing exactly, and the wrapped phase increments of
    E(theta) - e_b are accumulated.  Steps of |increment| >= pi/2 mean
    the theta grid undersamples the motion; that is refused rather than
    silently unwrapped.
    """
    if band not in (0, 1, 2):
        raise ValueError("band index must be 0, 1, or 2")
    values = []
    idx = band
    for _ in range(bs.m):
        values.append(bs.bands[:, idx])
        idx = bs.seam[idx]
    path = np.concatenate(values + [bs.bands[:1, band]]) - e_b
    if np.abs(path).min() < 1e-12:
        raise ValueError("base energy lies on a band")
    steps = np.angle(path[1:] / path[:-1])
    if np.abs(steps).max() >= np.pi / 2.0:
        raise ValueError("refine grid: phase step >= pi/2 along the loop")
    return float(steps.sum() / (2.0 * np.pi * bs.m))
