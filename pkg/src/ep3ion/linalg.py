"""Dense complex linear algebra with deterministic ordering.

Spectra of small non-normal matrices are the workhorse of this package,
and two numerical facts shape the interface:

* Near an exceptional point the eigenvector matrix becomes singular, so
  every spectrum carries a ``condition_flag`` warning that eigenvector
  (and individual eigenvalue) accuracy is degraded there.
* A defective eigenvalue computed by QR iteration scatters into a
  cluster of radius ~eps**(1/3).  The first-order scatter cancels in the
  cluster mean, so when a matrix is flagged ill-conditioned, tight
  eigenvalue clusters are refined to their centroid.  This restores
  machine-precision eigenvalues exactly at an exceptional point while
  leaving well-separated spectra untouched.

Eigenvalues are always sorted ascending by real part, ties broken by
imaginary part, so repeated calls are reproducible and band bookkeeping
can rely on the order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

_EPS = np.finfo(float).eps

# Pade-13 numerator coefficients and the Higham order-13 scaling threshold.
_PADE13 = np.array([
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
])
_THETA13 = 5.371920351148152

#: Eigenvector-matrix singular value ratio below which a spectrum is
#: flagged ill-conditioned (numerically defective).
CONDITION_RATIO = 1e-6

#: Cluster radius for centroid refinement, in units of eps**(1/3) times
#: the Frobenius norm of the input.
_CLUSTER_FACTOR = 10.0


@dataclass
class EigenSystem:
    """Sorted spectrum of a square complex matrix.

    ``vectors[:, k]`` is the unit-norm right eigenvector paired with
    ``values[k]``.  ``condition_flag`` is True when the eigenvector
    matrix is numerically singular; in that case eigenvectors span the
    coalescing subspace but are not individually trustworthy, and the
    per-pair residual contract is waived.
    """

    values: np.ndarray
    vectors: np.ndarray
    condition_flag: bool


def _as_square(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix contains non-finite entries")
    return m


def _refine_clusters(values: np.ndarray, scale: float) -> np.ndarray:
    """Replace tight eigenvalue clusters by their centroid.

    Only called for flagged (numerically defective) spectra.  The
    cluster radius is far below any physical splitting resolved by this
    package, so genuine near-degeneracies are not merged.
    """
    n = len(values)
    tol = _CLUSTER_FACTOR * _EPS ** (1.0 / 3.0) * max(scale, _EPS)
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= tol:
                parent[find(i)] = find(j)

    out = values.copy()
    for root in set(find(i) for i in range(n)):
        members = [i for i in range(n) if find(i) == root]
        if len(members) > 1:
            out[members] = values[members].mean()
    return out


def eig(m: np.ndarray) -> EigenSystem:
    """Eigendecomposition with deterministic sort and conditioning flag.

    Values are sorted ascending by (real, imag).  ``condition_flag`` is
    set when the smallest singular value of the eigenvector matrix is
    below ``CONDITION_RATIO`` times the largest; flagged spectra get the
    centroid refinement described in the module docstring.
    """
    m = _as_square(m)
    values, vectors = np.linalg.eig(m)

    sv = np.linalg.svd(vectors, compute_uv=False)
    flagged = bool(sv[-1] < CONDITION_RATIO * sv[0])
    if flagged:
        values = _refine_clusters(values, float(np.linalg.norm(m)))

    order = np.lexsort((values.imag, values.real))
    return EigenSystem(values=values[order], vectors=vectors[:, order], condition_flag=flagged)


def expm_batch(m: np.ndarray) -> np.ndarray:
    """Matrix exponential of a stack of square matrices.

    Scaling-and-squaring with a single order-13 Pade approximant, applied
    uniformly across the stack (each matrix gets its own scaling power).
    Accepts shape (..., n, n) and returns the same shape.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValueError(f"expected stacked square matrices, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix contains non-finite entries")
    single = m.ndim == 2
    if single:
        m = m[None]
    lead = m.shape[:-2]
    n = m.shape[-1]
    a = m.reshape(-1, n, n)

    norm1 = np.abs(a).sum(axis=-2).max(axis=-1)
    s = np.ceil(np.log2(np.maximum(norm1, _EPS) / _THETA13))
    s = np.maximum(s, 0.0).astype(int)
    a = a / (2.0 ** s)[:, None, None]

    ident = np.broadcast_to(np.eye(n, dtype=complex), a.shape)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    b = _PADE13
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
             + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
         + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
    r = np.linalg.solve(v - u, v + u)

    for k in range(int(s.max()) if s.size else 0):
        todo = s > k
        if todo.any():
            r[todo] = r[todo] @ r[todo]

    r = r.reshape(*lead, n, n)
    return r[0] if single else r


def expm(m: np.ndarray) -> np.ndarray:
    """Matrix exponential of a single square matrix."""
    return expm_batch(_as_square(m))


def match_permutation(prev: np.ndarray, next_: np.ndarray) -> tuple[int, ...]:
    """Assignment of ``next_`` slots continuing the values in ``prev``.

    Returns the permutation ``pi`` minimizing ``sum_k |prev[k] - next_[pi[k]]|``
    over all permutations, searched exhaustively (the use case is three
    bands).  Cost ties within 1e-12 resolve to the lexicographically
    smallest permutation; ``pi`` is deterministic for identical inputs.
    """
    prev = np.asarray(prev, dtype=complex)
    next_ = np.asarray(next_, dtype=complex)
    if prev.shape != next_.shape or prev.ndim != 1:
        raise ValueError("prev and next must be 1-d arrays of equal length")
    best: tuple[int, ...] | None = None
    best_cost = np.inf
    for perm in itertools.permutations(range(len(prev))):
        cost = float(np.abs(prev - next_[list(perm)]).sum())
        if cost < best_cost - 1e-12:
            best, best_cost = perm, cost
        elif abs(cost - best_cost) <= 1e-12 and (best is None or perm < best):
            best, best_cost = perm, min(cost, best_cost)
    assert best is not None
    return best
