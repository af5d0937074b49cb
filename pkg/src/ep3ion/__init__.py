"""Dissipative three-level dynamics and exceptional-point analysis toolkit.

Conventions used throughout the package:

* Angular frequencies and decay rates are in rad/us, times in us.
  Configuration files and CLI flags take linear MHz and are multiplied
  by 2*pi on ingest.
* Complex matrices and state vectors are plain numpy arrays with
  ``dtype=complex``.
* Density-matrix vectorization is column-stacking: ``vec(rho)`` stacks
  the columns of ``rho``, so ``vec(A @ X @ B) = kron(B.T, A) @ vec(X)``.
"""

from ep3ion.linalg import EigenSystem, eig, expm, expm_batch, match_permutation
from ep3ion.model import (
    AuxParams,
    FullParams,
    SymmetryOp,
    SystemParams,
    apt_symmetry_op,
    build_full_model,
    build_heff,
    build_heff_aux,
    build_reduced_hamiltonian,
    build_reduced_jumps,
    closed_form_spectrum,
    ep_state,
    pt_symmetry_op,
    spin1,
    symmetry_transform,
)
from ep3ion.dynamics import (
    Superoperator,
    offdiag_sector,
    propagate_lindblad,
    propagate_nh,
    vectorize_lindblad,
)

__version__ = "0.1.0"

__all__ = [
    "AuxParams",
    "EigenSystem",
    "FullParams",
    "Superoperator",
    "SymmetryOp",
    "SystemParams",
    "apt_symmetry_op",
    "build_full_model",
    "build_heff",
    "build_heff_aux",
    "build_reduced_hamiltonian",
    "build_reduced_jumps",
    "closed_form_spectrum",
    "eig",
    "ep_state",
    "expm",
    "expm_batch",
    "match_permutation",
    "offdiag_sector",
    "propagate_lindblad",
    "propagate_nh",
    "pt_symmetry_op",
    "spin1",
    "symmetry_transform",
    "vectorize_lindblad",
    "__version__",
]
