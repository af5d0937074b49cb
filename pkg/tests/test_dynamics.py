"""Master-equation propagation tests.

Oracles: the analytic two-level amplitude-damping solution, the defining
superoperator identity L[rho] = -i[H,rho] + sum(L rho L^dag - ...), and
the closed coherence-sector evolution of the four-level model.
"""

import numpy as np
import pytest

from ep3ion.dynamics import (
    Superoperator,
    offdiag_sector,
    propagate_lindblad,
    propagate_nh,
    unvec,
    vec,
    vectorize_lindblad,
)
from ep3ion.model import SystemParams, build_heff, build_reduced_hamiltonian, build_reduced_jumps

GAMMA = 2.0 * np.pi * 0.040


def lindblad_rhs(h, jumps, rho):
    out = -1j * (h @ rho - rho @ h)
    for L in jumps:
        ldl = L.conj().T @ L
        out += L @ rho @ L.conj().T - 0.5 * (ldl @ rho + rho @ ldl)
    return out


def random_rho(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


# ---------------------------------------------------------------------------
# vectorization


def test_vec_unvec_roundtrip_and_column_order():
    m = np.arange(9, dtype=complex).reshape(3, 3)
    v = vec(m)
    assert np.array_equal(v, m.T.reshape(-1))  # column stacking
    assert np.array_equal(unvec(v, 3), m)


def test_vectorized_generator_matches_direct_rhs():
    rng = np.random.default_rng(31)
    for _ in range(20):
        n = int(rng.integers(2, 5))
        h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        h = 0.5 * (h + h.conj().T)
        jumps = [rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
                 for _ in range(int(rng.integers(1, 4)))]
        s = vectorize_lindblad(h, jumps)
        rho = random_rho(rng, n)
        assert np.allclose(s.apply(rho), lindblad_rhs(h, jumps, rho), atol=1e-12)


def test_superoperator_shape_guards():
    with pytest.raises(ValueError):
        Superoperator(dim=2, mat=np.zeros((3, 3)))
    with pytest.raises(ValueError):
        vectorize_lindblad(np.zeros((2, 3)), [])
    with pytest.raises(ValueError):
        vectorize_lindblad(np.zeros((2, 2)), [np.zeros((3, 3))])


# ---------------------------------------------------------------------------
# propagation


def test_two_level_amplitude_damping_analytic():
    # H = 0, single jump sqrt(g)|0><1|: rho_11 decays as exp(-g t),
    # coherence as exp(-g t / 2).
    g = 0.37
    L = np.array([[0.0, np.sqrt(g)], [0.0, 0.0]], dtype=complex)
    s = vectorize_lindblad(np.zeros((2, 2)), [L])
    rho0 = np.array([[0.25, 0.4 - 0.1j], [0.4 + 0.1j, 0.75]], dtype=complex)
    for t in (0.0, 0.3, 2.0, 11.0):
        rho = propagate_lindblad(s, rho0, t)
        assert rho[1, 1] == pytest.approx(0.75 * np.exp(-g * t), abs=1e-12)
        assert rho[0, 1] == pytest.approx((0.4 - 0.1j) * np.exp(-g * t / 2.0), abs=1e-12)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)


def test_lindblad_preserves_density_matrix_structure():
    rng = np.random.default_rng(8)
    p = SystemParams(0.21, 0.17, 0.05, 0.08, delta0=0.02, delta1=-0.01)
    s = vectorize_lindblad(build_reduced_hamiltonian(p), build_reduced_jumps(p))
    for _ in range(20):
        rho0 = random_rho(rng, 4)
        rho = propagate_lindblad(s, rho0, float(rng.uniform(0.0, 150.0)))
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-10)
        assert np.abs(rho - rho.conj().T).max() < 1e-12
        assert np.linalg.eigvalsh(rho).min() > -1e-10


def test_lindblad_semigroup_property():
    p = SystemParams.symmetric(GAMMA, GAMMA)
    s = vectorize_lindblad(build_reduced_hamiltonian(p), build_reduced_jumps(p))
    rho0 = np.zeros((4, 4), dtype=complex)
    rho0[0, 0] = 1.0
    one = propagate_lindblad(s, rho0, 75.0)
    two = propagate_lindblad(s, propagate_lindblad(s, rho0, 30.0), 45.0)
    assert np.abs(one - two).max() < 1e-9


def test_propagate_nh_matches_eigen_expansion():
    p = SystemParams.symmetric(1.4 * GAMMA, GAMMA)
    h = build_heff(p)
    vals, vecs = np.linalg.eig(h)
    c = np.linalg.solve(vecs, np.array([1.0, 0.5j, -0.25], dtype=complex))
    for t in (0.0, 3.0, 20.0):
        want = vecs @ (np.exp(-1j * vals * t) * c)
        got = propagate_nh(h, vecs @ c, t)
        assert np.allclose(got, want, atol=1e-11)


def test_propagate_rejects_wrong_shape():
    s = vectorize_lindblad(np.zeros((2, 2)), [])
    with pytest.raises(ValueError):
        propagate_lindblad(s, np.zeros((3, 3)), 1.0)


# ---------------------------------------------------------------------------
# coherence sector


def test_offdiag_sector_extracts_shelf_column():
    rho = np.arange(16, dtype=complex).reshape(4, 4)
    assert np.array_equal(offdiag_sector(rho), np.array([3.0, 7.0, 11.0]))
    with pytest.raises(ValueError):
        offdiag_sector(np.zeros((3, 3)))


def test_sector_evolution_closed_under_heff():
    # the (rho_03, rho_13, rho_23) column of the Lindblad solution equals
    # exp(-i Heff t) applied to the initial column, for random states
    rng = np.random.default_rng(44)
    p = SystemParams.symmetric(0.9 * GAMMA, GAMMA)
    s = vectorize_lindblad(build_reduced_hamiltonian(p), build_reduced_jumps(p))
    h = build_heff(p)
    for _ in range(20):
        rho0 = random_rho(rng, 4)
        for t in (10.0, 50.0, 200.0):
            want = propagate_nh(h, offdiag_sector(rho0), t)
            got = offdiag_sector(propagate_lindblad(s, rho0, t))
            assert np.abs(got - want).max() < 1e-9


def test_sector_evolution_closed_for_asymmetric_params_too():
    rng = np.random.default_rng(45)
    p = SystemParams(0.3, 0.22, 0.06, 0.09, delta0=0.04, delta1=-0.03)
    s = vectorize_lindblad(build_reduced_hamiltonian(p), build_reduced_jumps(p))
    h = build_heff(p)
    rho0 = random_rho(rng, 4)
    got = offdiag_sector(propagate_lindblad(s, rho0, 80.0))
    want = propagate_nh(h, offdiag_sector(rho0), 80.0)
    assert np.abs(got - want).max() < 1e-9
