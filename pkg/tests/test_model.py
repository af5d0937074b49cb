"""Model construction and closed-form spectrum tests.

The closed forms are verified against the numerical eigendecomposition
of the constructed matrices (the independent oracle), and the operator
builders against the defining algebraic identities.
"""

import numpy as np
import pytest

from ep3ion import linalg
from ep3ion.model import (
    SQRT2,
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

GAMMA = 2.0 * np.pi * 0.040


# ---------------------------------------------------------------------------
# parameter containers


def test_symmetric_constructor_and_flag():
    p = SystemParams.symmetric(0.3, 0.1)
    assert p.omega1 == p.omega2 == 0.3
    assert p.gamma2 == 2.0 * p.gamma1 == 0.2
    assert p.is_symmetric
    assert not SystemParams(0.3, 0.3, 0.1, 0.3).is_symmetric


def test_negative_rates_rejected():
    with pytest.raises(ValueError):
        SystemParams(0.1, 0.1, -0.1, 0.2)
    with pytest.raises(ValueError):
        AuxParams(omega_a=0.01, gamma_a=-1.0)
    with pytest.raises(ValueError):
        AuxParams(omega_a=0.01, n0=0.0)
    with pytest.raises(ValueError):
        AuxParams(omega_a=0.01, branch_f=1.5)


def test_full_params_elimination_guards():
    big = 2.0 * np.pi * 19.6
    fp = FullParams.from_rates(GAMMA, 2 * GAMMA, big, GAMMA, GAMMA)
    assert fp.j1 == pytest.approx(np.sqrt(GAMMA * big / 2.0))
    # nominal rates give j/big_gamma ~ 1/31: inside the warn band
    assert fp.elimination_warning
    g_quiet = 2.0 * big / 200.0**2
    assert not FullParams.from_rates(g_quiet, 2 * g_quiet, big, 0.1, 0.1).elimination_warning
    g_warn = 2.0 * big / 50.0**2 * 1.1
    assert FullParams.from_rates(g_warn, 2 * g_warn, big, 0.1, 0.1).elimination_warning
    # j beyond big_gamma/10 -> refuse
    g_bad = 2.0 * big / 10.0**2 * 1.1
    with pytest.raises(ValueError):
        FullParams.from_rates(g_bad, 2 * g_bad, big, 0.1, 0.1)


# ---------------------------------------------------------------------------
# operator builders


def test_spin1_algebra():
    sx, sz = spin1("x"), spin1("z")
    assert np.allclose(sx, sx.conj().T)
    assert np.allclose(sz, sz.conj().T)
    # spin-1 commutator [Sz, Sx] = i*Sy and Casimir Sx^2+Sy^2+Sz^2 = 2
    sy = (sz @ sx - sx @ sz) / 1j
    assert np.allclose(sx @ sx + sy @ sy + sz @ sz, 2.0 * np.eye(3), atol=1e-14)
    with pytest.raises(ValueError):
        spin1("y")


def test_heff_matches_spin_form_in_symmetric_config():
    p = SystemParams.symmetric(0.8 * GAMMA, GAMMA)
    want = 0.8 * GAMMA * spin1("x") + 1j * GAMMA * spin1("z") - 1j * GAMMA * np.eye(3)
    assert np.allclose(build_heff(p), want, atol=1e-15)


def test_heff_detunings_enter_diagonal():
    p = SystemParams(0.1, 0.2, 0.01, 0.02, delta0=0.3, delta1=0.4)
    h = build_heff(p)
    assert h[0, 0] == pytest.approx(-0.3)
    assert h[1, 1] == pytest.approx(-0.4 - 0.01j)
    assert h[2, 2] == pytest.approx(-0.02j)
    assert h[0, 1] == pytest.approx(0.1 / SQRT2)
    assert h[1, 2] == pytest.approx(0.2 / SQRT2)


def test_jump_operators_close_the_effective_hamiltonian():
    p = SystemParams(0.21, 0.13, 0.043, 0.061, delta0=0.01, delta1=-0.02)
    jumps = build_reduced_jumps(p)
    assert len(jumps) == 6
    total = sum(L.conj().T @ L for L in jumps)
    assert np.allclose(total, np.diag([0.0, 2 * p.gamma1, 2 * p.gamma2, 0.0]), atol=1e-14)
    # Heff = H - (i/2) sum L^dag L restricted to the driven manifold
    h4 = build_reduced_hamiltonian(p)
    heff4 = h4 - 0.5j * total
    assert np.allclose(heff4[:3, :3], build_heff(p), atol=1e-14)
    assert np.allclose(heff4[3], 0.0)


def test_heff_aux_embeds_probe_coupling():
    p = SystemParams.symmetric(GAMMA, GAMMA)
    a = AuxParams(omega_a=0.025, delta_a=0.4)
    h = build_heff_aux(p, a)
    assert h.shape == (4, 4)
    assert np.allclose(h[:3, :3], build_heff(p))
    assert h[1, 3] == h[3, 1] == pytest.approx(0.0125)
    assert h[3, 3] == pytest.approx(-0.4)
    assert h[0, 3] == h[2, 3] == 0.0


def test_full_model_structure():
    big = 2.0 * np.pi * 19.6
    fp = FullParams.from_rates(GAMMA, 2 * GAMMA, big, 0.9 * GAMMA, 0.9 * GAMMA)
    h, jumps = build_full_model(fp)
    assert h.shape == (6, 6)
    assert np.allclose(h, h.conj().T)
    assert h[1, 4] == pytest.approx(fp.j1)
    assert h[2, 5] == pytest.approx(fp.j2)
    total = sum(L.conj().T @ L for L in jumps)
    assert np.allclose(total, np.diag([0, 0, 0, 0, big, big]), atol=1e-9)


# ---------------------------------------------------------------------------
# symmetry operations


def test_pt_fixes_and_apt_negates_traceless_heff():
    for ratio in (0.5, 1.0, 1.7):
        p = SystemParams.symmetric(ratio * GAMMA, GAMMA)
        core = build_heff(p) + 1j * GAMMA * np.eye(3)  # omega*Sx + i*gamma*Sz
        assert np.allclose(symmetry_transform(pt_symmetry_op(), core), core, atol=1e-13)
        assert np.allclose(symmetry_transform(apt_symmetry_op(), core), -core, atol=1e-13)


def test_symmetry_ops_are_involutions():
    rng = np.random.default_rng(2)
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    for op in (pt_symmetry_op(), apt_symmetry_op()):
        assert np.allclose(symmetry_transform(op, symmetry_transform(op, m)), m, atol=1e-14)


def test_symmetry_op_requires_unitary():
    with pytest.raises(ValueError):
        SymmetryOp(unitary_part=np.diag([1.0, 2.0, 1.0]), conjugates=False)


# ---------------------------------------------------------------------------
# closed-form spectrum vs numerical oracle


@pytest.mark.parametrize("ratio", [0.4, 0.7, 0.99, 1.0, 1.01, 1.3, 1.6])
def test_closed_form_matches_numerical_eig(ratio):
    omega = ratio * GAMMA
    e_p, e_m, e_0, v_p, v_m, v_0 = closed_form_spectrum(omega, GAMMA)
    p = SystemParams.symmetric(omega, GAMMA)
    h = build_heff(p)
    # eigenvalue check against the full Heff (shifted by -i*gamma)
    want = np.sort_complex(np.array([e_p, e_m, e_0]) - 1j * GAMMA)
    got = np.sort_complex(linalg.eig(h).values)
    assert np.abs(np.sort(want.real) - np.sort(got.real)).max() < 1e-10 * GAMMA
    assert np.abs(np.sort(want.imag) - np.sort(got.imag)).max() < 1e-10 * GAMMA
    # eigenvector residuals against the unshifted generator
    core = h + 1j * GAMMA * np.eye(3)
    for e, v in ((e_p, v_p), (e_m, v_m), (e_0, v_0)):
        assert np.linalg.norm(core @ v - e * v) < 1e-12 * max(np.linalg.norm(core), 1.0)


def test_closed_form_overlaps_both_phases():
    def norm_overlap(a, b):
        return abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))

    for ratio, want_mp in ((2.0, 1.0 / 4.0), (0.5, 4.0)):
        omega = ratio * GAMMA
        _, _, _, v_p, v_m, v_0 = closed_form_spectrum(omega, GAMMA)
        want = want_mp if want_mp <= 1 else 1.0 / want_mp
        # |<psi_-|psi_+>| = (gamma/omega)^2 unbroken, (omega/gamma)^2 broken
        assert norm_overlap(v_m, v_p) == pytest.approx(want, abs=1e-12)
        s = SQRT2 * (GAMMA if ratio > 1 else omega) / np.sqrt(omega**2 + GAMMA**2)
        # sqrt(2)*min(omega,gamma)/sqrt(omega^2+gamma^2) against psi_0
        assert norm_overlap(v_p, v_0) == pytest.approx(min(s, 1.0), abs=1e-12)
        assert norm_overlap(v_m, v_0) == pytest.approx(min(s, 1.0), abs=1e-12)


def test_all_eigenvectors_coalesce_at_ep():
    e_p, e_m, e_0, v_p, v_m, v_0 = closed_form_spectrum(GAMMA, GAMMA)
    assert e_p == e_m == e_0 == 0.0
    target = ep_state()
    for v in (v_p, v_m, v_0):
        v = v / np.linalg.norm(v)
        assert abs(np.vdot(v, target)) == pytest.approx(1.0, abs=1e-12)


def test_closed_form_rejects_zero_drive():
    with pytest.raises(ValueError):
        closed_form_spectrum(0.0, GAMMA)
