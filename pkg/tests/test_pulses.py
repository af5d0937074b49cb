"""Pulse-algebra tests.

Oracle: the closed-form single-pulse action R|j> = cos(a/2)|j> -
i sin(a/2) e^{i beta}|i>, plus the tomography trial states the prep
sequences are supposed to reach.
"""

import numpy as np
import pytest

from ep3ion import linalg
from ep3ion.model import spin1
from ep3ion.pulses import (
    AUX,
    DIM,
    PulseOp,
    TwoTonePulse,
    apply_sequence,
    basis_state,
    generator,
    prep_probe,
    prep_quench,
    prep_u0,
    prep_u1,
    prep_ux,
    prep_uz,
    prepare,
    rotation,
)
from ep3ion.tomography import TrialFamily, trial_state


def split_global_phase(psi):
    """Unit phase factor inferred from the |3> component."""
    c = np.sqrt(2.0) * psi[3]
    assert abs(abs(c) - 1.0) < 1e-12
    return c


# ---------------------------------------------------------------------------
# primitives


def test_single_pulse_closed_form():
    rng = np.random.default_rng(0)
    for _ in range(20):
        i, j = rng.choice(DIM, size=2, replace=False)
        a, b = rng.uniform(0, 2 * np.pi), rng.uniform(-np.pi, np.pi)
        r = rotation(PulseOp(int(i), int(j), a, b))
        on_j = r @ basis_state(int(j))
        want = np.cos(a / 2) * basis_state(int(j)) \
            - 1j * np.sin(a / 2) * np.exp(1j * b) * basis_state(int(i))
        assert np.allclose(on_j, want, atol=1e-12)


def test_generators_hermitian_rotations_unitary():
    rng = np.random.default_rng(1)
    ops = [PulseOp(int(i), int(j), rng.uniform(0, 4), rng.uniform(-3, 3))
           for i, j in rng.integers(0, DIM, size=(10, 2)) if i != j]
    ops.append(TwoTonePulse(0.7))
    for op in ops:
        t = generator(op)
        assert np.allclose(t, t.conj().T, atol=0.0)
        r = rotation(op)
        assert np.allclose(r @ r.conj().T, np.eye(DIM), atol=1e-13)


def test_two_tone_is_spin_x_rotation():
    alpha = 0.9
    r = rotation(TwoTonePulse(alpha))
    want = np.eye(DIM, dtype=complex)
    want[:3, :3] = linalg.expm(-1j * alpha * spin1("x"))
    assert np.allclose(r, want, atol=1e-13)


def test_long_sequence_preserves_norm():
    rng = np.random.default_rng(2)
    seq = [PulseOp(int(i), int(j), float(a), float(b))
           for (i, j), a, b in zip(rng.integers(0, DIM, size=(60, 2)),
                                   rng.uniform(0, 4, 60), rng.uniform(-3, 3, 60))
           if i != j][:50]
    psi = apply_sequence(seq, 1)
    assert abs(np.linalg.norm(psi) - 1.0) < 1e-12


def test_apply_sequence_start_contract():
    assert np.allclose(apply_sequence([], 2), basis_state(2), atol=0.0)
    vec = np.zeros(4, dtype=complex)
    vec[0] = 1.0
    out = apply_sequence([PulseOp(1, 0, np.pi, 0.0)], vec)
    assert out.shape == (4,)
    with pytest.raises(ValueError):
        apply_sequence([], 5)
    with pytest.raises(ValueError):
        apply_sequence([], np.eye(3))


def test_validation_errors():
    with pytest.raises(ValueError):
        PulseOp(2, 2, np.pi)
    with pytest.raises(ValueError):
        PulseOp(-1, 2, np.pi)
    with pytest.raises(ValueError):
        generator(PulseOp(1, 4, np.pi), dim=3)
    with pytest.raises(ValueError):
        generator(TwoTonePulse(1.0), dim=2)


# ---------------------------------------------------------------------------
# preparation targets


def test_probe_prep():
    psi = prepare(prep_probe())
    assert np.allclose(psi, -1j * basis_state(AUX), atol=1e-12)


def test_quench_prep():
    psi = prepare(prep_quench())
    c = split_global_phase(psi)
    want = np.zeros(DIM, dtype=complex)
    want[0] = want[3] = c / np.sqrt(2.0)
    assert np.allclose(psi, want, atol=1e-12)


@pytest.mark.parametrize("kind,builder", [("z", prep_uz), ("x", prep_ux), ("zero", prep_u0)])
def test_trial_state_preps(kind, builder):
    for phi in (-1.1, -0.3, 0.0, 0.4, 1.3):
        psi = prepare(builder(phi))
        c = split_global_phase(psi)
        u = trial_state(TrialFamily(kind=kind, angle=phi))
        assert np.allclose(psi[:3], c * u / np.sqrt(2.0), atol=1e-10)
        assert abs(psi[AUX]) < 1e-12


def test_u1_prep():
    psi = prepare(prep_u1())
    u1 = np.array([1.0, 0.0, -1j, 0.0, 0.0], dtype=complex) / np.sqrt(2.0)
    overlap = abs(np.vdot(u1, psi))
    assert overlap > 1.0 - 1e-10
    assert abs(psi[1]) < 1e-12 and abs(psi[3]) < 1e-12 and abs(psi[AUX]) < 1e-12
