import math

import numpy as np
import pytest

from gatesim.hilbert import (
    DensityMatrix,
    DimensionError,
    Operator,
    SpaceLayout,
    StateVector,
    annihilator,
    basis_state,
    embed,
    expectation,
    expm,
    identity,
    kron,
    partial_trace,
)

RNG = np.random.default_rng(20240811)


def random_matrix(n):
    return RNG.standard_normal((n, n)) + 1j * RNG.standard_normal((n, n))


def test_layout_validation():
    lay = SpaceLayout((3, 3, 5))
    assert lay.total_dim == 45
    with pytest.raises(DimensionError):
        SpaceLayout((3, 1))
    with pytest.raises(DimensionError):
        SpaceLayout(())


def test_basis_index_orders_factors_row_major():
    lay = SpaceLayout((3, 3, 4))
    assert lay.basis_index((0, 0, 0)) == 0
    assert lay.basis_index((0, 0, 3)) == 3
    assert lay.basis_index((0, 1, 0)) == 4
    assert lay.basis_index((2, 2, 3)) == 35
    with pytest.raises(DimensionError):
        lay.basis_index((3, 0, 0))


def test_kron_identity_and_dims():
    lay = SpaceLayout((3, 3, 6))
    eye = kron(lay, [np.eye(3), np.eye(3), np.eye(6)])
    assert np.allclose(eye.entries, np.eye(54))
    with pytest.raises(DimensionError):
        kron(lay, [np.eye(3), np.eye(3)])
    with pytest.raises(DimensionError):
        kron(lay, [np.eye(3), np.eye(4), np.eye(6)])


def test_kron_matrix_element_bookkeeping():
    # <e,g,1| sigma_eg x I x a^dag |g,g,0> = 1 with e=0, g=1
    lay = SpaceLayout((3, 3, 4))
    sigma_eg = np.zeros((3, 3))
    sigma_eg[0, 1] = 1.0
    a = annihilator(4)
    op = kron(lay, [sigma_eg, np.eye(3), a.conj().T])
    bra = basis_state(lay, (0, 1, 1)).amplitudes
    ket = basis_state(lay, (1, 1, 0)).amplitudes
    assert bra.conj() @ op.entries @ ket == pytest.approx(1.0)


def test_kron_mixed_product_property():
    lay = SpaceLayout((2, 3))
    a, b, c, d = random_matrix(2), random_matrix(3), random_matrix(2), random_matrix(3)
    lhs = kron(lay, [a, b]) @ kron(lay, [c, d])
    rhs = kron(lay, [a @ c, b @ d])
    assert np.allclose(lhs.entries, rhs.entries, atol=1e-12)


def test_annihilator_number_states():
    a = annihilator(6)
    n_op = a.conj().T @ a
    for n in range(6):
        vec = np.zeros(6)
        vec[n] = 1.0
        assert vec @ n_op @ vec == pytest.approx(n)
    # commutator is the identity except the truncation corner
    comm = a @ a.conj().T - a.conj().T @ a
    expected = np.eye(6, dtype=complex)
    expected[5, 5] = -5.0
    assert np.allclose(comm, expected)
    with pytest.raises(DimensionError):
        annihilator(1)


def test_partial_trace_product_state():
    lay = SpaceLayout((3, 3, 4))
    psi = basis_state(lay, (2, 2, 0))
    reduced = partial_trace(psi.projector(), keep=(0, 1))
    expected = np.zeros((9, 9))
    expected[8, 8] = 1.0
    assert np.allclose(reduced.entries, expected)
    assert reduced.trace() == pytest.approx(1.0, abs=1e-12)


def test_partial_trace_preserves_trace_and_rejects_bad_factor():
    lay = SpaceLayout((2, 2, 3))
    m = random_matrix(12)
    rho = DensityMatrix(lay, m @ m.conj().T / np.trace(m @ m.conj().T).real, strict=False)
    red = partial_trace(rho, keep=(1,))
    assert complex(np.trace(red.entries)) == pytest.approx(rho.trace(), abs=1e-12)
    with pytest.raises(DimensionError):
        partial_trace(rho, keep=(5,))
    with pytest.raises(DimensionError):
        partial_trace(rho, keep=())


def test_partial_trace_bell_correlated_toy():
    # (|g,0> + |f,1>)/sqrt2 on qutrit x cavity -> maximally mixed qutrit block
    lay = SpaceLayout((3, 2))
    v = np.zeros(6, dtype=complex)
    v[lay.basis_index((1, 0))] = 1 / math.sqrt(2)
    v[lay.basis_index((2, 1))] = 1 / math.sqrt(2)
    red = partial_trace(StateVector(lay, v).projector(), keep=(0,))
    expected = np.diag([0.0, 0.5, 0.5])
    assert np.allclose(red.entries, expected, atol=1e-12)


def test_expm_identity_and_known_rotation():
    lay = SpaceLayout((2, 2))
    zero = Operator(lay, np.zeros((4, 4)))
    assert np.allclose(expm(zero).entries, np.eye(4))
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    op = kron(SpaceLayout((2, 2)), [sx, np.eye(2)])
    rot = expm(op, scale=1j * math.pi)
    assert np.allclose(rot.entries, -np.eye(4), atol=1e-12)


def test_expm_inverse_property():
    lay = SpaceLayout((5,))
    for _ in range(5):
        h = random_matrix(5)
        h = (h + h.conj().T) / 2
        h *= 10.0 / np.linalg.norm(h, 2)
        u = expm(Operator(lay, h), 1j)
        v = expm(Operator(lay, h), -1j)
        assert np.allclose((u @ v).entries, np.eye(5), atol=1e-9)


def test_expm_squeeze_conjugation_matches_sech_relation():
    # U_s (Dc n - (Op/2)(a^2+a^dag^2)) U_s^dag ~ Dc sech(2 r) n + const
    r_p, n_fock, delta_c = 0.5, 60, 1.3
    omega_p = delta_c * math.tanh(2 * r_p)
    lay = SpaceLayout((n_fock,))
    a = annihilator(n_fock)
    h = Operator(lay, delta_c * a.conj().T @ a - (omega_p / 2) * (a @ a + a.conj().T @ a.conj().T))
    us = expm(Operator(lay, (a @ a - a.conj().T @ a.conj().T) / 2), r_p)
    conj = (us @ h @ us.dag()).entries
    delta = delta_c / math.cosh(2 * r_p)
    const = conj[0, 0]
    diag = np.real(np.diag(conj)[:10] - const)
    assert np.allclose(diag, delta * np.arange(10), atol=1e-7)
    off = conj[:10, :10] - np.diag(np.diag(conj[:10, :10]))
    assert np.max(np.abs(off)) < 1e-7


def test_expectation_vacuum_and_displacement():
    n_fock = 25
    lay = SpaceLayout((n_fock,))
    a = annihilator(n_fock)
    n_op = Operator(lay, a.conj().T @ a)
    vac = basis_state(lay, (0,))
    assert expectation(n_op, vac) == pytest.approx(0.0)
    beta = 0.7 - 0.4j
    disp = expm(Operator(lay, beta * a.conj().T - np.conj(beta) * a))
    coherent = StateVector(lay, disp.entries @ vac.amplitudes)
    a_val = expectation(Operator(lay, a), coherent)
    assert a_val == pytest.approx(beta, abs=1e-10)


def test_expectation_hermitian_is_real_and_layout_checked():
    lay = SpaceLayout((3, 3))
    h = random_matrix(9)
    h = (h + h.conj().T) / 2
    v = RNG.standard_normal(9) + 1j * RNG.standard_normal(9)
    state = StateVector(lay, v / np.linalg.norm(v))
    val = expectation(Operator(lay, h), state)
    assert abs(val.imag) < 1e-12
    with pytest.raises(DimensionError):
        expectation(Operator(SpaceLayout((2, 2)), np.eye(4)), state)


def test_density_matrix_invariant_checks():
    lay = SpaceLayout((2, 2))
    with pytest.raises(ValueError):
        DensityMatrix(lay, random_matrix(4))  # not Hermitian
    rho = DensityMatrix(lay, np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex))
    assert rho.min_eigenvalue() == pytest.approx(0.0, abs=1e-12)


def test_operators_are_immutable():
    lay = SpaceLayout((2, 2))
    op = identity(lay)
    with pytest.raises(ValueError):
        op.entries[0, 0] = 2.0
    st = basis_state(lay, (0, 0))
    with pytest.raises(ValueError):
        st.amplitudes[0] = 0.0


def test_embed_single_factor():
    lay = SpaceLayout((2, 3))
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    op = embed(lay, 0, sx)
    assert np.allclose(op.entries, np.kron(sx, np.eye(3)))
