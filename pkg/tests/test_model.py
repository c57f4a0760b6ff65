import math

import numpy as np
import pytest
import scipy.linalg

from gatesim.hilbert import SpaceLayout, StateVector, basis_state, embed
from gatesim.model import (
    E,
    F,
    G,
    LabFrameParams,
    ParameterError,
    PulseShape,
    SystemParams,
    annihilator,
    build_h_err,
    build_h_lab,
    build_h_rabi,
    build_h_s,
    build_lindblad,
    cavity_annihilator,
    collective_sx,
    computational_kets,
    initial_superposition,
    number_operator,
)


def test_pulse_shapes():
    const = PulseShape()
    assert const.envelope(2.0)(0.3) == 2.0
    shaped = PulseShape("sine_squared", alpha=2.0)
    g = shaped.envelope(1.5)
    tau = math.pi / 2.0  # alpha * tau = pi
    assert g(0.0) == pytest.approx(0.0, abs=1e-15)
    assert g(tau) == pytest.approx(0.0, abs=1e-12)
    ts = np.linspace(0, tau, 101)
    assert np.all(shaped.envelope_array(1.5, ts) >= 0.0)
    with pytest.raises(ParameterError):
        PulseShape("sine_squared", alpha=0.0)
    with pytest.raises(ParameterError):
        PulseShape("triangle")


def test_system_params_validation():
    with pytest.raises(ParameterError):
        SystemParams(g_m=0.0)
    with pytest.raises(ParameterError):
        SystemParams(kappa=-1.0)
    with pytest.raises(ParameterError):
        SystemParams(n_fock=1)
    p = SystemParams(r_p=2.0)
    assert p.g_s == pytest.approx(math.exp(2.0))


def test_lab_frame_r_p_and_domain():
    p = LabFrameParams(omega_a=6.0, omega_p=10.0, omega=5.0, omega_e=5.0,
                       omega_g=0.0, Omega_p=0.5, g=0.1)
    assert p.delta_c == pytest.approx(1.0)
    assert p.delta_q == pytest.approx(0.0)
    assert p.r_p == pytest.approx(0.5 * math.atanh(0.5))
    bad = LabFrameParams(omega_a=6.0, omega_p=10.0, omega=5.0, omega_e=5.0,
                         omega_g=0.0, Omega_p=2.0, g=0.1)
    with pytest.raises(ParameterError):
        bad.r_p


def test_h_lab_diagonal_case_and_hermiticity():
    lay = SpaceLayout((3, 3, 5))
    p = LabFrameParams(omega_a=6.0, omega_p=10.0, omega=5.0, omega_e=5.3,
                       omega_g=0.0, Omega_p=0.0, g=0.0)
    h = build_h_lab(p, lay)
    n_op = number_operator(lay).entries
    proj_e = sum(embed(lay, j, np.diag([1.0, 0, 0])).entries for j in (0, 1))
    expected = p.delta_c * n_op + p.delta_q * proj_e
    assert np.allclose(h.entries, expected, atol=1e-12)
    p2 = LabFrameParams(omega_a=6.0, omega_p=10.0, omega=5.0, omega_e=5.0,
                        omega_g=0.0, Omega_p=0.4, g=0.2, rabi_amp=0.1)
    assert build_h_lab(p2, lay).is_hermitian(1e-12)


def test_h_lab_cavity_spectrum_matches_sech_relation():
    r_p = 0.6
    delta_c = 1.7
    lay = SpaceLayout((3, 3, 50))
    p = LabFrameParams(omega_a=delta_c + 5.0, omega_p=10.0, omega=5.0, omega_e=5.0,
                       omega_g=0.0, Omega_p=delta_c * math.tanh(2 * r_p), g=0.0)
    h = build_h_lab(p, lay)
    evals = np.sort(np.linalg.eigvalsh(h.entries))
    # every qutrit config shares the cavity ladder; compare the unique gaps
    unique = np.unique(np.round(evals, 9))
    gaps = np.diff(unique)[:5]
    delta = delta_c / math.cosh(2 * r_p)
    assert np.allclose(gaps, delta, atol=1e-6)


def test_h_s_equal_magnitudes_at_zero_squeeze():
    p = SystemParams(g_m=1.0, r_p=0.0, delta=1.0, omega=0.0, n_fock=4)
    full = build_h_s(p)
    ideal = build_h_rabi(p)
    err = full.coupling - ideal.coupling
    assert np.linalg.norm(err.entries, 2) == pytest.approx(
        np.linalg.norm(ideal.coupling.entries, 2), rel=1e-12
    )


def test_h_s_hermitian_for_all_times():
    p = SystemParams(g_m=1.3, r_p=1.7, delta=2.0, omega=-0.7, n_fock=6,
                     pulse=PulseShape("sine_squared", alpha=1.1))
    h = build_h_s(p)
    for t in (0.0, 0.37, 1.0, 2.4):
        m = h.matrix(t)
        assert np.max(np.abs(m - m.conj().T)) < 1e-12


def test_error_term_norm_ratio():
    # |H_err| / |H_rabi coupling| = e^{-2 r_p} by construction
    for r_p in (0.5, 1.5, 2.5):
        p = SystemParams(g_m=1.0, r_p=r_p, delta=1.0, omega=0.0, n_fock=8)
        ideal = build_h_rabi(p).coupling.entries
        err = build_h_err(p).coupling.entries
        ratio = np.linalg.norm(err, 2) / np.linalg.norm(ideal, 2)
        assert ratio == pytest.approx(math.exp(-2 * r_p), rel=1e-10)


def test_coupling_coefficients_by_matrix_element():
    # enhanced term (g/2)e^{r_p} on <e,g,1|H|g,g,0>; error term shifts it by
    # -(g/2)e^{-r_p} through the (a^dag - a) quadrature
    p = SystemParams(g_m=1.0, r_p=1.2, delta=0.0, omega=0.0, n_fock=4)
    lay = p.layout
    bra = basis_state(lay, (E, G, 1)).amplitudes
    ket = basis_state(lay, (G, G, 0)).amplitudes
    full = bra.conj() @ build_h_s(p).matrix(0.0) @ ket
    ideal = bra.conj() @ build_h_rabi(p).matrix(0.0) @ ket
    assert ideal == pytest.approx(0.5 * math.exp(1.2), rel=1e-12)
    assert full - ideal == pytest.approx(-0.5 * math.exp(-1.2), rel=1e-12)


def test_h_rabi_interaction_picture_t0_and_phases():
    p = SystemParams(g_m=1.0, r_p=1.0, delta=2.0, omega=0.0, n_fock=5)
    ham = build_h_rabi(p, interaction_picture=True)
    sx = collective_sx(p.layout).entries
    a = cavity_annihilator(p.layout).entries
    expected0 = math.exp(1.0) * sx @ (a + a.conj().T)
    assert np.allclose(ham.matrix(0.0), expected0, atol=1e-12)
    t = 0.731
    expected_t = math.exp(1.0) * sx @ (
        a * np.exp(-1j * p.delta * t) + a.conj().T * np.exp(1j * p.delta * t)
    )
    assert np.allclose(ham.matrix(t), expected_t, atol=1e-12)


def test_h_s_minus_h_rabi_is_error_term():
    p = SystemParams(g_m=0.9, r_p=1.4, delta=1.1, omega=-0.4, n_fock=5)
    t = 0.23
    diff = build_h_s(p).matrix(t) - build_h_rabi(p).matrix(t)
    err = build_h_err(p).matrix(t)
    assert np.allclose(diff, err, atol=1e-12)


def test_frame_equivalence_of_rabi_pictures():
    # identical <n>(t) when the Schrodinger-picture run is related to the
    # interaction-picture run by exp(-i Delta a^dag a t)
    from gatesim.evolve import EvolutionRequest, StepControl, evolve_schrodinger

    p = SystemParams(g_m=1.0, r_p=2.5, delta=math.exp(2.5), omega=-math.exp(2.5) / 2,
                     n_fock=12)
    lay = p.layout
    psi0 = StateVector(lay, initial_superposition(lay))
    ts = tuple(np.linspace(0, 0.3, 7))
    n_op = number_operator(lay)
    runs = {}
    for label, ham in (("schrodinger", build_h_rabi(p)),
                       ("interaction", build_h_rabi(p, interaction_picture=True))):
        res = evolve_schrodinger(EvolutionRequest(
            hamiltonian=ham, initial=psi0, t_final=ts[-1],
            step_control=StepControl(dt_max=2 * math.pi / p.delta / 400),
            sample_times=ts, observables={"n": n_op},
        ))
        runs[label] = res.series["n"].real
    assert np.allclose(runs["schrodinger"], runs["interaction"], atol=1e-7)


def test_squeezed_frame_matches_lab_frame_by_conjugation():
    # U_s H_lab U_s^dag equals H_s plus a constant on the truncation-safe block
    r_p = 0.4
    delta = 1.9
    delta_c = delta * math.cosh(2 * r_p)
    n_fock = 60
    p = SystemParams(g_m=1.0, r_p=r_p, delta=delta, omega=-0.8, n_fock=n_fock)
    lay = p.layout
    lab = LabFrameParams(
        omega_a=delta_c + 5.0, omega_p=10.0, omega=5.0, omega_e=5.0, omega_g=0.0,
        Omega_p=delta_c * math.tanh(2 * r_p), g=1.0, rabi_amp=-0.8,
    )
    a = annihilator(n_fock)
    us = embed(lay, 2, scipy.linalg.expm(r_p * (a @ a - a.conj().T @ a.conj().T) / 2)).entries
    conj = us @ build_h_lab(lab, lay).entries @ us.conj().T
    h_s = build_h_s(p).matrix(0.0)
    const = (conj - h_s)[0, 0]
    assert const.real == pytest.approx((delta - delta_c) / 2, abs=1e-9)
    diff = conj - h_s - const * np.eye(lay.total_dim)
    keep = (np.arange(lay.total_dim).reshape(3, 3, n_fock)[:, :, :10]).ravel()
    assert np.max(np.abs(diff[np.ix_(keep, keep)])) < 1e-6


def test_lindblad_spec_zero_rates_and_action():
    p = SystemParams(g_m=1.0, r_p=0.0, delta=1.0, kappa=0.0, gamma=0.0, n_fock=4)
    spec = build_lindblad(p)
    assert all(np.allclose(c.op.entries, 0.0) for c in spec.collapse)

    gamma = 0.49
    p2 = SystemParams(g_m=1.0, r_p=0.0, delta=1.0, kappa=0.3, gamma=gamma, n_fock=4)
    spec2 = build_lindblad(p2)
    by_label = {c.label: c for c in spec2.collapse}
    lay = p2.layout
    ket = basis_state(lay, (E, G, 0)).amplitudes
    out = by_label["L_g1"].op.entries @ ket
    expected = math.sqrt(gamma) * basis_state(lay, (G, G, 0)).amplitudes
    assert np.allclose(out, expected)
    # sum over the two channels of qutrit 1: 2 gamma |e><e| x I
    total = sum(
        by_label[f"L_{z}1"].op.dag().entries @ by_label[f"L_{z}1"].op.entries
        for z in ("g", "f")
    )
    expected_total = 2 * gamma * embed(lay, 0, np.diag([1.0, 0, 0])).entries
    assert np.allclose(total, expected_total, atol=1e-12)
    assert by_label["L_a"].factor == 2


def test_computational_kets_and_initial_state():
    kets = computational_kets()
    for v in kets.values():
        assert np.linalg.norm(v) == pytest.approx(1.0)
    assert abs(kets["ff"].conj() @ kets["++"]) < 1e-15
    lay = SpaceLayout((3, 3, 5))
    psi0 = initial_superposition(lay)
    assert np.linalg.norm(psi0) == pytest.approx(1.0)
    assert psi0.conj() @ np.kron(kets["f+"], np.eye(5)[0]) == pytest.approx(0.5)
