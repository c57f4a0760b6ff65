import math

import numpy as np
import pytest

from gatesim.evolve import (
    EvolutionRequest,
    StepControl,
    evolve_lindblad,
    evolve_schrodinger,
    step_convergence_probe,
)
from gatesim.hilbert import (
    DensityMatrix,
    Operator,
    SpaceLayout,
    StateVector,
    basis_state,
    embed,
)
from gatesim.model import (
    CollapseOperator,
    HamiltonianParts,
    LindbladSpec,
    PulseShape,
    SystemParams,
    annihilator,
    build_h_rabi,
    build_h_s,
    build_lindblad,
    collective_sx,
    cavity_annihilator,
    initial_superposition,
    number_operator,
)

RNG = np.random.default_rng(99)


def static_hamiltonian(layout, matrix):
    zero = Operator(layout, np.zeros_like(matrix))
    return HamiltonianParts(layout, Operator(layout, matrix), zero, PulseShape().envelope(0.0))


def test_zero_hamiltonian_keeps_state():
    lay = SpaceLayout((2, 2))
    psi = basis_state(lay, (0, 1))
    res = evolve_schrodinger(EvolutionRequest(
        hamiltonian=static_hamiltonian(lay, np.zeros((4, 4), dtype=complex)),
        initial=psi, t_final=3.0, step_control=StepControl(dt_max=0.05),
        sample_times=(1.0, 3.0),
    ))
    assert np.allclose(res.snapshots[-1].amplitudes, psi.amplitudes)
    assert res.diagnostics.max_norm_drift == 0.0


def test_diagonal_phase_evolution():
    lay = SpaceLayout((2, 2, 5))
    delta = 1.3
    h = delta * number_operator(lay).entries
    psi = basis_state(lay, (0, 0, 1))
    t = 2.0
    res = evolve_schrodinger(EvolutionRequest(
        hamiltonian=static_hamiltonian(lay, h), initial=psi, t_final=t,
        step_control=StepControl(dt_max=2 * math.pi / delta / 400), sample_times=(t,),
    ))
    amp = res.snapshots[-1].amplitudes[lay.basis_index((0, 0, 1))]
    assert amp == pytest.approx(np.exp(-1j * delta * t), abs=1e-8)


def test_interaction_picture_circle_matches_displacement_integral():
    # Eq.-of-motion check: Omega = 0, Delta = g_s, from |++0>:
    # <n>(t) = |F(t)|^2 for the S_x = 1 branch, returning to 0 at 2 pi/Delta
    from gatesim.design import integrals_unshaped
    from gatesim.model import KET_PLUS

    r_p = 0.0
    g_s = 1.0
    delta = g_s
    n_fock = 35
    p = SystemParams(g_m=1.0, r_p=r_p, delta=delta, omega=0.0, n_fock=n_fock)
    lay = p.layout
    vac = np.zeros(n_fock, dtype=complex)
    vac[0] = 1.0
    psi0 = StateVector(lay, np.kron(np.kron(KET_PLUS, KET_PLUS), vac))
    tau = 2 * math.pi / delta
    ts = np.linspace(0, tau, 21)
    res = evolve_schrodinger(EvolutionRequest(
        hamiltonian=build_h_rabi(p, interaction_picture=True), initial=psi0,
        t_final=tau, step_control=StepControl(dt_max=tau / 4000),
        sample_times=tuple(ts), observables={"n": number_operator(lay)},
    ))
    ns = res.series["n"].real
    predicted = [abs(integrals_unshaped(g_s, delta, 0.0, t).disp_lower) ** 2 for t in ts]
    assert np.allclose(ns, predicted, atol=2e-4)
    assert ns[-1] == pytest.approx(0.0, abs=1e-6)


def test_schrodinger_rejects_collapse_and_bad_initial():
    lay = SpaceLayout((2, 2))
    psi = basis_state(lay, (0, 0))
    p = SystemParams(n_fock=4, kappa=0.1)
    with pytest.raises(ValueError):
        evolve_schrodinger(EvolutionRequest(
            hamiltonian=static_hamiltonian(lay, np.eye(4, dtype=complex)),
            initial=psi, t_final=1.0, step_control=StepControl(dt_max=0.1),
            lindblad=build_lindblad(p),
        ))
    with pytest.raises(ValueError):
        evolve_schrodinger(EvolutionRequest(
            hamiltonian=static_hamiltonian(lay, np.eye(4, dtype=complex)),
            initial=StateVector(lay, np.array([2.0, 0, 0, 0])), t_final=1.0,
            step_control=StepControl(dt_max=0.1),
        ))


def test_lindblad_closed_system_matches_schrodinger():
    d_params = SystemParams(g_m=1.0, r_p=1.0, delta=math.e, omega=-math.e / 2, n_fock=8)
    lay = d_params.layout
    psi0 = StateVector(lay, initial_superposition(lay))
    t = 0.8
    ctrl = StepControl(dt_max=2 * math.pi / d_params.delta / 200)
    ham = build_h_s(d_params)
    res_s = evolve_schrodinger(EvolutionRequest(
        hamiltonian=ham, initial=psi0, t_final=t, step_control=ctrl, sample_times=(t,),
    ))
    res_l = evolve_lindblad(EvolutionRequest(
        hamiltonian=ham, initial=psi0, t_final=t, step_control=ctrl, sample_times=(t,),
    ))
    proj = res_s.snapshots[-1].projector().entries
    assert np.max(np.abs(res_l.snapshots[-1].entries - proj)) < 1e-7
    assert res_l.diagnostics.max_trace_drift < 1e-10


def test_lindblad_textbook_decay_law():
    p = SystemParams(g_m=1.0, r_p=0.0, delta=1.0, kappa=0.37, n_fock=6)
    lay = p.layout
    h0 = static_hamiltonian(lay, np.zeros((lay.total_dim,) * 2, dtype=complex))
    psi = basis_state(lay, (2, 2, 1))
    ts = (0.5, 1.0, 2.0)
    res = evolve_lindblad(EvolutionRequest(
        hamiltonian=h0, initial=psi, t_final=2.0, step_control=StepControl(dt_max=0.005),
        sample_times=ts, lindblad=build_lindblad(p),
        observables={"n": number_operator(lay)},
    ))
    assert np.allclose(res.series["n"].real, np.exp(-0.37 * np.array(ts)), atol=1e-9)


def test_lindblad_linearity_on_operator_inputs():
    # evolve(a rho1 + b rho2) = a evolve(rho1) + b evolve(rho2) within 1e-9
    p = SystemParams(g_m=1.0, r_p=0.5, delta=1.2, omega=-0.6, kappa=0.21, gamma=0.13,
                     n_fock=3)
    lay = p.layout
    ham = build_h_s(p)
    spec = build_lindblad(p)
    ctrl = StepControl(dt_max=0.01)

    def channel(mat):
        res = evolve_lindblad(EvolutionRequest(
            hamiltonian=ham, initial=Operator(lay, mat), t_final=0.7,
            step_control=ctrl, sample_times=(0.7,), lindblad=spec,
        ))
        return res.snapshots[-1].entries

    n = lay.total_dim
    m1 = RNG.standard_normal((n, n)) + 1j * RNG.standard_normal((n, n))
    m2 = RNG.standard_normal((n, n)) + 1j * RNG.standard_normal((n, n))
    a, b = 0.3 - 0.2j, 1.1 + 0.7j
    combined = channel(a * m1 + b * m2)
    separate = a * channel(m1) + b * channel(m2)
    assert np.max(np.abs(combined - separate)) < 1e-9


def test_structured_jumps_match_generic_appliers():
    # the factor-local fast paths must agree with dense L rho L^dag products
    p = SystemParams(g_m=1.0, r_p=0.8, delta=1.5, omega=-0.4, kappa=0.3, gamma=0.2,
                     n_fock=5)
    lay = p.layout
    spec = build_lindblad(p)
    generic = LindbladSpec(tuple(
        CollapseOperator(label=c.label, op=c.op) for c in spec.collapse
    ))
    ham = build_h_s(p)
    psi0 = StateVector(lay, initial_superposition(lay))
    ctrl = StepControl(dt_max=0.02)
    outs = []
    for lb in (spec, generic):
        res = evolve_lindblad(EvolutionRequest(
            hamiltonian=ham, initial=psi0, t_final=0.9, step_control=ctrl,
            sample_times=(0.9,), lindblad=lb,
        ))
        outs.append(res.snapshots[-1].entries)
    assert np.max(np.abs(outs[0] - outs[1])) < 1e-12


def test_lindblad_preserves_hermiticity_and_positivity():
    p = SystemParams(g_m=1.0, r_p=1.0, delta=math.e, omega=-math.e / 2,
                     kappa=0.05, gamma=0.05, n_fock=10)
    lay = p.layout
    psi0 = StateVector(lay, initial_superposition(lay))
    tau = 2 * math.pi / p.delta
    res = evolve_lindblad(EvolutionRequest(
        hamiltonian=build_h_s(p), initial=psi0, t_final=tau,
        step_control=StepControl(dt_max=2 * math.pi / p.delta / 200),
        sample_times=(tau / 2, tau), lindblad=build_lindblad(p),
    ))
    assert res.diagnostics.max_hermiticity_drift < 1e-9
    assert res.diagnostics.max_trace_drift < 1e-7
    assert res.diagnostics.min_eigenvalue > -1e-5


def test_order_four_self_convergence():
    # halving dt shrinks the deviation from a fine reference by >~ 16x
    p = SystemParams(g_m=1.0, r_p=1.5, delta=math.exp(1.5), omega=-math.exp(1.5) / 2,
                     n_fock=8)
    lay = p.layout
    psi0 = StateVector(lay, initial_superposition(lay))
    tau = 2 * math.pi / p.delta
    ham = build_h_s(p)

    def final_state(dt):
        res = evolve_schrodinger(EvolutionRequest(
            hamiltonian=ham, initial=psi0, t_final=tau,
            step_control=StepControl(dt_max=dt), sample_times=(tau,),
        ))
        return res.snapshots[-1].amplitudes

    base_dt = tau / 200
    ref = final_state(base_dt / 8)
    err1 = np.max(np.abs(final_state(base_dt) - ref))
    err2 = np.max(np.abs(final_state(base_dt / 2) - ref))
    assert err1 / err2 >= 10.0


def test_step_convergence_probe():
    # standard gate setup (r_p = 2.5) at the default step rule: the overlap
    # fidelity between dt and dt/2 runs computes to ~7e-8
    p = SystemParams(g_m=1.0, r_p=2.5, delta=math.exp(2.5), omega=-math.exp(2.5) / 2,
                     n_fock=15)
    lay = p.layout
    psi0 = StateVector(lay, initial_superposition(lay))
    tau = 2 * math.pi / p.delta
    req = EvolutionRequest(
        hamiltonian=build_h_s(p), initial=psi0, t_final=tau,
        step_control=StepControl(dt_max=2 * math.pi / p.delta / 200),
        sample_times=(tau,),
    )
    rep = step_convergence_probe(req, refinement=2)
    assert rep.max_fidelity_deviation < 1e-7
    assert rep.max_state_deviation < 1e-5
    zero_req = EvolutionRequest(
        hamiltonian=static_hamiltonian(lay, np.zeros((lay.total_dim,) * 2, dtype=complex)),
        initial=psi0, t_final=1.0, step_control=StepControl(dt_max=0.1),
        sample_times=(1.0,),
    )
    assert step_convergence_probe(zero_req, 2).max_state_deviation == 0.0
    with pytest.raises(ValueError):
        step_convergence_probe(req, refinement=1)


def test_adaptive_mode_agrees_with_fixed_step():
    p = SystemParams(g_m=1.0, r_p=1.0, delta=math.e, omega=-math.e / 2, n_fock=6)
    lay = p.layout
    psi0 = StateVector(lay, initial_superposition(lay))
    tau = 2 * math.pi / p.delta
    ham = build_h_s(p)
    fixed = evolve_schrodinger(EvolutionRequest(
        hamiltonian=ham, initial=psi0, t_final=tau,
        step_control=StepControl(dt_max=tau / 2000), sample_times=(tau,),
    ))
    adaptive = evolve_schrodinger(EvolutionRequest(
        hamiltonian=ham, initial=psi0, t_final=tau,
        step_control=StepControl(dt_max=tau / 100, tolerance=1e-11, adaptive=True),
        sample_times=(tau,),
    ))
    assert np.max(np.abs(fixed.snapshots[-1].amplitudes
                         - adaptive.snapshots[-1].amplitudes)) < 1e-6


def test_sample_time_validation():
    lay = SpaceLayout((2, 2))
    psi = basis_state(lay, (0, 0))
    req = EvolutionRequest(
        hamiltonian=static_hamiltonian(lay, np.eye(4, dtype=complex)),
        initial=psi, t_final=1.0, step_control=StepControl(dt_max=0.1),
        sample_times=(0.5, 0.2),
    )
    with pytest.raises(ValueError):
        evolve_schrodinger(req)
    with pytest.raises(ValueError):
        StepControl(dt_max=0.0)
