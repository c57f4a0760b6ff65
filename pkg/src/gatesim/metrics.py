"""Figures of merit: state and average gate fidelity, populations and phases,
photon number, phase-space trajectories, and the exact-vs-ideal overlap.

The logical qubit lives in {|f>, |+> = (|e>+|g>)/sqrt(2)} per qutrit; the
orthogonal combination |-> = (|e>-|g>)/sqrt(2) is the leakage level.  The
average gate fidelity uses the Pauli-twirl form

    Fbar = [ sum_l tr(U u_l^dag U^dag eps(u_l)) + d^2 ] / (d^2 (d + 1)),

d = 4, with u_l the 16 two-qubit Pauli products in the logical basis and eps
the cavity-traced, logical-projected channel.  Leakage makes the projected
map trace-decreasing, which this expression penalizes as written.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .design import GateDesign, logical_gate_matrix
from .evolve import EvolutionRequest, EvolutionResult, StepControl, evolve_lindblad, evolve_schrodinger
from .hilbert import DensityMatrix, Operator, SpaceLayout, StateVector, partial_trace
from .model import (
    KET_F,
    KET_MINUS,
    KET_PLUS,
    SystemParams,
    build_h_rabi,
    build_h_s,
    build_lindblad,
    cavity_annihilator,
    computational_kets,
    initial_superposition,
    number_operator,
)

PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

STATE_ORDER = ("ff", "f+", "+f", "++")


class LogicalBasis:
    """Embedding of the 2x2-qubit logical space into the qutrit pair."""

    def __init__(self):
        self.ket0 = KET_F.copy()
        self.ket1 = KET_PLUS.copy()
        self.leak = KET_MINUS.copy()

    @property
    def qutrit_isometry(self) -> np.ndarray:
        return np.stack([self.ket0, self.ket1], axis=1)  # 3 x 2

    @property
    def pair_isometry(self) -> np.ndarray:
        e = self.qutrit_isometry
        return np.kron(e, e)  # 9 x 4

    def project_pair(self, rho9: np.ndarray) -> np.ndarray:
        """Project a two-qutrit density matrix onto the 4-dim logical block."""
        e = self.pair_isometry
        return e.conj().T @ rho9 @ e


def _snapshot_density(snap) -> np.ndarray:
    if isinstance(snap, StateVector):
        v = snap.amplitudes
        return np.outer(v, v.conj())
    return snap.entries


def _require_initial_superposition(result: EvolutionResult):
    ref = initial_superposition(result.layout)
    init = result.initial
    amp = init.amplitudes if isinstance(init, StateVector) else None
    if amp is None or np.max(np.abs(amp - ref)) > 1e-9:
        raise ValueError(
            "this metric requires the evolution to start from the equal "
            "computational superposition with the cavity in vacuum"
        )


def target_state(design: GateDesign) -> np.ndarray:
    """Ideal final two-qutrit state: gate applied to the logical part of psi0."""
    kets = computational_kets()
    u = logical_gate_matrix(design).entries
    amps = 0.5 * u @ np.ones(4, dtype=complex)
    return sum(a * kets[s] for a, s in zip(amps, STATE_ORDER))


def state_fidelity(result: EvolutionResult, design: GateDesign) -> np.ndarray:
    """F(t) = <psi_tau| tr_cav rho(t) |psi_tau> at each sample time."""
    _require_initial_superposition(result)
    psi_tau = target_state(design)
    out = np.empty(len(result.times))
    for i, snap in enumerate(result.snapshots):
        rho = DensityMatrix(result.layout, _snapshot_density(snap), strict=False)
        rho_q = partial_trace(rho, (0, 1)).entries
        out[i] = float(np.real(psi_tau.conj() @ rho_q @ psi_tau))
    return out


# ---------------------------------------------------------------------------
# average gate fidelity
# ---------------------------------------------------------------------------

def pauli_basis_4() -> list[np.ndarray]:
    return [np.kron(p1, p2) for p1, p2 in itertools.product(PAULIS, repeat=2)]


def average_fidelity(channel: Callable[[np.ndarray], np.ndarray], design: GateDesign) -> float:
    """Pauli-twirl average fidelity of ``channel`` against the ideal gate.

    ``channel`` maps a 4x4 logical-basis operator to its evolved, projected
    image (see :func:`lindblad_channel` / :func:`closed_channel`).
    """
    u = logical_gate_matrix(design).entries
    d = 4
    total = 0.0
    for p in pauli_basis_4():
        ideal = u @ p.conj().T @ u.conj().T
        total += float(np.real(np.trace(ideal @ channel(p))))
    return (total + d * d) / (d * d * (d + 1))


def lindblad_channel(
    params: SystemParams,
    tau: float,
    dt_max: float,
    basis: LogicalBasis | None = None,
) -> Callable[[np.ndarray], np.ndarray]:
    """The master-equation channel: embed, evolve to tau, trace, project.

    Evolves each operator input directly (the generator is linear, so
    operator inputs are legitimate even though they are not states).
    """
    basis = basis or LogicalBasis()
    layout = params.layout
    ham = build_h_s(params)
    lindblad = build_lindblad(params)
    n_fock = params.n_fock
    e_pair = basis.pair_isometry
    vac = np.zeros((n_fock, n_fock), dtype=complex)
    vac[0, 0] = 1.0

    def channel(u4: np.ndarray) -> np.ndarray:
        full = np.kron(e_pair @ u4 @ e_pair.conj().T, vac)
        res = evolve_lindblad(
            EvolutionRequest(
                hamiltonian=ham,
                initial=Operator(layout, full),
                t_final=tau,
                step_control=StepControl(dt_max=dt_max),
                sample_times=(tau,),
            )
        )
        rho_q = partial_trace(
            DensityMatrix(layout, res.snapshots[-1].entries, strict=False), (0, 1)
        ).entries
        return basis.project_pair(rho_q)

    return channel


def closed_channel(
    params: SystemParams,
    tau: float,
    dt_max: float,
    basis: LogicalBasis | None = None,
) -> Callable[[np.ndarray], np.ndarray]:
    """Dissipation-free shortcut: four pure-state runs define the channel.

    Identical to :func:`lindblad_channel` at kappa = gamma = 0 (asserted in
    the test suite) and an order of magnitude cheaper.
    """
    if params.kappa != 0 or params.gamma != 0:
        raise ValueError("closed_channel requires kappa = gamma = 0")
    basis = basis or LogicalBasis()
    layout = params.layout
    ham = build_h_s(params)
    vac = np.zeros(params.n_fock, dtype=complex)
    vac[0] = 1.0
    finals = []
    for i in range(4):
        psi0 = StateVector(layout, np.kron(basis.pair_isometry[:, i], vac))
        res = evolve_schrodinger(
            EvolutionRequest(
                hamiltonian=ham,
                initial=psi0,
                t_final=tau,
                step_control=StepControl(dt_max=dt_max),
                sample_times=(tau,),
            )
        )
        finals.append(res.snapshots[-1].amplitudes)
    e_pair = basis.pair_isometry

    def channel(u4: np.ndarray) -> np.ndarray:
        full = np.zeros((layout.total_dim, layout.total_dim), dtype=complex)
        for i in range(4):
            for j in range(4):
                if u4[i, j] != 0:
                    full += u4[i, j] * np.outer(finals[i], finals[j].conj())
        rho_q = partial_trace(DensityMatrix(layout, full, strict=False), (0, 1)).entries
        return e_pair.conj().T @ rho_q @ e_pair

    return channel


# ---------------------------------------------------------------------------
# populations, phases, cavity observables
# ---------------------------------------------------------------------------

@dataclass
class PopulationPhaseReport:
    times: np.ndarray
    populations: dict[str, np.ndarray]   # <s| tr_cav rho |s>
    phases: dict[str, np.ndarray]        # arg<s,0|psi> - arg<ff,0|psi>, unwrapped


def populations_and_phases(result: EvolutionResult) -> PopulationPhaseReport:
    """Computational-state populations and relative phases along a pure run.

    Populations are diagonal elements of the cavity-traced state (so a
    transient cavity displacement does not read as population loss); phases
    reference the |ff> component and are unwrapped in time.
    """
    _require_initial_superposition(result)
    if not all(isinstance(s, StateVector) for s in result.snapshots):
        raise ValueError("phase tracking needs a pure-state evolution")
    kets = computational_kets()
    n_fock = result.layout.factor_dims[2]
    vac = np.zeros(n_fock, dtype=complex)
    vac[0] = 1.0
    full_kets = {s: np.kron(k, vac) for s, k in kets.items()}

    nt = len(result.times)
    pops = {s: np.empty(nt) for s in STATE_ORDER}
    raw_amp = {s: np.empty(nt, dtype=complex) for s in STATE_ORDER}
    for i, snap in enumerate(result.snapshots):
        psi = snap.amplitudes
        rho_q = partial_trace(snap.projector(), (0, 1)).entries
        for s in STATE_ORDER:
            pops[s][i] = float(np.real(kets[s].conj() @ rho_q @ kets[s]))
            raw_amp[s][i] = full_kets[s].conj() @ psi
    ref = np.unwrap(np.angle(raw_amp["ff"]))
    phases = {
        s: np.unwrap(np.angle(raw_amp[s])) - ref for s in STATE_ORDER
    }
    return PopulationPhaseReport(result.times, pops, phases)


def photon_number(result: EvolutionResult) -> np.ndarray:
    """<a^dag a>(t) from the snapshots."""
    if "photon_number" in result.series:
        return result.series["photon_number"].real
    n_op = number_operator(result.layout).entries
    out = np.empty(len(result.times))
    for i, snap in enumerate(result.snapshots):
        if isinstance(snap, StateVector):
            v = snap.amplitudes
            out[i] = float(np.real(np.vdot(v, n_op @ v)))
        else:
            out[i] = float(np.real(np.einsum("ij,ji->", n_op, snap.entries)))
    return out


def phase_space_trajectory(result: EvolutionResult) -> np.ndarray:
    """Points (Re<a>, Im<a>) along the evolution; shape (n_samples, 2)."""
    if "cavity_amp" in result.series:
        amps = result.series["cavity_amp"]
    else:
        a_op = cavity_annihilator(result.layout).entries
        amps = np.empty(len(result.times), dtype=complex)
        for i, snap in enumerate(result.snapshots):
            if isinstance(snap, StateVector):
                v = snap.amplitudes
                amps[i] = np.vdot(v, a_op @ v)
            else:
                amps[i] = np.einsum("ij,ji->", a_op, snap.entries)
    return np.column_stack([amps.real, amps.imag])


def rabi_validity_fidelity(
    params: SystemParams, t_final: float, sample_times: tuple[float, ...], dt_max: float
) -> np.ndarray:
    """|<psi_ideal(t)|psi_exact(t)>|^2 between the exact squeezed-frame model
    and the ideal Rabi model (error term removed), same initial state."""
    layout = params.layout
    psi0 = StateVector(layout, initial_superposition(layout))
    runs = []
    for ham in (build_h_s(params), build_h_rabi(params)):
        runs.append(
            evolve_schrodinger(
                EvolutionRequest(
                    hamiltonian=ham,
                    initial=psi0,
                    t_final=t_final,
                    step_control=StepControl(dt_max=dt_max),
                    sample_times=sample_times,
                )
            )
        )
    exact, ideal = runs
    out = np.empty(len(sample_times))
    for i, (se, si) in enumerate(zip(exact.snapshots, ideal.snapshots)):
        out[i] = float(np.abs(np.vdot(si.amplitudes, se.amplitudes)) ** 2)
    return out


def depolarizing_channel(d: int = 4) -> Callable[[np.ndarray], np.ndarray]:
    """eps(u) = tr(u) I / d; closed-form average fidelity is 1/(d+1)."""

    def channel(u: np.ndarray) -> np.ndarray:
        return np.trace(u) / d * np.eye(d, dtype=complex)

    return channel
