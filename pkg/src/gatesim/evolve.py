"""Deterministic time integration of Schrodinger and Lindblad dynamics.

Fixed-step classical RK4 is the default: the Hilbert space is small (<= a few
hundred dimensions), so determinism and reproducibility win over adaptive
cleverness.  Time-dependent Hamiltonians are evaluated exactly at the RK4
substage times.  An adaptive (step-doubling) mode exists behind
``StepControl.adaptive`` for cross-checks.

The master equation is integrated as

    drho/dt = -i (H_nh rho - rho H_nh^dag) + sum_L  L rho L^dag,
    H_nh    = H(t) - (i/2) sum_L L^dag L,

which folds the anticommutator into a non-Hermitian Hamiltonian applied with
sparse products; the jump terms use the factor-local structure of the collapse
operators where available.  No renormalization is ever applied: norm and trace
drift are reported diagnostics, not corrections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .hilbert import DensityMatrix, Operator, SpaceLayout, StateVector
from .model import (
    CollapseOperator,
    HamiltonianParts,
    LindbladSpec,
    TimeDependentHamiltonian,
)

NORM_DRIFT_LIMIT = 1e-6
TRACE_DRIFT_LIMIT = 1e-7
HERMITICITY_LIMIT = 1e-9
POSITIVITY_FLOOR = -1e-5
TOP_FOCK_LIMIT = 1e-8


@dataclass(frozen=True)
class StepControl:
    dt_max: float
    tolerance: float = 1e-10
    adaptive: bool = False

    def __post_init__(self):
        if self.dt_max <= 0:
            raise ValueError("dt_max must be positive")


@dataclass(frozen=True)
class EvolutionRequest:
    hamiltonian: HamiltonianParts | TimeDependentHamiltonian
    initial: StateVector | DensityMatrix | Operator
    t_final: float
    step_control: StepControl
    sample_times: tuple[float, ...] = ()
    lindblad: LindbladSpec | None = None
    observables: dict[str, Operator] = field(default_factory=dict)

    def resolved_samples(self) -> np.ndarray:
        ts = np.asarray(self.sample_times if self.sample_times else (self.t_final,))
        if np.any(np.diff(ts) < 0) or ts[0] < 0 or ts[-1] > self.t_final + 1e-12:
            raise ValueError("sample_times must be sorted within [0, t_final]")
        return ts.astype(float)


@dataclass
class Diagnostics:
    max_norm_drift: float = 0.0
    max_trace_drift: float = 0.0
    max_hermiticity_drift: float = 0.0
    top_fock_population: float = 0.0
    min_eigenvalue: float = 0.0
    flags: list[str] = field(default_factory=list)

    def flagged(self) -> bool:
        return bool(self.flags)

    def as_dict(self) -> dict:
        return {
            "max_norm_drift": self.max_norm_drift,
            "max_trace_drift": self.max_trace_drift,
            "max_hermiticity_drift": self.max_hermiticity_drift,
            "top_fock_population": self.top_fock_population,
            "min_eigenvalue": self.min_eigenvalue,
            "flags": list(self.flags),
        }


@dataclass
class EvolutionResult:
    layout: SpaceLayout
    times: np.ndarray
    snapshots: list
    series: dict[str, np.ndarray]
    diagnostics: Diagnostics
    initial: StateVector | DensityMatrix | Operator


# ---------------------------------------------------------------------------
# Hamiltonian assembly
# ---------------------------------------------------------------------------

class _VectorHamiltonian:
    """Applies -i H(t) to a ket using dense matvecs."""

    def __init__(self, h):
        if isinstance(h, HamiltonianParts):
            self._static = h.static.entries
            self._terms = ((h.pulse, h.coupling.entries),)
        else:
            self._static = h.static.entries
            self._terms = tuple((c, op.entries) for c, op in h.terms)

    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        out = self._static @ y
        for coeff, mat in self._terms:
            out += coeff(t) * (mat @ y)
        return -1j * out


class _SparseTimeDependent:
    """csr matrix over the union sparsity pattern, refreshed per stage."""

    def __init__(self, static: np.ndarray, terms):
        mats = [static] + [m for _, m in terms]
        mask = np.zeros(static.shape, dtype=bool)
        for m in mats:
            mask |= m != 0
        rows, cols = np.nonzero(mask)  # row-major order matches canonical csr
        n = static.shape[0]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        indptr = np.cumsum(indptr)
        self._data = [m[rows, cols] for m in mats]
        self._coeffs = [c for c, _ in terms]
        self._buf = self._data[0].copy()
        self._matrix = sp.csr_matrix(
            (self._buf, cols.astype(np.int64), indptr), shape=static.shape
        )

    def at(self, t: float) -> sp.csr_matrix:
        np.copyto(self._buf, self._data[0])
        for coeff, data in zip(self._coeffs, self._data[1:]):
            self._buf += coeff(t) * data
        return self._matrix


def _hamiltonian_terms(h):
    if isinstance(h, HamiltonianParts):
        return h.static.entries, [(h.pulse, h.coupling.entries)]
    return h.static.entries, [(c, op.entries) for c, op in h.terms]


# ---------------------------------------------------------------------------
# jump-term appliers
# ---------------------------------------------------------------------------

def _make_jump_applier(c: CollapseOperator, dims: tuple[int, ...]):
    """Return rho -> L rho L^dag, exploiting single-factor structure."""
    if c.factor is not None and c.local is not None:
        local = np.asarray(c.local)
        if np.count_nonzero(local) == 0:
            return lambda rho, out: None
        k = c.factor
        pre = int(np.prod(dims[:k], dtype=int)) if k > 0 else 1
        d = dims[k]
        post = int(np.prod(dims[k + 1:], dtype=int)) if k < len(dims) - 1 else 1
        nz = np.nonzero(local)
        if len(nz[0]) == 1:
            # rank-one local jump |z><e|: a scaled block move
            z, e = int(nz[0][0]), int(nz[1][0])
            w = abs(local[z, e]) ** 2

            def apply_rank1(rho, out):
                r = rho.reshape(pre, d, post, pre, d, post)
                o = out.reshape(pre, d, post, pre, d, post)
                o[:, z, :, :, z, :] += w * r[:, e, :, :, e, :]

            return apply_rank1
        if np.allclose(local, np.diag(np.diag(local, 1), 1)):
            # lowering-type local jump (cavity decay)
            amps = np.diag(local, 1)

            def apply_lowering(rho, out):
                r = rho.reshape(pre, d, post, pre, d, post)
                o = out.reshape(pre, d, post, pre, d, post)
                core = r[:, 1:, :, :, 1:, :]
                o[:, : d - 1, :, :, : d - 1, :] += (
                    core
                    * amps[None, :, None, None, None, None]
                    * amps.conj()[None, None, None, None, :, None]
                )

            return apply_lowering
        # generic single-factor sandwich
        def apply_local(rho, out):
            r = rho.reshape(pre, d, post, pre, d, post)
            t = np.tensordot(local, r, axes=([1], [1]))          # (d,pre,post,pre,d,post)
            t = np.tensordot(t, local.conj(), axes=([4], [1]))   # (d,pre,post,pre,post,d)
            out += np.moveaxis(t, (0, 5), (1, 4)).reshape(out.shape)

        return apply_local

    mat = sp.csr_matrix(c.op.entries)

    def apply_generic(rho, out):
        left = mat @ rho
        out += (mat @ left.conj().T).conj().T

    return apply_generic


# ---------------------------------------------------------------------------
# steppers
# ---------------------------------------------------------------------------

def _rk4_span(rhs, y, t0, t1, dt_max):
    """March y from t0 to t1 with fixed RK4 steps of size <= dt_max."""
    span = t1 - t0
    if span <= 0:
        return y
    n = max(1, math.ceil(span / dt_max - 1e-12))
    dt = span / n
    t = t0
    for _ in range(n):
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * dt, y + (0.5 * dt) * k1)
        k3 = rhs(t + 0.5 * dt, y + (0.5 * dt) * k2)
        k4 = rhs(t + dt, y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += dt
    return y


def _rk4_adaptive_span(rhs, y, t0, t1, dt_max, tol):
    """Step-doubling adaptive RK4 (kept behind a flag; default is fixed-step)."""

    def one_step(y, t, dt):
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * dt, y + (0.5 * dt) * k1)
        k3 = rhs(t + 0.5 * dt, y + (0.5 * dt) * k2)
        k4 = rhs(t + dt, y + dt * k3)
        return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    t = t0
    dt = dt_max
    while t < t1 - 1e-15 * max(1.0, abs(t1)):
        dt = min(dt, t1 - t)
        full = one_step(y, t, dt)
        half = one_step(one_step(y, t, dt / 2), t + dt / 2, dt / 2)
        err = float(np.max(np.abs(full - half)))
        if err <= tol or dt <= 1e-14:
            y = half
            t += dt
            if err > 0:
                dt = min(dt_max, dt * min(2.0, 0.9 * (tol / err) ** 0.2))
            else:
                dt = min(dt_max, 2.0 * dt)
        else:
            dt = max(1e-14, dt * max(0.1, 0.9 * (tol / err) ** 0.2))
    return y


def _march(rhs, y0, samples, ctrl: StepControl):
    """Yield (t, y) at each sample time, integrating segment by segment."""
    y = y0
    t_prev = 0.0
    for t in samples:
        if ctrl.adaptive:
            y = _rk4_adaptive_span(rhs, y, t_prev, t, ctrl.dt_max, ctrl.tolerance)
        else:
            y = _rk4_span(rhs, y, t_prev, t, ctrl.dt_max)
        t_prev = t
        yield t, y


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------

def evolve_schrodinger(req: EvolutionRequest) -> EvolutionResult:
    """Pure-state evolution; norm drift is reported, never corrected."""
    if req.lindblad is not None:
        raise ValueError("evolve_schrodinger does not accept collapse operators")
    if not isinstance(req.initial, StateVector):
        raise ValueError("evolve_schrodinger needs a StateVector initial state")
    if abs(req.initial.norm() - 1.0) > 1e-9:
        raise ValueError("initial state must be normalized")

    layout = req.initial.layout
    ham = _VectorHamiltonian(req.hamiltonian)
    samples = req.resolved_samples()
    obs = {name: op.entries for name, op in req.observables.items()}
    series = {name: np.empty(len(samples), dtype=complex) for name in obs}

    diags = Diagnostics()
    snapshots = []
    for i, (t, y) in enumerate(_march(ham.rhs, req.initial.amplitudes.copy(), samples, req.step_control)):
        snapshots.append(StateVector(layout, y))
        for name, mat in obs.items():
            series[name][i] = np.vdot(y, mat @ y)
        diags.max_norm_drift = max(
            diags.max_norm_drift, abs(float(np.linalg.norm(y)) - 1.0)
        )
        diags.top_fock_population = max(
            diags.top_fock_population, _top_fock_pop_vec(y, layout)
        )

    if diags.max_norm_drift > NORM_DRIFT_LIMIT:
        diags.flags.append(f"norm-drift {diags.max_norm_drift:.3e} > {NORM_DRIFT_LIMIT:g}")
    if diags.top_fock_population > TOP_FOCK_LIMIT:
        diags.flags.append(
            f"top-fock-population {diags.top_fock_population:.3e} > {TOP_FOCK_LIMIT:g}"
        )
    return EvolutionResult(layout, samples, snapshots, series, diags, req.initial)


def evolve_lindblad(req: EvolutionRequest) -> EvolutionResult:
    """Master-equation evolution.

    Accepts a ``DensityMatrix`` or ``StateVector`` (physical mode, with trace,
    Hermiticity and positivity diagnostics) or an arbitrary ``Operator``
    initial condition (tomography mode: the generator is linear, so evolving
    operator inputs is well-defined; physical diagnostics are skipped).
    """
    initial = req.initial
    if isinstance(initial, StateVector):
        rho0 = initial.projector().entries.copy()
        physical = True
        layout = initial.layout
    elif isinstance(initial, DensityMatrix):
        rho0 = initial.entries.copy()
        physical = True
        layout = initial.layout
    elif isinstance(initial, Operator):
        rho0 = initial.entries.copy()
        physical = False
        layout = initial.layout
    else:
        raise ValueError("initial must be StateVector, DensityMatrix or Operator")

    static, terms = _hamiltonian_terms(req.hamiltonian)
    collapse = req.lindblad.collapse if req.lindblad is not None else ()
    h_nh = static.astype(complex).copy()
    for c in collapse:
        mat = c.op.entries
        h_nh -= 0.5j * (mat.conj().T @ mat)
    sparse_h = _SparseTimeDependent(h_nh, terms)
    appliers = [_make_jump_applier(c, layout.factor_dims) for c in collapse]

    def rhs(t, rho):
        m = sparse_h.at(t)
        x = m @ rho
        w = (m @ rho.conj().T).conj().T
        out = -1j * (x - w)
        for apply_jump in appliers:
            apply_jump(rho, out)
        return out

    samples = req.resolved_samples()
    obs = {name: op.entries for name, op in req.observables.items()}
    series = {name: np.empty(len(samples), dtype=complex) for name in obs}
    trace0 = float(np.trace(rho0).real)

    diags = Diagnostics()
    snapshots = []
    rho_final = rho0
    for i, (t, rho) in enumerate(_march(rhs, rho0, samples, req.step_control)):
        snapshots.append(DensityMatrix(layout, rho, strict=False))
        rho_final = rho
        for name, mat in obs.items():
            series[name][i] = np.einsum("ij,ji->", mat, rho)
        if physical:
            diags.max_trace_drift = max(
                diags.max_trace_drift, abs(float(np.trace(rho).real) - trace0)
            )
            diags.max_hermiticity_drift = max(
                diags.max_hermiticity_drift,
                float(np.max(np.abs(rho - rho.conj().T))),
            )
            diags.top_fock_population = max(
                diags.top_fock_population, _top_fock_pop_mat(rho, layout)
            )

    if physical:
        diags.min_eigenvalue = float(
            np.linalg.eigvalsh((rho_final + rho_final.conj().T) / 2)[0]
        )
        if diags.max_trace_drift > TRACE_DRIFT_LIMIT:
            diags.flags.append(
                f"trace-drift {diags.max_trace_drift:.3e} > {TRACE_DRIFT_LIMIT:g}"
            )
        if diags.max_hermiticity_drift > HERMITICITY_LIMIT:
            diags.flags.append(
                f"hermiticity-drift {diags.max_hermiticity_drift:.3e} > {HERMITICITY_LIMIT:g}"
            )
        if diags.min_eigenvalue < POSITIVITY_FLOOR:
            diags.flags.append(
                f"positivity {diags.min_eigenvalue:.3e} < {POSITIVITY_FLOOR:g}"
            )
        if diags.top_fock_population > TOP_FOCK_LIMIT:
            diags.flags.append(
                f"top-fock-population {diags.top_fock_population:.3e} > {TOP_FOCK_LIMIT:g}"
            )
    return EvolutionResult(layout, samples, snapshots, series, diags, req.initial)


def _top_fock_pop_vec(y: np.ndarray, layout: SpaceLayout) -> float:
    n = layout.factor_dims[-1]
    return float(np.sum(np.abs(y.reshape(-1, n)[:, n - 2:]) ** 2))


def _top_fock_pop_mat(rho: np.ndarray, layout: SpaceLayout) -> float:
    n = layout.factor_dims[-1]
    d = np.einsum("ii->i", rho).real.reshape(-1, n)
    return float(np.sum(d[:, n - 2:]))


@dataclass(frozen=True)
class ConvergenceReport:
    refinement: int
    max_state_deviation: float       # entrywise snapshot difference
    max_fidelity_deviation: float    # 1 - |<base|fine>|^2 for pure snapshots
    max_series_deviation: float


def step_convergence_probe(req: EvolutionRequest, refinement: int = 2) -> ConvergenceReport:
    """Rerun with dt/refinement and report the worst snapshot deviation."""
    if refinement < 2:
        raise ValueError("refinement must be >= 2")
    runner = evolve_lindblad if req.lindblad is not None or isinstance(
        req.initial, (DensityMatrix, Operator)
    ) else evolve_schrodinger
    base = runner(req)
    fine_ctrl = StepControl(
        dt_max=req.step_control.dt_max / refinement,
        tolerance=req.step_control.tolerance,
        adaptive=req.step_control.adaptive,
    )
    fine = runner(
        EvolutionRequest(
            hamiltonian=req.hamiltonian,
            initial=req.initial,
            t_final=req.t_final,
            step_control=fine_ctrl,
            sample_times=req.sample_times,
            lindblad=req.lindblad,
            observables=req.observables,
        )
    )
    dev_state = 0.0
    dev_fid = 0.0
    for s_base, s_fine in zip(base.snapshots, fine.snapshots):
        a = getattr(s_base, "amplitudes", None)
        if a is None:
            dev = np.max(np.abs(s_base.entries - s_fine.entries))
            dev_fid = max(dev_fid, float(dev))
        else:
            dev = np.max(np.abs(a - s_fine.amplitudes))
            dev_fid = max(
                dev_fid, abs(1.0 - float(np.abs(np.vdot(a, s_fine.amplitudes)) ** 2))
            )
        dev_state = max(dev_state, float(dev))
    dev_series = 0.0
    for name in base.series:
        dev_series = max(
            dev_series, float(np.max(np.abs(base.series[name] - fine.series[name])))
        )
    return ConvergenceReport(refinement, dev_state, dev_fid, dev_series)
