"""Scenario registry and sweep execution: the reproducibility harness.

Each scenario id maps a published-figure-style experiment onto a deterministic
CSV table plus a JSON manifest of resolved parameters and diagnostics:

    fig2    unshaped pi gate: populations, phases, state and average fidelity
    fig3a   mean photon number for the unshaped and shaped (k=1,4,19) gates
    fig3b   cavity phase-space trajectories for the same four gates
    fig4    shaped-gate (k=1, 19) populations, phases and fidelities
    fig5a-d fidelity vs relative control error in tau, Delta, Omega, g_m
    fig6    fidelity at the gate time vs cavity decay and qutrit relaxation
    fig7    physical-units fidelity surface over (t, Delta) for two amplitude
            settings
    fig8    overlap between the exact and ideal-Rabi evolutions vs r_p
    sweep   generic single-parameter sweep driven by the config

Sweep grid points are independent jobs run by a bounded process pool; rows
are ordered by grid index before writing, so output bytes never depend on
worker count.
"""

from __future__ import annotations

import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import metrics
from .design import GateDesign, solve_shaped, solve_unshaped
from .evolve import (
    Diagnostics,
    EvolutionRequest,
    EvolutionResult,
    StepControl,
    evolve_lindblad,
    evolve_schrodinger,
    step_convergence_probe,
)
from .hilbert import StateVector
from .model import SystemParams, build_h_rabi, build_h_s, build_lindblad, initial_superposition
from .output import render_csv, versions
from .units import PhysicalContext, design_report

TWO_PI = 2.0 * math.pi

FIG3_RP = {"k1": 3.28, "k4": 3.78, "k19": 4.49}
FIG5_GATES = ("unshaped", "k1", "k19")
FIG3_GATES = ("unshaped", "k1", "k4", "k19")


class ConfigError(ValueError):
    """Rejected configuration (unknown key, bad range, unsolvable gate)."""


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GateSpec:
    variant: str = "unshaped"
    k1: int = 1
    k2: int = 0
    k3: int = 0
    order: int = 1
    phi: float = math.pi
    r_p: float = 2.5
    g_m: float = 1.0

    def solve(self) -> GateDesign:
        if self.variant == "unshaped":
            return solve_unshaped(self.k1, self.k2, self.k3, self.phi, self.g_m, self.r_p)
        if self.variant == "shaped":
            return solve_shaped(self.order, self.r_p, self.g_m, self.phi)
        raise ConfigError(f"unknown gate variant {self.variant!r}")


@dataclass(frozen=True)
class SweepSpec:
    param: str
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ConfigError("sweep count must be >= 2")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.hi <= self.lo:
            raise ConfigError("sweep range must be finite with hi > lo")

    def grid(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


SWEEP_PARAMS = ("tau", "delta", "omega", "g_m", "kappa", "gamma")


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    out_dir: str | None = None
    units: str = "natural"
    g_m_mhz: float = 50.0
    n_fock: int = 15
    kappa: float = 0.0
    gamma: float = 0.0
    gate: GateSpec | None = None
    sweep: SweepSpec | None = None
    seed: int = 0              # reserved; every current scenario is deterministic
    workers: int | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.units not in ("natural", "physical"):
            raise ConfigError(f"units must be natural|physical, got {self.units!r}")
        if self.scenario not in SCENARIOS:
            raise ConfigError(
                f"unknown scenario {self.scenario!r}; known: {', '.join(sorted(SCENARIOS))}"
            )
        if self.sweep is not None and self.sweep.param not in SWEEP_PARAMS:
            raise ConfigError(
                f"unknown sweep parameter {self.sweep.param!r}; known: {SWEEP_PARAMS}"
            )
        allowed = SCENARIO_OPTIONS.get(self.scenario, set())
        unknown = set(self.options) - allowed
        if unknown:
            raise ConfigError(
                f"unknown option keys for {self.scenario}: {sorted(unknown)}"
            )

    def ctx(self) -> PhysicalContext | None:
        if self.units == "physical" or self.scenario == "fig7":
            return PhysicalContext(self.g_m_mhz)
        return None


def _dataclass_from_dict(cls, data: dict, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must be an object")
    fields = {f.name for f in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
    unknown = set(data) - fields
    if unknown:
        raise ConfigError(f"unknown keys under {path}: {sorted(unknown)}")
    return data


def config_from_dict(data: dict) -> ScenarioConfig:
    """Strict config ingestion: any unknown key is rejected."""
    data = dict(_dataclass_from_dict(ScenarioConfig, data, "config"))
    if data.get("gate") is not None:
        gd = _dataclass_from_dict(GateSpec, data["gate"], "config.gate")
        data["gate"] = GateSpec(**gd)
    if data.get("sweep") is not None:
        sd = _dataclass_from_dict(SweepSpec, data["sweep"], "config.sweep")
        data["sweep"] = SweepSpec(**sd)
    if "scenario" not in data:
        raise ConfigError("config needs a 'scenario' key")
    try:
        return ScenarioConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# shared machinery
# ---------------------------------------------------------------------------

def standard_design(name: str, g_m: float = 1.0) -> GateDesign:
    """The recurring gates: unshaped at r_p=2.5, shaped k=1/4/19 at the
    squeeze values that align their gate times with the unshaped one."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", category=UserWarning)
        if name == "unshaped":
            return solve_unshaped(1, 0, 0, math.pi, g_m=g_m, r_p=2.5)
        if name in FIG3_RP:
            return solve_shaped(int(name[1:]), FIG3_RP[name], g_m=g_m)
    raise ConfigError(f"unknown standard gate {name!r}")


def params_step(params: SystemParams, points_per_cycle: int = 200) -> float:
    dt = TWO_PI / abs(params.delta) / points_per_cycle
    if params.pulse.kind == "sine_squared":
        dt = min(dt, math.pi / params.pulse.alpha / points_per_cycle)
    return dt


def apply_error(
    design: GateDesign, which: str, rel: float, n_fock: int = 15,
    kappa: float = 0.0, gamma: float = 0.0,
) -> tuple[SystemParams, float]:
    """Perturbed run inputs for a relative control error ``rel`` on ``which``.

    Timing errors move only the measurement time; parameter errors rerun the
    dynamics with the perturbed value while the nominal gate time and the
    ideal target stay fixed.
    """
    measure_at = design.tau
    params = design.to_system_params(kappa=kappa, gamma=gamma, n_fock=n_fock)
    if which == "tau":
        measure_at = design.tau * (1.0 + rel)
    elif which == "delta":
        if abs(rel) >= 1.0:
            raise ConfigError("relative detuning errors must satisfy |rel| < 1")
        params = SystemParams(
            **{**_params_dict(params), "delta": params.delta * (1.0 + rel)}
        )
    elif which == "omega":
        params = SystemParams(
            **{**_params_dict(params), "omega": params.omega * (1.0 + rel)}
        )
    elif which == "g_m":
        params = SystemParams(
            **{**_params_dict(params), "g_m": params.g_m * (1.0 + rel)}
        )
    else:
        raise ConfigError(f"unknown error parameter {which!r}")
    return params, measure_at


def _params_dict(p: SystemParams) -> dict:
    return {
        "g_m": p.g_m, "r_p": p.r_p, "delta": p.delta, "omega": p.omega,
        "delta_q": p.delta_q, "kappa": p.kappa, "gamma": p.gamma,
        "n_fock": p.n_fock, "pulse": p.pulse,
    }


def run_gate(
    params: SystemParams,
    sample_times: tuple[float, ...],
    *,
    ideal: bool = False,
    initial: str = "psi0",
    lindblad: bool | None = None,
    points_per_cycle: int = 200,
) -> EvolutionResult:
    """One gate evolution in the squeezed frame.

    ``ideal`` drops the error term (designed Rabi dynamics); ``initial``
    selects the equal superposition or the |++> branch; dissipation switches
    the integrator to the master equation.
    """
    layout = params.layout
    if initial == "psi0":
        psi0 = StateVector(layout, initial_superposition(layout))
    elif initial == "++":
        from .model import KET_PLUS

        vac = np.zeros(params.n_fock, dtype=complex)
        vac[0] = 1.0
        psi0 = StateVector(layout, np.kron(np.kron(KET_PLUS, KET_PLUS), vac))
    else:
        raise ConfigError(f"unknown initial state {initial!r}")
    ham = build_h_rabi(params) if ideal else build_h_s(params)
    ctrl = StepControl(dt_max=params_step(params, points_per_cycle))
    use_lindblad = lindblad if lindblad is not None else (params.kappa > 0 or params.gamma > 0)
    req = EvolutionRequest(
        hamiltonian=ham,
        initial=psi0,
        t_final=float(sample_times[-1]),
        step_control=ctrl,
        sample_times=tuple(float(t) for t in sample_times),
        lindblad=build_lindblad(params) if use_lindblad else None,
    )
    return evolve_lindblad(req) if use_lindblad else evolve_schrodinger(req)


def _merge_diag(total: Diagnostics, part: Diagnostics, context: str):
    total.max_norm_drift = max(total.max_norm_drift, part.max_norm_drift)
    total.max_trace_drift = max(total.max_trace_drift, part.max_trace_drift)
    total.max_hermiticity_drift = max(
        total.max_hermiticity_drift, part.max_hermiticity_drift
    )
    total.top_fock_population = max(total.top_fock_population, part.top_fock_population)
    total.min_eigenvalue = min(total.min_eigenvalue, part.min_eigenvalue)
    total.flags.extend(f"{context}: {f}" for f in part.flags)


def _fidelity_series_closed(result: EvolutionResult, design: GateDesign, finals_runs) -> np.ndarray:
    """Average-fidelity series from four pure basis-state runs (kappa=gamma=0)."""
    basis = metrics.LogicalBasis()
    e_pair = basis.pair_isometry
    u = metrics.logical_gate_matrix(design).entries
    paulis = metrics.pauli_basis_4()
    ideals = [u @ p.conj().T @ u.conj().T for p in paulis]
    n_fock = result.layout.factor_dims[2]
    nt = len(result.times)
    out = np.empty(nt)
    for it in range(nt):
        vs = [run.snapshots[it].amplitudes.reshape(9, n_fock) for run in finals_runs]
        blocks = np.empty((4, 4, 4, 4), dtype=complex)  # [i,j] -> projected 4x4
        for i in range(4):
            for j in range(4):
                b9 = vs[i] @ vs[j].conj().T
                blocks[i, j] = e_pair.conj().T @ b9 @ e_pair
        total = 0.0
        for p, ideal in zip(paulis, ideals):
            eps = np.tensordot(p, blocks, axes=([0, 1], [0, 1]))
            total += float(np.real(np.trace(ideal @ eps)))
        out[it] = (total + 16.0) / 80.0
    return out


def _basis_state_runs(params: SystemParams, sample_times) -> list[EvolutionResult]:
    basis = metrics.LogicalBasis()
    layout = params.layout
    vac = np.zeros(params.n_fock, dtype=complex)
    vac[0] = 1.0
    ham = build_h_s(params)
    runs = []
    for i in range(4):
        psi0 = StateVector(layout, np.kron(basis.pair_isometry[:, i], vac))
        runs.append(
            evolve_schrodinger(
                EvolutionRequest(
                    hamiltonian=ham,
                    initial=psi0,
                    t_final=float(sample_times[-1]),
                    step_control=StepControl(dt_max=params_step(params)),
                    sample_times=tuple(float(t) for t in sample_times),
                )
            )
        )
    return runs


# ---------------------------------------------------------------------------
# sweep worker (module-level for the process pool)
# ---------------------------------------------------------------------------

def _error_point_task(task) -> tuple[int, float, list[str]]:
    (idx, design, which, rel, n_fock, kappa, gamma) = task
    params, measure_at = apply_error(design, which, rel, n_fock, kappa, gamma)
    res = run_gate(params, (measure_at,))
    f = metrics.state_fidelity(res, design)[-1]
    return idx, float(f), [f"{which}={rel:g}: {fl}" for fl in res.diagnostics.flags]


def _rate_point_task(task) -> tuple[int, float, list[str]]:
    (idx, design, rate_name, rate, n_fock) = task
    kappa = rate if rate_name == "kappa" else 0.0
    gamma = rate if rate_name == "gamma" else 0.0
    params = design.to_system_params(kappa=kappa, gamma=gamma, n_fock=n_fock)
    res = run_gate(params, (design.tau,), lindblad=True)
    f = metrics.state_fidelity(res, design)[-1]
    return idx, float(f), [f"{rate_name}={rate:g}: {fl}" for fl in res.diagnostics.flags]


def _run_pool(tasks, worker, n_workers: int | None):
    n_workers = n_workers if n_workers is not None else (os.cpu_count() or 1)
    if n_workers <= 1 or len(tasks) <= 1:
        results = [worker(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(worker, tasks))
    return sorted(results, key=lambda r: r[0])


# ---------------------------------------------------------------------------
# scenario runners
# ---------------------------------------------------------------------------

@dataclass
class ScenarioOutput:
    scenario: str
    columns: list[str]
    rows: list[list]
    designs: dict[str, GateDesign]
    diagnostics: Diagnostics
    warnings: list[str]
    manifest_extra: dict = field(default_factory=dict)

    def flagged(self) -> bool:
        return self.diagnostics.flagged()


def _time_scale(cfg: ScenarioConfig):
    ctx = cfg.ctx()
    if ctx is not None:
        return ctx.time_to_ns, "time_ns"
    return (lambda t: t), "time"


def _run_fig2(cfg: ScenarioConfig) -> ScenarioOutput:
    design = standard_design("unshaped")
    params = design.to_system_params(kappa=cfg.kappa, gamma=cfg.gamma, n_fock=cfg.n_fock)
    n_samples = int(cfg.options.get("time_samples", 81))
    ts = np.linspace(0.0, design.tau, n_samples)
    diag = Diagnostics()

    res = run_gate(params, tuple(ts))
    _merge_diag(diag, res.diagnostics, "fig2")
    fid = metrics.state_fidelity(res, design)
    rep = metrics.populations_and_phases(res)
    basis_runs = _basis_state_runs(params, tuple(ts))
    for i, r in enumerate(basis_runs):
        _merge_diag(diag, r.diagnostics, f"fig2 basis{i}")
    fbar = _fidelity_series_closed(res, design, basis_runs)

    scale, tname = _time_scale(cfg)
    columns = [
        tname, "pop_ff", "pop_fp", "pop_pf", "pop_pp",
        "phase_ff", "phase_fp", "phase_pf", "phase_pp",
        "fidelity", "avg_fidelity",
    ]
    rows = []
    for i, t in enumerate(ts):
        rows.append(
            [scale(t)]
            + [rep.populations[s][i] for s in metrics.STATE_ORDER]
            + [rep.phases[s][i] for s in metrics.STATE_ORDER]
            + [fid[i], fbar[i]]
        )
    return ScenarioOutput("fig2", columns, rows, {"unshaped": design}, diag, [])


def _run_fig3(cfg: ScenarioConfig, which: str) -> ScenarioOutput:
    n_samples = int(cfg.options.get("time_samples", 161))
    diag = Diagnostics()
    columns: list[str] = []
    series: list[np.ndarray] = []
    designs = {}
    scale, tname = _time_scale(cfg)
    branch = cfg.options.get("branch", "++")
    for name in FIG3_GATES:
        design = standard_design(name)
        designs[name] = design
        params = design.to_system_params(n_fock=cfg.n_fock)
        ts = np.linspace(0.0, design.tau, n_samples)
        if which == "a":
            res = run_gate(params, tuple(ts))
            vals = metrics.photon_number(res)
            _merge_diag(diag, res.diagnostics, f"fig3a {name}")
            columns += [f"{tname}_{name}", f"n_{name}"]
            series += [np.vectorize(scale)(ts), vals]
        else:
            # designed (ideal-Rabi) trajectories: the closure invariant needs
            # integration error well below the 1e-6 closure tolerance
            ppc = int(cfg.options.get("points_per_cycle", 800))
            res = run_gate(params, tuple(ts), ideal=True, initial=branch, points_per_cycle=ppc)
            traj = metrics.phase_space_trajectory(res)
            _merge_diag(diag, res.diagnostics, f"fig3b {name}")
            columns += [f"{tname}_{name}", f"x_{name}", f"p_{name}"]
            series += [np.vectorize(scale)(ts), traj[:, 0], traj[:, 1]]
    rows = [[s[i] for s in series] for i in range(n_samples)]
    return ScenarioOutput(f"fig3{which}", columns, rows, designs, diag, [])


def _run_fig4(cfg: ScenarioConfig) -> ScenarioOutput:
    n_samples = int(cfg.options.get("time_samples", 81))
    diag = Diagnostics()
    columns: list[str] = []
    series: list[np.ndarray] = []
    designs = {}
    scale, tname = _time_scale(cfg)
    for name in ("k1", "k19"):
        design = standard_design(name)
        designs[name] = design
        params = design.to_system_params(n_fock=cfg.n_fock)
        ts = np.linspace(0.0, design.tau, n_samples)
        res = run_gate(params, tuple(ts))
        _merge_diag(diag, res.diagnostics, f"fig4 {name}")
        fid = metrics.state_fidelity(res, design)
        rep = metrics.populations_and_phases(res)
        basis_runs = _basis_state_runs(params, tuple(ts))
        fbar = _fidelity_series_closed(res, design, basis_runs)
        columns += (
            [f"{tname}_{name}"]
            + [f"pop_{s}_{name}" for s in ("ff", "fp", "pf", "pp")]
            + [f"phase_{s}_{name}" for s in ("ff", "fp", "pf", "pp")]
            + [f"fidelity_{name}", f"avg_fidelity_{name}"]
        )
        series += (
            [np.vectorize(scale)(ts)]
            + [rep.populations[s] for s in metrics.STATE_ORDER]
            + [rep.phases[s] for s in metrics.STATE_ORDER]
            + [fid, fbar]
        )
    rows = [[s[i] for s in series] for i in range(n_samples)]
    return ScenarioOutput("fig4", columns, rows, designs, diag, [])


FIG5_PARAM = {"fig5a": "tau", "fig5b": "delta", "fig5c": "omega", "fig5d": "g_m"}


def _run_fig5(cfg: ScenarioConfig, scenario: str) -> ScenarioOutput:
    which = FIG5_PARAM[scenario]
    sweep = cfg.sweep or SweepSpec(param=which, lo=-0.1, hi=0.1, count=41)
    if sweep.param != which:
        raise ConfigError(f"{scenario} sweeps {which!r}, config says {sweep.param!r}")
    grid = sweep.grid()
    diag = Diagnostics()
    designs = {name: standard_design(name) for name in FIG5_GATES}
    cols = [f"delta_{which}"] + [f"fidelity_{name}" for name in FIG5_GATES]
    table = {name: np.empty(len(grid)) for name in FIG5_GATES}
    for name in FIG5_GATES:
        design = designs[name]
        if which == "tau":
            # timing error: a single run sampled at the perturbed readout times
            params = design.to_system_params(n_fock=cfg.n_fock)
            ts = design.tau * (1.0 + grid)
            res = run_gate(params, tuple(ts))
            _merge_diag(diag, res.diagnostics, f"{scenario} {name}")
            table[name][:] = metrics.state_fidelity(res, design)
        else:
            tasks = [
                (i, design, which, float(rel), cfg.n_fock, cfg.kappa, cfg.gamma)
                for i, rel in enumerate(grid)
            ]
            for idx, f, flags in _run_pool(tasks, _error_point_task, cfg.workers):
                table[name][idx] = f
                diag.flags.extend(f"{scenario} {name} {fl}" for fl in flags)
    rows = [[grid[i]] + [table[name][i] for name in FIG5_GATES] for i in range(len(grid))]
    return ScenarioOutput(scenario, cols, rows, designs, diag, [])


def _run_fig6(cfg: ScenarioConfig) -> ScenarioOutput:
    sweep = cfg.sweep or SweepSpec(param="kappa", lo=0.0, hi=0.1, count=41)
    grid = sweep.grid()
    diag = Diagnostics()
    designs = {name: standard_design(name) for name in FIG5_GATES}
    table: dict[tuple[str, str], np.ndarray] = {}
    for rate_name in ("kappa", "gamma"):
        for name in FIG5_GATES:
            tasks = [
                (i, designs[name], rate_name, float(r), cfg.n_fock)
                for i, r in enumerate(grid)
            ]
            vals = np.empty(len(grid))
            for idx, f, flags in _run_pool(tasks, _rate_point_task, cfg.workers):
                vals[idx] = f
                diag.flags.extend(f"fig6 {name} {fl}" for fl in flags)
            table[(rate_name, name)] = vals
    cols = ["rate"] + [
        f"fidelity_{name}_{rate}" for rate in ("kappa", "gamma") for name in FIG5_GATES
    ]
    rows = [
        [grid[i]]
        + [table[(rate, name)][i] for rate in ("kappa", "gamma") for name in FIG5_GATES]
        for i in range(len(grid))
    ]
    return ScenarioOutput("fig6", cols, rows, designs, diag, [])


def _run_fig7(cfg: ScenarioConfig) -> ScenarioOutput:
    ctx = PhysicalContext(cfg.g_m_mhz)
    design = solve_shaped(1, float(cfg.options.get("r_p", 2.5)), g_m=1.0)
    tau_ns = ctx.time_to_ns(design.tau)
    delta_mhz = ctx.freq_to_mhz(design.delta)
    spread = float(cfg.options.get("grid_spread", 0.03))
    count = int(cfg.options.get("grid_count", 7))
    t_points = cfg.options.get(
        "t_points_ns", list(np.linspace((1 - spread) * tau_ns, (1 + spread) * tau_ns, count))
    )
    d_points = cfg.options.get(
        "delta_points_mhz",
        list(np.linspace((1 - spread) * delta_mhz, (1 + spread) * delta_mhz, count)),
    )
    kappa = ctx.freq_from_mhz(float(cfg.options.get("kappa_mhz", 0.5)))
    gamma = ctx.freq_from_mhz(float(cfg.options.get("gamma_mhz", 0.5)))
    surface2 = cfg.options.get("surface2", {"g_m_mhz": 50.5, "omega_mhz": -140.4})
    surfaces = {
        "S.I": {"g_m": 1.0, "omega": design.omega},
        "S.II": {
            "g_m": float(surface2["g_m_mhz"]) / cfg.g_m_mhz,
            "omega": float(surface2["omega_mhz"]) / cfg.g_m_mhz,
        },
    }

    diag = Diagnostics()
    rows = []
    for tag, over in surfaces.items():
        for d_mhz in d_points:
            params = SystemParams(
                g_m=over["g_m"],
                r_p=design.r_p,
                delta=ctx.freq_from_mhz(float(d_mhz)),
                omega=over["omega"],
                kappa=kappa,
                gamma=gamma,
                n_fock=cfg.n_fock,
                pulse=design.pulse,
            )
            ts = tuple(sorted(ctx.time_from_ns(float(t)) for t in t_points))
            res = run_gate(params, ts, lindblad=True)
            _merge_diag(diag, res.diagnostics, f"fig7 {tag} delta={d_mhz:g}")
            fid = metrics.state_fidelity(res, design)
            for t_nat, f in zip(ts, fid):
                rows.append([tag, ctx.time_to_ns(t_nat), float(d_mhz), float(f)])
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    cols = ["surface", "time_ns", "delta_mhz", "fidelity"]
    extra = {"kappa_mhz": ctx.freq_to_mhz(kappa), "gamma_mhz": ctx.freq_to_mhz(gamma)}
    return ScenarioOutput("fig7", cols, rows, {"k1_physical": design}, diag, [], extra)


def _run_fig8(cfg: ScenarioConfig) -> ScenarioOutput:
    r_ps = [float(r) for r in cfg.options.get("r_p_values", (1.0, 1.5, 2.0, 2.5))]
    periods = float(cfg.options.get("periods", 3.0))
    n_samples = int(cfg.options.get("time_samples", 181))
    diag = Diagnostics()
    columns: list[str] = []
    series: list[np.ndarray] = []
    scale, tname = _time_scale(cfg)
    for r_p in r_ps:
        delta = math.exp(r_p)  # g_m = 1: Delta = g e^{r_p}, Omega = -Delta/2
        params = SystemParams(g_m=1.0, r_p=r_p, delta=delta, omega=-delta / 2.0, n_fock=cfg.n_fock)
        tau = TWO_PI / delta
        ts = np.linspace(0.0, periods * tau, n_samples)
        overlap = metrics.rabi_validity_fidelity(
            params, float(ts[-1]), tuple(ts), params_step(params)
        )
        label = ("%g" % r_p).replace(".", "_")
        columns += [f"{tname}_rp{label}", f"overlap_rp{label}"]
        series += [np.vectorize(scale)(ts), overlap]
    rows = [[s[i] for s in series] for i in range(n_samples)]
    return ScenarioOutput("fig8", columns, rows, {}, diag, [])


def _run_sweep(cfg: ScenarioConfig) -> ScenarioOutput:
    if cfg.sweep is None:
        raise ConfigError("the sweep scenario needs a sweep spec")
    spec = cfg.sweep
    gate = cfg.gate or GateSpec()
    design = gate.solve()
    grid = spec.grid()
    diag = Diagnostics()
    vals = np.empty(len(grid))
    if spec.param in ("kappa", "gamma"):
        tasks = [(i, design, spec.param, float(r), cfg.n_fock) for i, r in enumerate(grid)]
        worker = _rate_point_task
    else:
        tasks = [
            (i, design, spec.param, float(r), cfg.n_fock, cfg.kappa, cfg.gamma)
            for i, r in enumerate(grid)
        ]
        worker = _error_point_task
    for idx, f, flags in _run_pool(tasks, worker, cfg.workers):
        vals[idx] = f
        diag.flags.extend(f"sweep {fl}" for fl in flags)
    cols = [spec.param, "fidelity"]
    rows = [[grid[i], vals[i]] for i in range(len(grid))]
    return ScenarioOutput("sweep", cols, rows, {"gate": design}, diag, [])


SCENARIOS = {
    "fig2": _run_fig2,
    "fig3a": lambda cfg: _run_fig3(cfg, "a"),
    "fig3b": lambda cfg: _run_fig3(cfg, "b"),
    "fig4": _run_fig4,
    "fig5a": lambda cfg: _run_fig5(cfg, "fig5a"),
    "fig5b": lambda cfg: _run_fig5(cfg, "fig5b"),
    "fig5c": lambda cfg: _run_fig5(cfg, "fig5c"),
    "fig5d": lambda cfg: _run_fig5(cfg, "fig5d"),
    "fig6": _run_fig6,
    "fig7": _run_fig7,
    "fig8": _run_fig8,
    "sweep": _run_sweep,
}

SCENARIO_OPTIONS = {
    "fig2": {"time_samples"},
    "fig3a": {"time_samples", "branch"},
    "fig3b": {"time_samples", "branch", "points_per_cycle"},
    "fig4": {"time_samples"},
    "fig7": {
        "r_p", "grid_spread", "grid_count", "t_points_ns", "delta_points_mhz",
        "kappa_mhz", "gamma_mhz", "surface2",
    },
    "fig8": {"r_p_values", "periods", "time_samples"},
}


@dataclass
class ScenarioResult:
    scenario: str
    csv_text: str
    manifest: dict
    flagged: bool
    warnings: list[str]


def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    """Execute a scenario, returning CSV text and the manifest document."""
    runner = SCENARIOS[cfg.scenario]
    started = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        out: ScenarioOutput = runner(cfg)
    warn_msgs = out.warnings + [str(w.message) for w in caught]
    csv_text = render_csv(out.columns, out.rows)
    ctx = cfg.ctx()
    manifest = {
        "scenario": cfg.scenario,
        "config": asdict(cfg),
        "designs": {name: design_report(d, ctx) for name, d in out.designs.items()},
        "diagnostics": out.diagnostics.as_dict(),
        "warnings": warn_msgs,
        "versions": versions(),
        "runtime_s": time.perf_counter() - started,
    }
    manifest.update(out.manifest_extra)
    return ScenarioResult(cfg.scenario, csv_text, manifest, out.flagged(), warn_msgs)


# ---------------------------------------------------------------------------
# convergence probe and manifest validation
# ---------------------------------------------------------------------------

def run_convergence(cfg: ScenarioConfig, refinement: int = 2, fock_doubling: bool = True) -> dict:
    """Step-halving and Fock-doubling report for a scenario's base gate run."""
    gate = cfg.gate or GateSpec()
    design = gate.solve() if cfg.gate is not None else _scenario_gate(cfg.scenario)
    params = design.to_system_params(kappa=cfg.kappa, gamma=cfg.gamma, n_fock=cfg.n_fock)
    layout = params.layout
    psi0 = StateVector(layout, initial_superposition(layout))
    use_lindblad = params.kappa > 0 or params.gamma > 0
    req = EvolutionRequest(
        hamiltonian=build_h_s(params),
        initial=psi0,
        t_final=design.tau,
        step_control=StepControl(dt_max=params_step(params)),
        sample_times=(design.tau,),
        lindblad=build_lindblad(params) if use_lindblad else None,
    )
    probe = step_convergence_probe(req, refinement)
    report = {
        "scenario": cfg.scenario,
        "refinement": refinement,
        "max_state_deviation": probe.max_state_deviation,
        "flags": [],
    }
    if fock_doubling:
        f_base = metrics.state_fidelity(run_gate(params, (design.tau,)), design)[-1]
        params2 = SystemParams(**{**_params_dict(params), "n_fock": 2 * cfg.n_fock})
        f_fine = metrics.state_fidelity(run_gate(params2, (design.tau,)), design)[-1]
        report["fock_base"] = cfg.n_fock
        report["fidelity_delta_on_fock_doubling"] = abs(float(f_base - f_fine))
        if report["fidelity_delta_on_fock_doubling"] >= 1e-6:
            report["flags"].append(
                "fock-convergence: doubling n_fock moved the fidelity by "
                f"{report['fidelity_delta_on_fock_doubling']:.3e} (>= 1e-6)"
            )
    return report


def _scenario_gate(scenario: str) -> GateDesign:
    if scenario in ("fig2", "fig5a", "fig5b", "fig5c", "fig5d", "fig6"):
        return standard_design("unshaped")
    if scenario in ("fig3a", "fig3b", "fig4"):
        return standard_design("k1")
    if scenario == "fig7":
        return solve_shaped(1, 2.5, g_m=1.0)
    return standard_design("unshaped")


def validate_manifest(manifest: dict) -> list[str]:
    """Re-validate recorded designs against the gate invariants."""
    problems = []
    for name, rep in manifest.get("designs", {}).items():
        kwargs = {
            "variant": rep["variant"], "phi": rep["phi"], "g_m": rep["g_m"],
            "r_p": rep["r_p"], "delta": rep["delta"], "omega": rep["omega"],
            "tau": rep["tau"],
        }
        if rep["variant"] == "unshaped":
            kwargs.update({"k1": rep["k1"], "k2": rep["k2"], "k3": rep["k3"]})
        else:
            kwargs.update({"order": rep["order"], "alpha": rep["alpha"]})
        try:
            GateDesign(**kwargs).validate()
        except Exception as exc:  # noqa: BLE001 - report, don't crash
            problems.append(f"{name}: {exc}")
    return problems
