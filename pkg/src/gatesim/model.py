"""Physical model: parameter records, pulse shapes, Hamiltonians, dissipators.

Two identical qutrits (excited |e>, ground |g> and |f>) couple to one cavity
mode that is parametrically driven.  In the squeezed frame the Hamiltonian is

    H_s = Delta a^dag a
        + sum_j [ (g(t)/2) e^{+r_p} (a + a^dag)(|e><g| + |g><e|)_j
                - (g(t)/2) e^{-r_p} (a^dag - a)(|e><g| - |g><e|)_j
                - (Omega/2)(|e><g| + |g><e|)_j ]

with Delta = Delta_c sech(2 r_p).  The first coupling term is an ideal Rabi
interaction with enhanced strength g_s = g e^{r_p}; the second (suppressed by
e^{-r_p}) is the error term separating the exact model from the ideal one.

Natural units throughout: hbar = 1, the coupling amplitude g_m sets the
frequency scale (g_m = 1 by default) and times are measured in 1/g_m.
Physical-unit conversion lives in :mod:`gatesim.units` only.

Qutrit level order used everywhere: index 0 = |e>, 1 = |g>, 2 = |f>.
Layout order: (qutrit 1, qutrit 2, cavity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .hilbert import Operator, SpaceLayout, annihilator, embed, kron

E, G, F = 0, 1, 2

#: single-qutrit matrices in the (e, g, f) basis
SIGMA_EG = np.zeros((3, 3), dtype=complex)
SIGMA_EG[E, G] = 1.0
SIGMA_X1 = SIGMA_EG + SIGMA_EG.conj().T          # |e><g| + |g><e|
SIGMA_Y1 = SIGMA_EG - SIGMA_EG.conj().T          # |e><g| - |g><e|
PROJ_E = np.diag([1.0, 0.0, 0.0]).astype(complex)

KET_E = np.array([1.0, 0.0, 0.0], dtype=complex)
KET_G = np.array([0.0, 1.0, 0.0], dtype=complex)
KET_F = np.array([0.0, 0.0, 1.0], dtype=complex)
KET_PLUS = (KET_E + KET_G) / math.sqrt(2.0)
KET_MINUS = (KET_E - KET_G) / math.sqrt(2.0)


class ParameterError(ValueError):
    """Rejected input: physically invalid parameter combination."""


@dataclass(frozen=True)
class PulseShape:
    """Coupling envelope g(t): constant g_m, or g_m sin^2(alpha t).

    For sine-squared pulses the gate solver enforces the soft end
    alpha * tau = pi (single-lobe envelope, m = 1).
    """

    kind: str = "constant"
    alpha: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "sine_squared"):
            raise ParameterError(f"unknown pulse kind {self.kind!r}")
        if self.kind == "sine_squared" and self.alpha <= 0:
            raise ParameterError("sine_squared pulse needs alpha > 0")

    def envelope(self, g_m: float) -> Callable[[float], float]:
        if self.kind == "constant":
            return lambda t: g_m
        alpha = self.alpha
        return lambda t: g_m * math.sin(alpha * t) ** 2

    def envelope_array(self, g_m: float, times: np.ndarray) -> np.ndarray:
        if self.kind == "constant":
            return np.full_like(times, g_m, dtype=float)
        return g_m * np.sin(self.alpha * times) ** 2


@dataclass(frozen=True)
class SystemParams:
    """Squeezed-frame simulation parameters (natural units)."""

    g_m: float = 1.0          # coupling amplitude
    r_p: float = 0.0          # squeeze parameter
    delta: float = 1.0        # cavity detuning Delta in the squeezed frame
    omega: float = 0.0        # classical drive amplitude Omega
    delta_q: float = 0.0      # qutrit detuning (kept for frame tests; 0 in gates)
    kappa: float = 0.0        # cavity decay rate
    gamma: float = 0.0        # qutrit relaxation rate (per channel)
    n_fock: int = 15
    pulse: PulseShape = field(default_factory=PulseShape)

    def __post_init__(self):
        if self.g_m <= 0:
            raise ParameterError("g_m must be positive")
        if self.r_p < 0:
            raise ParameterError("r_p must be >= 0")
        if self.kappa < 0 or self.gamma < 0:
            raise ParameterError("decay rates must be >= 0")
        if self.n_fock < 2:
            raise ParameterError("n_fock must be >= 2")

    @property
    def g_s(self) -> float:
        return self.g_m * math.exp(self.r_p)

    @property
    def layout(self) -> SpaceLayout:
        return SpaceLayout((3, 3, self.n_fock))


@dataclass(frozen=True)
class LabFrameParams:
    """Laboratory-frame frequencies, prior to the squeezing transform."""

    omega_a: float            # cavity frequency
    omega_p: float            # parametric (two-photon) drive frequency
    omega: float              # classical drive frequency (= omega_p / 2)
    omega_e: float            # |e> level frequency
    omega_g: float            # |g> level frequency
    Omega_p: float            # parametric drive amplitude
    g: float                  # bare qutrit-cavity coupling
    rabi_amp: float = 0.0     # classical drive amplitude Omega

    @property
    def delta_c(self) -> float:
        return self.omega_a - self.omega_p / 2.0

    @property
    def delta_q(self) -> float:
        return (self.omega_e - self.omega_g) - self.omega_p / 2.0

    @property
    def r_p(self) -> float:
        x = self.Omega_p / self.delta_c
        if not abs(x) < 1.0:
            raise ParameterError(
                f"|Omega_p| = {abs(self.Omega_p):g} must be below |Delta_c| = "
                f"{abs(self.delta_c):g} (arctanh domain)"
            )
        return 0.5 * math.atanh(x)


@dataclass(frozen=True)
class CollapseOperator:
    """A Lindblad operator on the full space, sqrt(rate) included.

    ``factor``/``local`` record the single-factor structure so the evolver can
    apply the jump term by index bookkeeping instead of dense products.
    """

    label: str
    op: Operator
    factor: int | None = None
    local: np.ndarray | None = None


@dataclass(frozen=True)
class LindbladSpec:
    """The five dissipation channels: 4 qutrit relaxations and cavity decay."""

    collapse: tuple[CollapseOperator, ...]

    def operators(self) -> list[Operator]:
        return [c.op for c in self.collapse]


# ---------------------------------------------------------------------------
# operator builders
# ---------------------------------------------------------------------------

def collective_sx(layout: SpaceLayout) -> Operator:
    """S_x = sum_j (|e><g| + |g><e|)_j / 2."""
    return Operator(
        layout,
        0.5 * (embed(layout, 0, SIGMA_X1).entries + embed(layout, 1, SIGMA_X1).entries),
    )


def cavity_annihilator(layout: SpaceLayout) -> Operator:
    return embed(layout, 2, annihilator(layout.factor_dims[2]))


def number_operator(layout: SpaceLayout) -> Operator:
    a = annihilator(layout.factor_dims[2])
    return embed(layout, 2, a.conj().T @ a)


def build_h_lab(p: LabFrameParams, layout: SpaceLayout) -> Operator:
    """Full laboratory-frame Hamiltonian in the rotating observation frame."""
    p.r_p  # raises on arctanh domain violation
    a = annihilator(layout.factor_dims[2])
    n = a.conj().T @ a
    h = p.delta_c * embed(layout, 2, n).entries
    h -= (p.Omega_p / 2.0) * embed(layout, 2, a @ a + a.conj().T @ a.conj().T).entries
    for j in (0, 1):
        h += p.delta_q * embed(layout, j, PROJ_E).entries
        coupling = kron(
            layout,
            _factor_list(layout, {j: SIGMA_EG, 2: a}),
        ).entries
        h += p.g * (coupling + coupling.conj().T)
        h -= (p.rabi_amp / 2.0) * embed(layout, j, SIGMA_X1).entries
    return Operator(layout, h)


def _factor_list(layout: SpaceLayout, parts: dict[int, np.ndarray]) -> list[np.ndarray]:
    ops = [np.eye(d, dtype=complex) for d in layout.factor_dims]
    for k, m in parts.items():
        ops[k] = m
    return ops


@dataclass(frozen=True)
class HamiltonianParts:
    """H(t) = static + g(t) * coupling, with g(t) the pulse envelope.

    The split keeps time stepping cheap: only the coupling term carries the
    pulse envelope, all fast phases stay inside the static part's spectrum.
    """

    layout: SpaceLayout
    static: Operator
    coupling: Operator
    pulse: Callable[[float], float]

    def matrix(self, t: float) -> np.ndarray:
        return self.static.entries + self.pulse(t) * self.coupling.entries

    def operator(self, t: float) -> Operator:
        return Operator(self.layout, self.matrix(t))


def build_h_s(p: SystemParams) -> HamiltonianParts:
    """Exact squeezed-frame Hamiltonian (Rabi + error term + drive)."""
    return _squeezed_parts(p, include_error=True)


def build_h_rabi(p: SystemParams, interaction_picture: bool = False):
    """Ideal Rabi Hamiltonian (squeezed frame minus the error term).

    With ``interaction_picture`` the cavity rotation is absorbed and the
    returned object is a two-term time-dependent model
    g_s(t) S_x (a e^{-i Delta t} + a^dag e^{+i Delta t}) - Omega S_x.
    """
    if not interaction_picture:
        return _squeezed_parts(p, include_error=False)

    layout = p.layout
    sx = collective_sx(layout).entries
    a = cavity_annihilator(layout).entries
    static = Operator(layout, -p.omega * sx)
    sxa = Operator(layout, sx @ a)
    sxad = Operator(layout, sx @ a.conj().T)
    g_env = p.pulse.envelope(p.g_m)
    scale = math.exp(p.r_p)
    delta = p.delta

    def c_lower(t: float) -> complex:
        return scale * g_env(t) * np.exp(-1j * delta * t)

    def c_raise(t: float) -> complex:
        return scale * g_env(t) * np.exp(1j * delta * t)

    return TimeDependentHamiltonian(layout, static, ((c_lower, sxa), (c_raise, sxad)))


@dataclass(frozen=True)
class TimeDependentHamiltonian:
    """H(t) = static + sum_i c_i(t) * term_i with complex coefficients."""

    layout: SpaceLayout
    static: Operator
    terms: tuple[tuple[Callable[[float], complex], Operator], ...]

    def matrix(self, t: float) -> np.ndarray:
        h = self.static.entries.copy()
        for coeff, term in self.terms:
            h = h + coeff(t) * term.entries
        return h

    def operator(self, t: float) -> Operator:
        return Operator(self.layout, self.matrix(t))


def _squeezed_parts(p: SystemParams, include_error: bool) -> HamiltonianParts:
    layout = p.layout
    a = annihilator(p.n_fock)
    n = a.conj().T @ a
    static = p.delta * embed(layout, 2, n).entries
    for j in (0, 1):
        static += p.delta_q * embed(layout, j, PROJ_E).entries
        static -= (p.omega / 2.0) * embed(layout, j, SIGMA_X1).entries

    x_cav = a + a.conj().T
    p_cav = a.conj().T - a
    coupling = np.zeros((layout.total_dim,) * 2, dtype=complex)
    enh = 0.5 * math.exp(p.r_p)
    err = 0.5 * math.exp(-p.r_p)
    for j in (0, 1):
        coupling += enh * kron(layout, _factor_list(layout, {j: SIGMA_X1, 2: x_cav})).entries
        if include_error:
            coupling -= err * kron(layout, _factor_list(layout, {j: SIGMA_Y1, 2: p_cav})).entries

    return HamiltonianParts(
        layout,
        Operator(layout, static),
        Operator(layout, coupling),
        p.pulse.envelope(p.g_m),
    )


def build_h_err(p: SystemParams) -> HamiltonianParts:
    """The error term alone: build_h_s minus build_h_rabi (same pulse)."""
    full = build_h_s(p)
    ideal = _squeezed_parts(p, include_error=False)
    return HamiltonianParts(
        p.layout,
        Operator(p.layout, np.zeros_like(full.static.entries)),
        full.coupling - ideal.coupling,
        full.pulse,
    )


def build_lindblad(p: SystemParams, layout: SpaceLayout | None = None) -> LindbladSpec:
    """Collapse operators L_g1, L_f1, L_g2, L_f2 (rate gamma) and L_a (kappa)."""
    layout = layout or p.layout
    n_fock = layout.factor_dims[2]
    ops: list[CollapseOperator] = []
    sq_gamma = math.sqrt(p.gamma)
    for j in (0, 1):
        for z, name in ((G, "g"), (F, "f")):
            local = np.zeros((3, 3), dtype=complex)
            local[z, E] = sq_gamma
            ops.append(
                CollapseOperator(
                    label=f"L_{name}{j + 1}",
                    op=embed(layout, j, local),
                    factor=j,
                    local=local,
                )
            )
    a_local = math.sqrt(p.kappa) * annihilator(n_fock)
    ops.append(
        CollapseOperator(label="L_a", op=embed(layout, 2, a_local), factor=2, local=a_local)
    )
    return LindbladSpec(tuple(ops))


# ---------------------------------------------------------------------------
# canonical states
# ---------------------------------------------------------------------------

def computational_kets() -> dict[str, np.ndarray]:
    """Two-qutrit computational states ff, f+, +f, ++ (9-dim vectors)."""
    return {
        "ff": np.kron(KET_F, KET_F),
        "f+": np.kron(KET_F, KET_PLUS),
        "+f": np.kron(KET_PLUS, KET_F),
        "++": np.kron(KET_PLUS, KET_PLUS),
    }


def initial_superposition(layout: SpaceLayout) -> np.ndarray:
    """|psi_0> = (|ff> + |f+> + |+f> + |++>)/2 tensor cavity vacuum."""
    kets = computational_kets()
    q = 0.5 * (kets["ff"] + kets["f+"] + kets["+f"] + kets["++"])
    vac = np.zeros(layout.factor_dims[2], dtype=complex)
    vac[0] = 1.0
    return np.kron(q, vac)
