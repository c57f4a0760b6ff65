"""Dense complex linear algebra over tensor-product Hilbert spaces.

Everything in the simulator lives on a product space qutrit (x) qutrit (x)
truncated Fock, described by a ``SpaceLayout``.  Operators and states carry
their layout so that factor-wise operations (embedding, partial trace) never
need dimension bookkeeping at the call site.

Values are immutable after construction (the underlying numpy buffers are
marked read-only), so they can be shared freely between sweep workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

import numpy as np
import scipy.linalg


class DimensionError(ValueError):
    """Rejected input: operator/state dimensions do not match the layout."""


@dataclass(frozen=True)
class SpaceLayout:
    """Ordered list of tensor-factor dimensions, e.g. (3, 3, n_fock)."""

    factor_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        if len(dims) == 0:
            raise DimensionError("layout needs at least one factor")
        if any(d < 2 for d in dims):
            raise DimensionError(f"factor dimensions must be >= 2, got {dims}")
        object.__setattr__(self, "factor_dims", dims)

    @property
    def total_dim(self) -> int:
        return prod(self.factor_dims)

    @property
    def n_factors(self) -> int:
        return len(self.factor_dims)

    def basis_index(self, levels: tuple[int, ...]) -> int:
        """Flat index of the product basis state |levels[0], levels[1], ...>."""
        if len(levels) != self.n_factors:
            raise DimensionError("one level per factor required")
        idx = 0
        for lv, d in zip(levels, self.factor_dims):
            if not 0 <= lv < d:
                raise DimensionError(f"level {lv} out of range for dim {d}")
            idx = idx * d + lv
        return idx


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=complex)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Operator:
    """Square complex matrix on a layout.  Not necessarily Hermitian."""

    layout: SpaceLayout
    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        n = self.layout.total_dim
        if m.shape != (n, n):
            raise DimensionError(f"expected {n}x{n} matrix, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator entries must be finite")
        object.__setattr__(self, "entries", _readonly(m))

    def dag(self) -> "Operator":
        return Operator(self.layout, self.entries.conj().T)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.entries - self.entries.conj().T)) <= tol)

    def __add__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.layout, self.entries + other.entries)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.layout, self.entries - other.entries)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.layout, self.entries * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.layout, self.entries @ other.entries)

    def _check(self, other: "Operator"):
        if other.layout != self.layout:
            raise DimensionError("operator layouts do not match")


@dataclass(frozen=True)
class StateVector:
    """Pure state on a layout; unit norm is the caller's responsibility."""

    layout: SpaceLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if v.shape != (self.layout.total_dim,):
            raise DimensionError(
                f"expected length-{self.layout.total_dim} vector, got {v.shape}"
            )
        object.__setattr__(self, "amplitudes", _readonly(v))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        return StateVector(self.layout, self.amplitudes / self.norm())

    def projector(self) -> "DensityMatrix":
        v = self.amplitudes
        return DensityMatrix(self.layout, np.outer(v, v.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Mixed state on a layout.

    ``strict`` construction checks Hermiticity; trace and positivity are
    evolution-time diagnostics, not construction invariants (the Lindblad
    channel is also fed non-Hermitian operator inputs for tomography, which
    bypass this type).
    """

    layout: SpaceLayout
    entries: np.ndarray
    strict: bool = field(default=True, compare=False)

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        n = self.layout.total_dim
        if m.shape != (n, n):
            raise DimensionError(f"expected {n}x{n} matrix, got {m.shape}")
        if self.strict and np.max(np.abs(m - m.conj().T)) > 1e-9:
            raise ValueError("density matrix is not Hermitian within 1e-9")
        object.__setattr__(self, "entries", _readonly(m))

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh((self.entries + self.entries.conj().T) / 2)[0])


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def identity(layout: SpaceLayout) -> Operator:
    return Operator(layout, np.eye(layout.total_dim, dtype=complex))


def kron(layout: SpaceLayout, factor_ops: list[np.ndarray]) -> Operator:
    """Tensor product of one single-factor matrix per layout entry."""
    if len(factor_ops) != layout.n_factors:
        raise DimensionError(
            f"need {layout.n_factors} factor operators, got {len(factor_ops)}"
        )
    out = np.array([[1.0 + 0.0j]])
    for op, d in zip(factor_ops, layout.factor_dims):
        m = np.asarray(op, dtype=complex)
        if m.shape != (d, d):
            raise DimensionError(f"factor operator shape {m.shape} != ({d},{d})")
        out = np.kron(out, m)
    return Operator(layout, out)


def embed(layout: SpaceLayout, factor: int, local_op: np.ndarray) -> Operator:
    """Single-factor operator extended by identities on the other factors."""
    ops = [np.eye(d, dtype=complex) for d in layout.factor_dims]
    ops[factor] = np.asarray(local_op, dtype=complex)
    return kron(layout, ops)


def annihilator(n_fock: int) -> np.ndarray:
    """Truncated lowering operator: a|n> = sqrt(n)|n-1>.

    On the truncated space a^dag a still has eigenvalue n for every n < n_fock;
    only the commutator [a, a^dag] picks up a truncation defect in the
    (n_fock-1, n_fock-1) corner.
    """
    if n_fock < 2:
        raise DimensionError("Fock cutoff must be >= 2")
    a = np.zeros((n_fock, n_fock), dtype=complex)
    ns = np.arange(1, n_fock)
    a[ns - 1, ns] = np.sqrt(ns)
    return a


def basis_state(layout: SpaceLayout, levels: tuple[int, ...]) -> StateVector:
    v = np.zeros(layout.total_dim, dtype=complex)
    v[layout.basis_index(levels)] = 1.0
    return StateVector(layout, v)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def partial_trace(rho: DensityMatrix, keep: tuple[int, ...]) -> DensityMatrix:
    """Reduced density matrix on the kept factors (in layout order)."""
    dims = rho.layout.factor_dims
    nf = len(dims)
    keep = tuple(sorted(set(int(k) for k in keep)))
    if not keep:
        raise DimensionError("keep must name at least one factor")
    if any(k < 0 or k >= nf for k in keep):
        raise DimensionError(f"factor index out of range in {keep}")
    t = rho.entries.reshape(dims + dims)
    # trace out the dropped factors from highest index down so axis numbers
    # of the remaining factors stay valid
    dropped = [k for k in range(nf) if k not in keep]
    n_left = nf
    for k in reversed(dropped):
        t = np.trace(t, axis1=k, axis2=k + n_left)
        n_left -= 1
    kept_dims = tuple(dims[k] for k in keep)
    d = prod(kept_dims)
    return DensityMatrix(
        SpaceLayout(kept_dims), t.reshape(d, d), strict=False
    )


def expm(h: Operator, scale: complex = 1.0) -> Operator:
    """Matrix exponential exp(scale * h) (scaling-and-squaring Pade)."""
    m = h.entries * scale
    if not np.all(np.isfinite(m)):
        raise ValueError("non-finite entries in exponent")
    return Operator(h.layout, scipy.linalg.expm(m))


def expectation(op: Operator, state: StateVector | DensityMatrix) -> complex:
    """<psi|op|psi> for kets, tr(op rho) for density matrices."""
    if op.layout != state.layout:
        raise DimensionError("operator and state layouts do not match")
    if isinstance(state, StateVector):
        v = state.amplitudes
        return complex(v.conj() @ (op.entries @ v))
    return complex(np.einsum("ij,ji->", op.entries, state.entries))
