"""Operators and states on truncated boson (x) multi-qubit tensor-product spaces.

Conventions fixed here and relied on everywhere else:

* subsystem 0 is the boson mode (dimension ``n_max + 1``), spins follow in
  index order, each of dimension 2;
* the qubit basis is ordered ``(|d>, |g>)`` so that
  ``sigma_z = |d><d| - |g><g| = diag(+1, -1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidDimensionError, SignatureMismatchError

__all__ = [
    "SpaceSignature",
    "Operator",
    "QuantumState",
    "fock_annihilation",
    "fock_creation",
    "fock_number",
    "pauli",
    "identity",
    "embed",
    "collective_spin",
    "partial_trace",
    "basis_state",
    "spin_basis_state",
    "boson_spin_signature",
    "boson_spin_state",
    "expectation",
    "remove_identity_component",
]

HERMITICITY_TOL = 1e-12

# qubit basis index of each dressed level, ordering (|d>, |g>)
SPIN_LEVEL = {"d": 0, "g": 1}


@dataclass(frozen=True)
class SpaceSignature:
    """Ordered subsystem dimensions of a tensor-product Hilbert space."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise InvalidDimensionError("signature needs at least one subsystem")
        if any(d < 2 for d in dims):
            raise InvalidDimensionError(f"every subsystem dimension must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def __len__(self) -> int:
        return len(self.dims)

    def __iter__(self):
        return iter(self.dims)


def _check_same_signature(a, b):
    if a.signature != b.signature:
        raise SignatureMismatchError(f"signatures differ: {a.signature.dims} vs {b.signature.dims}")


@dataclass(frozen=True)
class Operator:
    """Complex dense square matrix tagged with its tensor-product signature."""

    signature: SpaceSignature
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = self.signature.total_dim
        if m.shape != (n, n):
            raise InvalidDimensionError(
                f"matrix shape {m.shape} does not match signature dimension {n}"
            )
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.signature.total_dim

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T))) <= tol

    def dagger(self) -> "Operator":
        return Operator(self.signature, self.matrix.conj().T)

    def __add__(self, other: "Operator") -> "Operator":
        _check_same_signature(self, other)
        return Operator(self.signature, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        _check_same_signature(self, other)
        return Operator(self.signature, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.signature, self.matrix * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(self.signature, -self.matrix)

    def __matmul__(self, other: "Operator") -> "Operator":
        _check_same_signature(self, other)
        return Operator(self.signature, self.matrix @ other.matrix)


@dataclass(frozen=True)
class QuantumState:
    """State vector or density matrix over a signature.

    Normalization invariants are checked at construction: unit Euclidean norm
    for vectors (1e-10), and for density matrices Hermiticity (1e-10), unit
    trace (1e-8) and eigenvalues >= -1e-8.
    """

    signature: SpaceSignature
    kind: str  # "vector" | "density"
    data: np.ndarray = field(repr=False)

    VECTOR_NORM_TOL = 1e-10
    DENSITY_HERM_TOL = 1e-10
    DENSITY_TRACE_TOL = 1e-8
    DENSITY_EIG_TOL = 1e-8

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=complex)
        n = self.signature.total_dim
        if self.kind == "vector":
            if arr.shape != (n,):
                raise InvalidDimensionError(f"vector shape {arr.shape}, expected ({n},)")
            if abs(np.linalg.norm(arr) - 1.0) > self.VECTOR_NORM_TOL:
                raise InvalidDimensionError(
                    f"state vector not normalized: |norm - 1| = {abs(np.linalg.norm(arr) - 1.0):.3e}"
                )
        elif self.kind == "density":
            if arr.shape != (n, n):
                raise InvalidDimensionError(f"density shape {arr.shape}, expected ({n}, {n})")
            herm = float(np.max(np.abs(arr - arr.conj().T)))
            if herm > self.DENSITY_HERM_TOL:
                raise InvalidDimensionError(f"density matrix not Hermitian: deviation {herm:.3e}")
            tr = arr.trace()
            if abs(tr - 1.0) > self.DENSITY_TRACE_TOL:
                raise InvalidDimensionError(f"density trace {tr:.12f} != 1")
            lo = float(np.min(np.linalg.eigvalsh((arr + arr.conj().T) / 2)))
            if lo < -self.DENSITY_EIG_TOL:
                raise InvalidDimensionError(f"density matrix has eigenvalue {lo:.3e} < 0")
        else:
            raise InvalidDimensionError(f"unknown state kind {self.kind!r}")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    def as_density_matrix(self) -> np.ndarray:
        if self.kind == "vector":
            return np.outer(self.data, self.data.conj())
        return np.asarray(self.data)

    def to_density(self) -> "QuantumState":
        if self.kind == "density":
            return self
        return QuantumState(self.signature, "density", self.as_density_matrix())


# ---------------------------------------------------------------------------
# elementary operators

def fock_annihilation(n_max: int) -> Operator:
    """Truncated boson annihilation operator, <n-1|a|n> = sqrt(n), on n_max+1 levels."""
    if n_max < 1:
        raise InvalidDimensionError(f"n_max must be >= 1, got {n_max}")
    a = np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)
    return Operator(SpaceSignature((n_max + 1,)), a)


def fock_creation(n_max: int) -> Operator:
    a = fock_annihilation(n_max)
    return a.dagger()


def fock_number(n_max: int) -> Operator:
    a = fock_annihilation(n_max)
    return a.dagger() @ a


_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    # sigma_+ = |d><g|, sigma_- = |g><d| in the (|d>, |g>) ordering
    "plus": np.array([[0, 1], [0, 0]], dtype=complex),
    "minus": np.array([[0, 0], [1, 0]], dtype=complex),
}


def pauli(axis: str) -> Operator:
    """Single-qubit operator in the (|d>, |g>) basis; axis in {x, y, z, plus, minus}."""
    try:
        m = _PAULI[axis]
    except KeyError:
        raise InvalidDimensionError(f"unknown pauli axis {axis!r}") from None
    return Operator(SpaceSignature((2,)), m)


def identity(signature: SpaceSignature) -> Operator:
    return Operator(signature, np.eye(signature.total_dim, dtype=complex))


def embed(local: Operator, slot: int, signature: SpaceSignature) -> Operator:
    """Kronecker-embed a single-subsystem operator at position ``slot``."""
    dims = signature.dims
    if not 0 <= slot < len(dims):
        raise InvalidDimensionError(f"slot {slot} out of range for {len(dims)} subsystems")
    if local.signature.total_dim != dims[slot]:
        raise InvalidDimensionError(
            f"local dimension {local.signature.total_dim} != signature.dims[{slot}] = {dims[slot]}"
        )
    factors = [
        local.matrix if k == slot else np.eye(d, dtype=complex) for k, d in enumerate(dims)
    ]
    return Operator(signature, reduce(np.kron, factors))


def collective_spin(axis: str, n_spins: int, convention: str = "pauli-sum") -> Operator:
    """Collective spin component over ``n_spins`` qubits (no boson register).

    ``pauli-sum`` returns sum_j sigma_axis^j (the form used by the Hamiltonian
    builders); ``half-sum`` returns sum_j sigma_axis^j / 2 (spin-1/2 operators,
    used by the squeezing metrics).
    """
    if n_spins < 1:
        raise InvalidDimensionError(f"n_spins must be >= 1, got {n_spins}")
    if convention not in ("pauli-sum", "half-sum"):
        raise InvalidDimensionError(f"unknown convention {convention!r}")
    sig = SpaceSignature((2,) * n_spins)
    total = np.zeros((sig.total_dim, sig.total_dim), dtype=complex)
    for j in range(n_spins):
        total += embed(pauli(axis), j, sig).matrix
    if convention == "half-sum":
        total = total / 2
    return Operator(sig, total)


# ---------------------------------------------------------------------------
# states

def basis_state(signature: SpaceSignature, levels: Sequence[int]) -> QuantumState:
    """Product basis state |levels[0], levels[1], ...> over the signature."""
    if len(levels) != len(signature.dims):
        raise InvalidDimensionError("one level index per subsystem required")
    for lv, d in zip(levels, signature.dims):
        if not 0 <= lv < d:
            raise InvalidDimensionError(f"level {lv} out of range for dimension {d}")
    vec = np.zeros(signature.total_dim, dtype=complex)
    vec[int(np.ravel_multi_index(tuple(levels), signature.dims))] = 1.0
    return QuantumState(signature, "vector", vec)


def spin_basis_state(labels: str) -> QuantumState:
    """Multi-qubit product state from a label string, e.g. ``"gdgd"``."""
    try:
        levels = [SPIN_LEVEL[c] for c in labels]
    except KeyError as exc:
        raise InvalidDimensionError(f"unknown spin label in {labels!r}") from exc
    return basis_state(SpaceSignature((2,) * len(labels)), levels)


def boson_spin_signature(n_max: int, n_spins: int) -> SpaceSignature:
    return SpaceSignature((n_max + 1,) + (2,) * n_spins)


def boson_spin_state(n_max: int, spin_labels: str, n_phonon: int = 0) -> QuantumState:
    """|n_phonon>_boson (x) |spin_labels>, e.g. ``boson_spin_state(10, "d")``."""
    sig = boson_spin_signature(n_max, len(spin_labels))
    levels = [n_phonon] + [SPIN_LEVEL[c] for c in spin_labels]
    return basis_state(sig, levels)


def partial_trace(state: QuantumState, keep: Iterable[int]) -> QuantumState:
    """Reduced density matrix over the kept subsystems (order preserved)."""
    keep = sorted(set(int(k) for k in keep))
    dims = state.signature.dims
    if not keep:
        raise InvalidDimensionError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise InvalidDimensionError(f"keep indices {keep} out of range for {len(dims)} subsystems")
    rho = state.as_density_matrix().reshape(dims + dims)
    n_sub = len(dims)
    for sub in reversed(range(n_sub)):
        if sub in keep:
            continue
        # trace out axis pair (sub, sub + current number of row axes)
        n_rows = rho.ndim // 2
        rho = np.trace(rho, axis1=sub, axis2=sub + n_rows)
    kept_dims = tuple(dims[k] for k in keep)
    d = int(np.prod(kept_dims))
    return QuantumState(SpaceSignature(kept_dims), "density", rho.reshape(d, d))


def expectation(op: Operator, state: QuantumState) -> complex:
    if op.signature != state.signature:
        raise SignatureMismatchError("operator and state signatures differ")
    if state.kind == "vector":
        return complex(np.vdot(state.data, op.matrix @ state.data))
    return complex(np.trace(op.matrix @ state.data))


def remove_identity_component(op: Operator) -> tuple[Operator, float]:
    """Split off the identity-proportional part; returns (traceless part, shift).

    The dropped shift is the coefficient of the identity, i.e. tr(H)/dim.
    """
    shift = complex(op.matrix.trace()) / op.dim
    stripped = Operator(op.signature, op.matrix - shift * np.eye(op.dim))
    return stripped, float(shift.real) if abs(shift.imag) < 1e-12 else shift
