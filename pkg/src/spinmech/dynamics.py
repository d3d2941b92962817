"""Unitary and Lindblad time evolution with trajectory recording.

Observables are evaluated only at the requested sample times. They can be
plain operators (expectation values) or callables ``f(t, state) -> value`` for
derived quantities such as fidelities against a moving target.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import InvalidDimensionError, RunFailedError, TruncationError
from .hilbert import Operator, QuantumState, SpaceSignature
from .integrate import IntegratorOptions, StepStats, solve_ode
from .models import TimeDependentHamiltonian

__all__ = [
    "CollapseChannel",
    "RunDiagnostics",
    "Trajectory",
    "evolve_unitary",
    "evolve_lindblad",
    "choose_truncation",
]

log = logging.getLogger(__name__)

TRACE_TOL = 1e-8
NORM_TOL = 1e-8
EIG_FLOOR = -1e-6

Observable = "Operator | Callable[[float, QuantumState], complex]"


@dataclass(frozen=True)
class CollapseChannel:
    """Lindblad channel: rate * D[operator]."""

    operator: Operator
    rate: float

    def __post_init__(self):
        if self.rate < 0:
            raise InvalidDimensionError(f"collapse rate must be >= 0, got {self.rate}")


@dataclass
class RunDiagnostics:
    trace_drift: float = 0.0
    norm_drift: float = 0.0
    max_tail_population: float = 0.0
    min_eigenvalue: float = 0.0
    stats: StepStats = field(default_factory=StepStats)
    failed: bool = False
    messages: list[str] = field(default_factory=list)


@dataclass
class Trajectory:
    """Time grid, named expectation series and the final state of one run."""

    times: np.ndarray
    observables: dict[str, np.ndarray]
    final_state: QuantumState
    diagnostics: RunDiagnostics

    def series(self, name: str) -> np.ndarray:
        return self.observables[name]


def _resolve_hamiltonian(h, signature_hint=None):
    """Return (rhs_matrix_fn t -> ndarray, signature, is_static)."""
    if isinstance(h, TimeDependentHamiltonian):
        return h.__call__, h.signature, False
    if isinstance(h, Operator):
        if not h.is_hermitian(1e-10):
            raise InvalidDimensionError("Hamiltonian is not Hermitian within 1e-10")
        mat = h.matrix
        return (lambda t: mat), h.signature, True
    raise InvalidDimensionError(f"unsupported Hamiltonian type {type(h)!r}")


def _boson_level_populations(data: np.ndarray, dims: tuple[int, ...], kind: str) -> np.ndarray:
    """Population per boson level, spins traced out; subsystem 0 is the boson."""
    if kind == "vector":
        probs = np.abs(data) ** 2
    else:
        probs = np.real(np.diagonal(data))
    n_boson = dims[0]
    return probs.reshape(n_boson, -1).sum(axis=1)


def _evaluate_observables(
    observables: Mapping[str, object],
    t: float,
    state: QuantumState,
) -> dict[str, complex]:
    out = {}
    for name, obs in observables.items():
        if isinstance(obs, Operator):
            if state.kind == "vector":
                val = np.vdot(state.data, obs.matrix @ state.data)
            else:
                val = np.trace(obs.matrix @ state.data)
        else:
            val = obs(t, state)
        out[name] = complex(val)
    return out


def _pack_series(raw: list[dict[str, complex]], names) -> dict[str, np.ndarray]:
    series = {}
    for name in names:
        col = np.array([row[name] for row in raw])
        if np.max(np.abs(col.imag)) < 1e-9:
            col = col.real
        series[name] = col
    return series


def evolve_unitary(
    hamiltonian,
    psi0: QuantumState,
    times: Sequence[float],
    observables: Mapping[str, object] | None = None,
    options: IntegratorOptions | None = None,
) -> Trajectory:
    """Integrate the Schroedinger equation for a vector state.

    Norm is monitored at every sample; drift beyond 1e-8 marks the run failed.
    """
    if psi0.kind != "vector":
        raise InvalidDimensionError("unitary evolution needs a vector state")
    # norm is a quadratic invariant the stepper does not conserve exactly, so
    # vector runs (cheap) default tight enough that drift over ~1e5 steps
    # stays inside the 1e-8 norm budget they must hold
    options = options or IntegratorOptions(rtol=1e-12, atol=1e-14)
    observables = observables or {}
    h_of_t, signature, _ = _resolve_hamiltonian(hamiltonian)
    if signature != psi0.signature:
        raise InvalidDimensionError("Hamiltonian and state signatures differ")
    dims = signature.dims
    diag = RunDiagnostics()
    rows: list[dict[str, complex]] = []
    norm_err = 0.0
    tail_max = 0.0

    def rhs(t, y):
        return -1j * (h_of_t(t) @ y)

    def on_sample(t, y):
        nonlocal norm_err, tail_max
        norm = np.linalg.norm(y)
        norm_err = max(norm_err, abs(norm - 1.0))
        if dims[0] > 2:  # subsystem 0 is a boson register (needs n_max >= 2)
            pops = _boson_level_populations(y, dims, "vector")
            tail_max = max(tail_max, float(pops[-2:].sum()))
        state = QuantumState(signature, "vector", y / norm)
        rows.append(_evaluate_observables(observables, t, state))

    y_final, stats = solve_ode(rhs, psi0.data, times, options, on_sample=on_sample)
    diag.stats = stats
    diag.norm_drift = norm_err
    diag.max_tail_population = tail_max
    if norm_err > NORM_TOL:
        diag.failed = True
        diag.messages.append(f"norm drift {norm_err:.3e} beyond {NORM_TOL}")
        raise RunFailedError(f"unitary run failed: norm drift {norm_err:.3e}")
    final = QuantumState(signature, "vector", y_final / np.linalg.norm(y_final))
    return Trajectory(
        times=np.asarray(times, dtype=float),
        observables=_pack_series(rows, observables.keys()),
        final_state=final,
        diagnostics=diag,
    )


def _is_diagonal(m: np.ndarray) -> bool:
    return np.count_nonzero(m - np.diag(np.diagonal(m))) == 0


def evolve_lindblad(
    hamiltonian,
    channels: Sequence[CollapseChannel],
    rho0: QuantumState,
    times: Sequence[float],
    observables: Mapping[str, object] | None = None,
    options: IntegratorOptions | None = None,
    check_positivity: bool = True,
) -> Trajectory:
    """Integrate the master equation rho' = -i[H, rho] + sum_k rate_k D[x_k] rho.

    Vector states are promoted to projectors. The density matrix is
    re-symmetrized after every accepted integrator step; trace drift is never
    silently renormalized, it is recorded and fails the run beyond 1e-8.
    """
    # one order tighter than the nominal 1e-8/1e-10: needed for master-equation
    # expectations to track the state-vector path within 1e-7 on figure-length runs
    options = options or IntegratorOptions(rtol=1e-9, atol=1e-11)
    observables = observables or {}
    rho0 = rho0.to_density()
    h_of_t, signature, _ = _resolve_hamiltonian(hamiltonian)
    if signature != rho0.signature:
        raise InvalidDimensionError("Hamiltonian and state signatures differ")
    dim = signature.total_dim
    dims = signature.dims

    # Fold the anticommutator parts into an effective non-Hermitian drift:
    # rho' = -i (H_nh rho - rho H_nh^dag) + sum_k rate_k x_k rho x_k^dag
    sink = np.zeros((dim, dim), dtype=complex)
    jump_diag: list[tuple[np.ndarray, float]] = []  # diagonal x: elementwise path
    jump_full: list[tuple[np.ndarray, np.ndarray, float]] = []
    for ch in channels:
        if ch.operator.signature != signature:
            raise InvalidDimensionError("channel operator signature differs from Hamiltonian")
        if ch.rate == 0.0:
            continue
        x = ch.operator.matrix
        sink = sink + 0.5 * ch.rate * (x.conj().T @ x)
        if _is_diagonal(x):
            jump_diag.append((np.diagonal(x).copy(), ch.rate))
        else:
            jump_full.append((x, x.conj().T, ch.rate))
    outer_diag = [(rate * np.multiply.outer(d, d.conj()), None) for d, rate in jump_diag]

    def rhs(t, y):
        rho = y.reshape(dim, dim)
        h_nh = h_of_t(t) - 1j * sink
        drho = -1j * (h_nh @ rho - rho @ h_nh.conj().T)
        for w, _ in outer_diag:
            drho = drho + w * rho
        for x, xd, rate in jump_full:
            drho = drho + rate * (x @ rho @ xd)
        return drho.reshape(-1)

    def symmetrize(y):
        rho = y.reshape(dim, dim)
        rho = 0.5 * (rho + rho.conj().T)
        return rho.reshape(-1)

    diag = RunDiagnostics()
    rows: list[dict[str, complex]] = []
    trace_err = 0.0
    tail_max = 0.0
    min_eig = np.inf

    def on_sample(t, y):
        nonlocal trace_err, tail_max, min_eig
        rho = y.reshape(dim, dim)
        rho = 0.5 * (rho + rho.conj().T)
        tr = float(np.real(np.trace(rho)))
        trace_err = max(trace_err, abs(tr - 1.0))
        if dims[0] > 2:  # subsystem 0 is a boson register (needs n_max >= 2)
            pops = _boson_level_populations(rho, dims, "density")
            tail_max = max(tail_max, float(pops[-2:].sum()))
        if check_positivity:
            lo = float(np.min(np.linalg.eigvalsh(rho)))
            min_eig = min(min_eig, lo)
        row = {}
        for name, obs in observables.items():
            if isinstance(obs, Operator):
                row[name] = complex(np.trace(obs.matrix @ rho))
            else:
                # hand derived observables a valid state even with slight drift
                state = QuantumState(signature, "density", rho / tr)
                row[name] = complex(obs(t, state))
        rows.append(row)

    y_final, stats = solve_ode(
        rhs, rho0.data.reshape(-1), times, options, post_step=symmetrize, on_sample=on_sample
    )
    diag.stats = stats
    diag.trace_drift = trace_err
    diag.max_tail_population = tail_max
    diag.min_eigenvalue = float(min_eig) if np.isfinite(min_eig) else 0.0
    if check_positivity and diag.min_eigenvalue < EIG_FLOOR:
        diag.messages.append(
            f"density matrix eigenvalue reached {diag.min_eigenvalue:.3e} (monitored only)"
        )
        log.warning("%s", diag.messages[-1])
    if trace_err > TRACE_TOL:
        diag.failed = True
        diag.messages.append(f"trace drift {trace_err:.3e} beyond {TRACE_TOL}")
        raise RunFailedError(f"lindblad run failed: trace drift {trace_err:.3e}")
    rho_f = y_final.reshape(dim, dim)
    rho_f = 0.5 * (rho_f + rho_f.conj().T)
    final = QuantumState(signature, "density", rho_f / np.real(np.trace(rho_f)))
    return Trajectory(
        times=np.asarray(times, dtype=float),
        observables=_pack_series(rows, observables.keys()),
        final_state=final,
        diagnostics=diag,
    )


def choose_truncation(
    run_factory: Callable[[int], Trajectory],
    n_max_initial: int,
    tail_tolerance: float = 1e-6,
    cap: int = 256,
) -> int:
    """Smallest tested Fock cutoff whose top-two-level population stays small.

    ``run_factory(n_max)`` must execute the candidate run and return its
    trajectory; the cutoff doubles until the maximum combined population of the
    top two levels over the whole run drops below ``tail_tolerance``.
    """
    if not 0.0 < tail_tolerance < 1.0:
        raise InvalidDimensionError("tail tolerance must lie in (0, 1)")
    n_max = int(n_max_initial)
    while True:
        traj = run_factory(n_max)
        tail = traj.diagnostics.max_tail_population
        if tail < tail_tolerance:
            return n_max
        if n_max >= cap:
            raise TruncationError(
                f"tail population {tail:.3e} >= {tail_tolerance} at the cap n_max = {cap}"
            )
        n_max = min(2 * n_max, cap)
