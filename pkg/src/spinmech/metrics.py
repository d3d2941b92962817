"""Entanglement and metrology figures of merit.

The squeezing metrics use spin-1/2 collective operators (J = sum sigma / 2) so
that a coherent spin state scores exactly 1; the Hamiltonian builders keep the
plain pauli-sum convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimensionError, SignatureMismatchError, UndefinedDirectionError
from .hilbert import Operator, QuantumState, collective_spin

__all__ = ["SqueezingReport", "fidelity", "concurrence", "spin_squeezing"]

MEAN_SPIN_FLOOR_FACTOR = 1e-8  # times N/2


def fidelity(state: QuantumState, target: QuantumState) -> float:
    """Square-root-of-population fidelity F = sqrt(<T| rho |T>) against a pure target."""
    if target.kind != "vector":
        raise InvalidDimensionError("target must be a pure state vector")
    if state.signature != target.signature:
        raise SignatureMismatchError("state and target signatures differ")
    if state.kind == "vector":
        return float(abs(np.vdot(target.data, state.data)))
    val = float(np.real(np.vdot(target.data, state.as_density_matrix() @ target.data)))
    return math.sqrt(max(val, 0.0))


_SY_SY = np.kron(
    np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]])
)


def concurrence(rho: QuantumState | np.ndarray) -> float:
    """Wootters concurrence of a two-qubit density matrix."""
    if isinstance(rho, QuantumState):
        mat = rho.as_density_matrix()
    else:
        mat = np.asarray(rho, dtype=complex)
    if mat.shape != (4, 4):
        raise InvalidDimensionError(f"concurrence needs a 4x4 density matrix, got {mat.shape}")
    rho_tilde = _SY_SY @ mat.conj() @ _SY_SY
    eigs = np.linalg.eigvals(mat @ rho_tilde)
    mus = np.sort(np.sqrt(np.clip(eigs.real, 0.0, None)))[::-1]
    return float(max(0.0, mus[0] - mus[1] - mus[2] - mus[3]))


@dataclass(frozen=True)
class SqueezingReport:
    mean_spin_direction: tuple[float, float, float]
    spin_length: float
    xi_s_sq: float
    xi_r_sq: float
    gain: float
    optimal_beta: float


def _expect(m: np.ndarray, rho: np.ndarray) -> float:
    return float(np.real(np.trace(m @ rho)))


def spin_squeezing(rho: QuantumState, n_spins: int | None = None) -> SqueezingReport:
    """Kitagawa-Ueda and Wineland squeezing of an N-spin state.

    Finds the mean-spin direction, builds the two transverse axes, and
    minimizes the transverse variance in closed form over the rotation angle
    beta; the metrological parameter follows as xi_R^2 = xi_S^2 (N / 2|<J>|)^2
    and the phase-sensitivity gain as 1 / xi_R^2.
    """
    if n_spins is None:
        n_spins = len(rho.signature.dims)
    if n_spins < 2:
        raise InvalidDimensionError("spin squeezing needs at least 2 spins")
    if rho.signature.dims != (2,) * n_spins:
        raise SignatureMismatchError("state must live on N qubits only")
    mat = rho.as_density_matrix()
    jx = collective_spin("x", n_spins, "half-sum").matrix
    jy = collective_spin("y", n_spins, "half-sum").matrix
    jz = collective_spin("z", n_spins, "half-sum").matrix

    mean = np.array([_expect(jx, mat), _expect(jy, mat), _expect(jz, mat)])
    j_len = float(np.linalg.norm(mean))
    if j_len <= MEAN_SPIN_FLOOR_FACTOR * n_spins / 2:
        raise UndefinedDirectionError(
            f"|<J>| = {j_len:.3e} too small to define a mean-spin direction"
        )
    theta = math.acos(np.clip(mean[2] / j_len, -1.0, 1.0))
    phi = math.atan2(mean[1], mean[0])

    n1 = np.array([-math.sin(phi), math.cos(phi), 0.0])
    n2 = np.array([math.cos(theta) * math.cos(phi), math.cos(theta) * math.sin(phi), -math.sin(theta)])
    j1 = n1[0] * jx + n1[1] * jy + n1[2] * jz
    j2 = n2[0] * jx + n2[1] * jy + n2[2] * jz

    m1 = _expect(j1, mat)
    m2 = _expect(j2, mat)
    v11 = _expect(j1 @ j1, mat) - m1 * m1
    v22 = _expect(j2 @ j2, mat) - m2 * m2
    cov = 0.5 * _expect(j1 @ j2 + j2 @ j1, mat) - m1 * m2

    disc = math.sqrt((v11 - v22) ** 2 + 4.0 * cov**2)
    min_var = 0.5 * (v11 + v22 - disc)
    # variance along cos(b) n1 + sin(b) n2 is extremal at tan(2b) = 2 cov / (v11 - v22);
    # the + pi branch selects the minimum
    beta = 0.5 * (math.atan2(2.0 * cov, v11 - v22) + math.pi)
    xi_s_sq = 4.0 * min_var / n_spins
    factor = (n_spins / (2.0 * j_len)) ** 2
    xi_r_sq = xi_s_sq * factor
    return SqueezingReport(
        mean_spin_direction=tuple(mean / j_len),
        spin_length=j_len / (n_spins / 2.0),
        xi_s_sq=xi_s_sq,
        xi_r_sq=xi_r_sq,
        gain=1.0 / xi_r_sq,
        optimal_beta=beta,
    )
