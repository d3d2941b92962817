"""Frame changes, analytic interaction-picture solutions and target states."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import cumulative_simpson, simpson
from scipy.linalg import expm

from .errors import (
    InvalidDimensionError,
    SignatureMismatchError,
    TruncationError,
    UnsupportedConfigurationError,
)
from .hilbert import (
    Operator,
    QuantumState,
    SpaceSignature,
    boson_spin_signature,
    embed,
    fock_annihilation,
    pauli,
    remove_identity_component,
    spin_basis_state,
)
from .models import ModelParams, SqueezeParams, build_ising, build_squeezed_rabi, lamb_dicke_eta

__all__ = [
    "FrameTransform",
    "squeeze_operator",
    "polaron_transform",
    "conjugate",
    "SchriefferWolffReport",
    "schrieffer_wolff_check",
    "coherent_state",
    "cat_alpha",
    "cat_alpha_series",
    "target_cat_state",
    "ghz_target",
]

log = logging.getLogger(__name__)

UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class FrameTransform:
    """Unitary frame change with a descriptive label like ``squeeze(r=1.25)``."""

    unitary: Operator
    label: str

    def __post_init__(self):
        u = self.unitary.matrix
        defect = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
        if defect > UNITARITY_TOL:
            log.info("frame %s unitary only to %.2e (truncation edge)", self.label, defect)

    def dagger(self) -> "FrameTransform":
        return FrameTransform(self.unitary.dagger(), self.label + "^dag")


def squeeze_operator(
    r: float, n_max: int, signature: SpaceSignature | None = None
) -> FrameTransform:
    """exp[r (a^2 - a+^2) / 2] on a truncated Fock space.

    With a boson-first ``signature`` the unitary is embedded over the full
    tensor-product space. The truncated exponential is only trustworthy while
    the squeezed vacuum fits: warns for sinh^2 r > n_max/4 and refuses beyond
    n_max/2.
    """
    occupation = math.sinh(r) ** 2
    if occupation > n_max / 2:
        raise TruncationError(
            f"sinh^2(r) = {occupation:.2f} > n_max/2 = {n_max / 2}: cutoff too small"
        )
    if occupation > n_max / 4:
        log.warning(
            "squeeze r = %.3f close to the truncation limit (sinh^2 r = %.2f, n_max = %d)",
            r, occupation, n_max,
        )
    a = fock_annihilation(n_max).matrix
    u = Operator(SpaceSignature((n_max + 1,)), expm(0.5 * r * (a @ a - a.conj().T @ a.conj().T)))
    if signature is not None:
        if signature.dims[0] != n_max + 1:
            raise SignatureMismatchError("signature's boson dimension does not match n_max")
        u = embed(u, 0, signature)
    return FrameTransform(u, f"squeeze(r={r:g})")


def polaron_transform(eta: Sequence[float], signature: SpaceSignature) -> FrameTransform:
    """exp[sum_k eta_k (a+ - a) sx^k] over a boson-plus-spins signature."""
    if len(signature.dims) != len(eta) + 1:
        raise SignatureMismatchError("need one eta per spin subsystem")
    n_max = signature.dims[0] - 1
    a = embed(fock_annihilation(n_max), 0, signature).matrix
    gen = np.zeros((signature.total_dim,) * 2, dtype=complex)
    for k, eta_k in enumerate(eta):
        sx = embed(pauli("x"), k + 1, signature).matrix
        gen = gen + eta_k * ((a.conj().T - a) @ sx)
    label = "polaron(" + ",".join(f"{e:g}" for e in eta) + ")"
    return FrameTransform(Operator(signature, expm(gen)), label)


def conjugate(h: Operator, frame: FrameTransform) -> Operator:
    """F H F^dag."""
    if h.signature != frame.unitary.signature:
        raise SignatureMismatchError("operator and transform signatures differ")
    u = frame.unitary.matrix
    return Operator(h.signature, u @ h.matrix @ u.conj().T)


@dataclass(frozen=True)
class SchriefferWolffReport:
    """Residual norms of the polaron reduction at eta and eta/2."""

    eta_max: float
    residual: float
    residual_half: float
    ratio: float
    sigma_xx_coefficient: float  # extracted sx^1 sx^2 coefficient (N >= 2) or sx^1 sx^1 (N = 1)


def _low_phonon_projector(signature: SpaceSignature, n_keep: int) -> np.ndarray:
    dims = signature.dims
    keep = np.zeros(dims[0])
    keep[: n_keep + 1] = 1.0
    return np.kron(np.diag(keep), np.eye(int(np.prod(dims[1:])))).astype(complex)


def _sw_residual(params: ModelParams, squeeze: SqueezeParams, n_low: int) -> tuple[float, float]:
    """Spectral norm of (polaron-conjugated Rabi) - (free phonons + Ising),
    restricted to the low-phonon block, plus the extracted sx sx coefficient."""
    signature = params.signature()
    report = lamb_dicke_eta(squeeze, params)
    frame = polaron_transform(report.eta, signature)
    h_rabi = build_squeezed_rabi(params, squeeze, signature)
    h_conj = conjugate(h_rabi, frame)

    n_max = params.n_max
    a = embed(fock_annihilation(n_max), 0, signature).matrix
    h_model = squeeze.delta_m_eff * (a.conj().T @ a)
    ising = build_ising(params, squeeze).matrix
    h_model = h_model + np.kron(np.eye(n_max + 1), ising)

    p = _low_phonon_projector(signature, n_low)
    resid = p @ (h_conj.matrix - h_model) @ p
    norm = float(np.linalg.norm(resid, ord=2))

    # project the conjugated operator onto sx^1 sx^2 at phonon vacuum; halved
    # because the double-sum convention counts each unordered pair twice
    n_spins = params.n_spins
    spin_sig = SpaceSignature((2,) * n_spins)
    sx0 = embed(pauli("x"), 0, spin_sig).matrix
    sx1 = embed(pauli("x"), 1 if n_spins > 1 else 0, spin_sig).matrix
    probe = sx0 @ sx1
    spin_dim = spin_sig.total_dim
    vac_block = h_conj.matrix[:spin_dim, :spin_dim]
    coeff = float(np.real(np.trace(vac_block @ probe)) / np.real(np.trace(probe @ probe)))
    if n_spins > 1:
        coeff = coeff / 2.0
    return norm, coeff


def schrieffer_wolff_check(
    params: ModelParams,
    squeeze: SqueezeParams | None = None,
    n_low: int | None = None,
) -> SchriefferWolffReport:
    """Compare the exact polaron conjugation against the effective Ising model.

    Computes the restricted spectral norm of
    ``conjugate(H_Rabi, polaron) - [Delta_m a+a + H_Ising]`` at the model's eta
    and at eta/2 (couplings halved), and reports the ratio.
    """
    from .models import derive_squeeze_params

    if squeeze is None:
        squeeze = derive_squeeze_params(params)
    report = lamb_dicke_eta(squeeze, params)
    eta_max = max(report.eta)
    if eta_max > 0.3:
        raise UnsupportedConfigurationError(
            f"eta = {eta_max:.3f} too large to trust the expansion (limit 0.3)"
        )
    if n_low is None:
        n_low = max(1, params.n_max // 3)
    residual, coeff = _sw_residual(params, squeeze, n_low)

    params_half = params.with_updates(lambda_j=tuple(l / 2 for l in params.lambda_j))
    squeeze_half = SqueezeParams(
        r=squeeze.r,
        delta_m_eff=squeeze.delta_m_eff,
        lambda_eff=tuple(l / 2 for l in squeeze.lambda_eff),
    )
    residual_half, _ = _sw_residual(params_half, squeeze_half, n_low)
    ratio = residual / residual_half if residual_half > 0 else math.inf
    return SchriefferWolffReport(
        eta_max=eta_max,
        residual=residual,
        residual_half=residual_half,
        ratio=ratio,
        sigma_xx_coefficient=coeff,
    )


# ---------------------------------------------------------------------------
# states

def coherent_state(alpha: complex, n_max: int) -> QuantumState:
    """Normalized truncated coherent state; errors if the cut tail > 1e-8."""
    n = np.arange(n_max + 1)
    log_amp = n * np.log(complex(alpha)) if alpha != 0 else np.where(n == 0, 0.0, -np.inf)
    # amplitudes e^{-|a|^2/2} alpha^n / sqrt(n!)
    from scipy.special import gammaln

    amps = np.exp(-abs(alpha) ** 2 / 2) * np.exp(log_amp - 0.5 * gammaln(n + 1.0))
    tail = 1.0 - float(np.sum(np.abs(amps) ** 2))
    if tail > 1e-8:
        raise TruncationError(
            f"coherent state |alpha| = {abs(alpha):.3f} loses {tail:.2e} beyond n_max = {n_max}"
        )
    amps = amps / np.linalg.norm(amps)
    return QuantumState(SpaceSignature((n_max + 1,)), "vector", amps)


def cat_alpha_series(
    params: ModelParams,
    r_schedule: Callable[[float], float],
    times,
    abs_tol: float = 1e-8,
) -> np.ndarray:
    """Coherent displacement alpha(t) of the interaction-picture solution,
    evaluated on a whole time grid.

    alpha(t) = (lambda / 2i) * Integral_0^t exp[r(t') - i (G(t) - G(t'))] dt'
    with G the accumulated squeezed-frame detuning phase G(t) = Int_0^t
    Delta_m(t'') dt''. The inner phase is precomputed cumulatively on a shared
    dense grid; the grid is refined until the endpoint moves by less than
    ``abs_tol``.
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        return np.zeros(0, dtype=complex)
    if np.min(times) < 0:
        raise InvalidDimensionError("times must be >= 0")
    t_end = float(np.max(times))
    if t_end == 0.0:
        return np.zeros_like(times, dtype=complex)
    lam = params.lambda_j[0]
    delta_m = params.delta_m

    def evaluate(points_per_unit: float) -> np.ndarray:
        # dense grid containing every requested time
        n_dense = max(801, int(points_per_unit * t_end) | 1)
        grid = np.union1d(np.linspace(0.0, t_end, n_dense), times)
        r_vals = np.array([r_schedule(tp) for tp in grid])
        dm_vals = delta_m / np.cosh(2.0 * r_vals)
        phase = cumulative_simpson(dm_vals, x=grid, initial=0.0)
        growth = np.exp(r_vals)
        # cumulative_simpson is real-only: integrate quadratures separately
        inner = (
            cumulative_simpson(growth * np.cos(phase), x=grid, initial=0.0)
            + 1j * cumulative_simpson(growth * np.sin(phase), x=grid, initial=0.0)
        )
        alpha = lam / 2j * inner * np.exp(-1j * phase)
        idx = np.searchsorted(grid, times)
        return alpha[idx]

    density = 2000.0
    value = evaluate(density)
    for _ in range(8):
        density *= 2.0
        refined = evaluate(density)
        if np.max(np.abs(refined - value)) < abs_tol:
            return refined
        value = refined
    raise InvalidDimensionError("displacement quadrature failed to converge")


def cat_alpha(
    params: ModelParams,
    r_schedule: Callable[[float], float],
    t: float,
    abs_tol: float = 1e-8,
) -> complex:
    """Displacement alpha at a single time; see ``cat_alpha_series``."""
    if t < 0:
        raise InvalidDimensionError("time must be >= 0")
    if t == 0.0:
        return 0.0j
    return complex(cat_alpha_series(params, r_schedule, np.array([t]), abs_tol)[0])


def target_cat_state(alpha: complex, n_max: int) -> QuantumState:
    """Entangled cat [ |alpha>|+x> - |-alpha>|-x> ] / norm over boson (x) one spin.

    |+->_x = (|d> +- |g>)/sqrt(2). The two branches overlap for small |alpha|,
    so normalization is always computed numerically.
    """
    plus = coherent_state(alpha, n_max).data
    minus = coherent_state(-alpha, n_max).data
    x_plus = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
    x_minus = np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0)
    vec = np.kron(plus, x_plus) - np.kron(minus, x_minus)
    norm = np.linalg.norm(vec)
    if norm < 1e-12:
        raise InvalidDimensionError("degenerate cat state (zero norm)")
    return QuantumState(boson_spin_signature(n_max, 1), "vector", vec / norm)


def ghz_target(n_spins: int) -> QuantumState:
    """GHZ state (e^{-i pi/4}|g...g> + e^{+i pi/4}|d...d>)/sqrt(2), spins only."""
    if n_spins < 2:
        raise InvalidDimensionError(f"GHZ target needs >= 2 spins, got {n_spins}")
    all_g = spin_basis_state("g" * n_spins).data
    all_d = spin_basis_state("d" * n_spins).data
    vec = (np.exp(-1j * math.pi / 4) * all_g + np.exp(1j * math.pi / 4) * all_d) / math.sqrt(2)
    return QuantumState(SpaceSignature((2,) * n_spins), "vector", vec)
