import math

import numpy as np
import pytest
from scipy.linalg import expm

from spinmech.errors import InvalidDimensionError, UndefinedDirectionError
from spinmech.hilbert import (
    QuantumState,
    SpaceSignature,
    collective_spin,
    spin_basis_state,
)
from spinmech.metrics import concurrence, fidelity, spin_squeezing
from spinmech.transforms import ghz_target

BELL_PHI_PLUS = (spin_basis_state("dd").data + spin_basis_state("gg").data) / math.sqrt(2)


def grid_min_variance(rho, n_spins, n1, n2, n_grid=10_000):
    """Brute-force transverse-variance minimization over the rotation angle."""
    jx = collective_spin("x", n_spins, "half-sum").matrix
    jy = collective_spin("y", n_spins, "half-sum").matrix
    jz = collective_spin("z", n_spins, "half-sum").matrix
    best = np.inf
    for beta in np.linspace(0, np.pi, n_grid, endpoint=False):
        n_vec = math.cos(beta) * n1 + math.sin(beta) * n2
        j_n = n_vec[0] * jx + n_vec[1] * jy + n_vec[2] * jz
        mean = np.real(np.trace(j_n @ rho))
        var = np.real(np.trace(j_n @ j_n @ rho)) - mean**2
        best = min(best, var)
    return best


class TestFidelity:
    def test_self_fidelity(self):
        target = ghz_target(2)
        assert fidelity(target.to_density(), target) == pytest.approx(1.0)

    def test_maximally_mixed_single_qubit(self):
        rho = QuantumState(SpaceSignature((2,)), "density", np.eye(2) / 2)
        assert fidelity(rho, spin_basis_state("d")) == pytest.approx(1 / math.sqrt(2))

    def test_orthogonal_states(self):
        assert fidelity(spin_basis_state("d"), spin_basis_state("g")) == 0.0

    def test_mixed_target_rejected(self):
        rho = QuantumState(SpaceSignature((2,)), "density", np.eye(2) / 2)
        with pytest.raises(InvalidDimensionError):
            fidelity(rho, rho)


class TestConcurrence:
    def test_bell_state(self):
        rho = np.outer(BELL_PHI_PLUS, BELL_PHI_PLUS.conj())
        assert concurrence(rho) == pytest.approx(1.0, abs=1e-12)

    def test_all_four_bell_states(self):
        dd, gg = spin_basis_state("dd").data, spin_basis_state("gg").data
        dg, gd = spin_basis_state("dg").data, spin_basis_state("gd").data
        for vec in (dd + gg, dd - gg, dg + gd, dg - gd):
            vec = vec / np.linalg.norm(vec)
            assert concurrence(np.outer(vec, vec.conj())) == pytest.approx(1.0, abs=1e-12)

    def test_product_state(self):
        gd = spin_basis_state("gd").data
        assert concurrence(np.outer(gd, gd.conj())) == 0.0

    def test_separable_mixtures_vanish(self):
        rng = np.random.default_rng(5)
        rho = np.zeros((4, 4), dtype=complex)
        for _ in range(6):
            a = rng.normal(size=2) + 1j * rng.normal(size=2)
            b = rng.normal(size=2) + 1j * rng.normal(size=2)
            vec = np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b))
            rho += rng.uniform(0.1, 1.0) * np.outer(vec, vec.conj())
        rho /= np.trace(rho)
        assert concurrence(rho) == pytest.approx(0.0, abs=1e-9)

    def test_werner_state_frozen_value(self):
        # Wootters eigenvalue oracle gives max(0, (3p-1)/2) = 0.25 at p = 0.5
        p = 0.5
        rho = p * np.outer(BELL_PHI_PLUS, BELL_PHI_PLUS.conj()) + (1 - p) * np.eye(4) / 4
        sy = np.array([[0, -1j], [1j, 0]])
        flip = np.kron(sy, sy)
        mus = np.sort(np.sqrt(np.clip(np.linalg.eigvals(rho @ flip @ rho.conj() @ flip).real, 0, None)))[::-1]
        oracle = max(0.0, mus[0] - mus[1] - mus[2] - mus[3])
        assert oracle == pytest.approx(0.25, abs=1e-12)
        assert concurrence(rho) == pytest.approx(0.25, abs=1e-12)

    def test_wrong_dimension(self):
        with pytest.raises(InvalidDimensionError):
            concurrence(np.eye(8) / 8)


def random_state_with_mean_spin(n_spins, seed):
    rng = np.random.default_rng(seed)
    # polarized along -z with a random weak perturbation: defined mean spin
    base = spin_basis_state("g" * n_spins).data
    noise = rng.normal(size=base.shape) + 1j * rng.normal(size=base.shape)
    vec = base + 0.3 * noise / np.linalg.norm(noise)
    vec /= np.linalg.norm(vec)
    rho = np.outer(vec, vec.conj())
    return QuantumState(SpaceSignature((2,) * n_spins), "density", rho)


class TestSpinSqueezing:
    def test_coherent_state_reference(self):
        rep = spin_squeezing(spin_basis_state("gggg").to_density())
        assert rep.xi_s_sq == pytest.approx(1.0, abs=1e-12)
        assert rep.xi_r_sq == pytest.approx(1.0, abs=1e-12)
        assert rep.gain == pytest.approx(1.0, abs=1e-12)
        assert rep.spin_length == pytest.approx(1.0, abs=1e-12)

    def test_coherent_state_isotropic_transverse_variance(self):
        n = 5
        rho = spin_basis_state("g" * n).to_density().data
        jx = collective_spin("x", n, "half-sum").matrix
        jy = collective_spin("y", n, "half-sum").matrix
        for j in (jx, jy):
            var = np.real(np.trace(j @ j @ rho)) - np.real(np.trace(j @ rho)) ** 2
            assert var == pytest.approx(n / 4, abs=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_closed_form_equals_grid_minimization(self, seed):
        n = 3
        state = random_state_with_mean_spin(n, seed)
        rep = spin_squeezing(state)
        rho = state.data
        jx = collective_spin("x", n, "half-sum").matrix
        jy = collective_spin("y", n, "half-sum").matrix
        jz = collective_spin("z", n, "half-sum").matrix
        mean = np.array(
            [np.real(np.trace(j @ rho)) for j in (jx, jy, jz)]
        )
        theta = math.acos(mean[2] / np.linalg.norm(mean))
        phi = math.atan2(mean[1], mean[0])
        n1 = np.array([-math.sin(phi), math.cos(phi), 0.0])
        n2 = np.array(
            [math.cos(theta) * math.cos(phi), math.cos(theta) * math.sin(phi), -math.sin(theta)]
        )
        oracle = 4.0 * grid_min_variance(rho, n, n1, n2) / n
        # the 1e4-point grid resolves the minimum to ~(pi/1e4)^2 curvature error
        assert rep.xi_s_sq == pytest.approx(oracle, abs=1e-7)
        assert rep.xi_s_sq <= oracle + 1e-12

    def test_optimal_beta_attains_minimum(self):
        n = 3
        state = random_state_with_mean_spin(n, 42)
        rep = spin_squeezing(state)
        rho = state.data
        jx = collective_spin("x", n, "half-sum").matrix
        jy = collective_spin("y", n, "half-sum").matrix
        jz = collective_spin("z", n, "half-sum").matrix
        mean = np.array([np.real(np.trace(j @ rho)) for j in (jx, jy, jz)])
        theta = math.acos(mean[2] / np.linalg.norm(mean))
        phi = math.atan2(mean[1], mean[0])
        n1 = np.array([-math.sin(phi), math.cos(phi), 0.0])
        n2 = np.array(
            [math.cos(theta) * math.cos(phi), math.cos(theta) * math.sin(phi), -math.sin(theta)]
        )
        n_vec = math.cos(rep.optimal_beta) * n1 + math.sin(rep.optimal_beta) * n2
        j_n = n_vec[0] * jx + n_vec[1] * jy + n_vec[2] * jz
        mean_n = np.real(np.trace(j_n @ rho))
        var = np.real(np.trace(j_n @ j_n @ rho)) - mean_n**2
        assert 4.0 * var / n == pytest.approx(rep.xi_s_sq, abs=1e-10)

    def test_rotation_invariance(self):
        n = 3
        state = random_state_with_mean_spin(n, 7)
        rep0 = spin_squeezing(state)
        rng = np.random.default_rng(11)
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        angle = 0.9
        jx = collective_spin("x", n, "half-sum").matrix
        jy = collective_spin("y", n, "half-sum").matrix
        jz = collective_spin("z", n, "half-sum").matrix
        gen = axis[0] * jx + axis[1] * jy + axis[2] * jz
        u = expm(-1j * angle * gen)
        rotated = QuantumState(
            state.signature, "density", u @ state.data @ u.conj().T
        )
        rep1 = spin_squeezing(rotated)
        assert rep1.xi_s_sq == pytest.approx(rep0.xi_s_sq, abs=1e-8)

    def test_gain_identity(self):
        state = random_state_with_mean_spin(4, 3)
        rep = spin_squeezing(state)
        assert rep.gain * rep.xi_r_sq == pytest.approx(1.0, abs=1e-12)
        assert rep.xi_s_sq <= rep.xi_r_sq + 1e-12

    def test_undefined_direction(self):
        rho = QuantumState(SpaceSignature((2, 2)), "density", np.eye(4) / 4)
        with pytest.raises(UndefinedDirectionError):
            spin_squeezing(rho)

    def test_oat_evolution_squeezes(self):
        # N = 6 twisting from the polarized state dips below the coherent limit
        from spinmech.models import build_oat

        n = 6
        h = build_oat(0.1, n)
        psi0 = spin_basis_state("g" * n).data
        best = 1.0
        for t in np.linspace(0.05, 1.2, 24):
            psi_t = expm(-1j * h.matrix * t) @ psi0
            rho = QuantumState(SpaceSignature((2,) * n), "density", np.outer(psi_t, psi_t.conj()))
            rep = spin_squeezing(rho)
            best = min(best, rep.xi_r_sq)
        assert best < 1.0
