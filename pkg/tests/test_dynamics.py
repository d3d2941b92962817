import math

import numpy as np
import pytest
from scipy.linalg import expm

from spinmech.dynamics import (
    CollapseChannel,
    choose_truncation,
    evolve_lindblad,
    evolve_unitary,
)
from spinmech.errors import InvalidDimensionError, TruncationError
from spinmech.hilbert import (
    Operator,
    QuantumState,
    SpaceSignature,
    basis_state,
    boson_spin_state,
    embed,
    fock_annihilation,
    fock_number,
    pauli,
    spin_basis_state,
)
from spinmech.integrate import IntegratorOptions
from spinmech.models import ModelParams, build_total_hamiltonian


def number_op(n_max, signature=None):
    if signature is None:
        return fock_number(n_max)
    return embed(fock_number(n_max), 0, signature)


class TestUnitary:
    def test_number_eigenstate_is_stationary(self):
        n_max = 4
        h = Operator(SpaceSignature((n_max + 1,)), 2.0 * fock_number(n_max).matrix)
        psi0 = basis_state(h.signature, [1])
        times = np.linspace(0, 5, 41)
        traj = evolve_unitary(h, psi0, times, {"n": fock_number(n_max)})
        assert np.allclose(traj.series("n"), 1.0, atol=1e-9)

    def test_matches_matrix_exponential_oracle(self):
        p = ModelParams(delta_m=1.3, delta_dg=0.9, lambda_j=0.7, omega_p_amp=0.4, n_max=5)
        h = build_total_hamiltonian(p)
        psi0 = boson_spin_state(5, "d")
        times = np.linspace(0, 4, 9)
        sz = embed(pauli("z"), 1, p.signature())
        traj = evolve_unitary(h, psi0, times, {"sz": sz})
        for t, val in zip(times, traj.series("sz")):
            psi_t = expm(-1j * h.matrix * t) @ psi0.data
            oracle = np.real(np.vdot(psi_t, sz.matrix @ psi_t))
            assert val == pytest.approx(oracle, abs=1e-8)

    def test_resonant_jc_vacuum_rabi_period(self):
        # delta_m = delta_dg, no pump: |0,d> <-> |1,g> full oscillation at pi/lambda
        p = ModelParams(delta_m=2.0, delta_dg=2.0, lambda_j=1.0, n_max=4)
        h = build_total_hamiltonian(p)
        psi0 = boson_spin_state(4, "d")
        period = math.pi / 1.0
        times = np.linspace(0, 2 * period, 81)
        sz = embed(pauli("z"), 1, p.signature())
        traj = evolve_unitary(h, psi0, times, {"sz": sz})
        sz_t = traj.series("sz")
        assert sz_t[0] == pytest.approx(1.0, abs=1e-9)
        idx_half = np.argmin(np.abs(times - period / 2))
        assert sz_t[idx_half] == pytest.approx(-1.0, abs=1e-6)
        idx_full = np.argmin(np.abs(times - period))
        assert sz_t[idx_full] == pytest.approx(1.0, abs=1e-6)

    def test_energy_conserved(self):
        p = ModelParams(delta_m=1.0, lambda_j=1.0, omega_p_amp=0.3, n_max=8)
        h = build_total_hamiltonian(p)
        psi0 = boson_spin_state(8, "d")
        times = np.linspace(0, 10, 21)
        traj = evolve_unitary(h, psi0, times, {"energy": h})
        e = traj.series("energy")
        assert np.max(np.abs(e - e[0])) < 1e-8

    def test_norm_preserved(self):
        p = ModelParams(delta_m=1.0, lambda_j=1.0, n_max=6)
        h = build_total_hamiltonian(p)
        traj = evolve_unitary(h, boson_spin_state(6, "g"), np.linspace(0, 20, 11))
        assert traj.diagnostics.norm_drift < 1e-8

    def test_non_hermitian_rejected(self):
        bad = Operator(SpaceSignature((2,)), np.array([[0, 1], [0, 0]], dtype=complex))
        with pytest.raises(InvalidDimensionError):
            evolve_unitary(bad, spin_basis_state("g"), [0.0, 1.0])


class TestLindblad:
    def test_amplitude_decay_analytic(self):
        n_max = 3
        kappa = 0.7
        sig = SpaceSignature((n_max + 1,))
        h = Operator(sig, np.zeros((n_max + 1, n_max + 1)))
        rho0 = basis_state(sig, [1])
        ch = [CollapseChannel(fock_annihilation(n_max), kappa)]
        times = np.linspace(0, 5, 26)
        traj = evolve_lindblad(h, ch, rho0, times, {"n": fock_number(n_max)})
        assert np.max(np.abs(traj.series("n") - np.exp(-kappa * times))) < 1e-6

    def test_pure_dephasing_superoperator_oracle(self):
        gamma = 0.4
        sig = SpaceSignature((2,))
        h = Operator(sig, np.zeros((2, 2)))
        plus = QuantumState(sig, "vector", np.array([1.0, 1.0]) / math.sqrt(2))
        ch = [CollapseChannel(pauli("z"), gamma)]
        times = np.linspace(0, 3, 16)
        traj = evolve_lindblad(h, ch, plus, times, {"sx": pauli("x")})
        # brute-force vectorized superoperator: rho' = L rho
        eye = np.eye(2)
        sz = pauli("z").matrix
        lsup = gamma * (np.kron(sz.conj(), sz) - np.kron(eye, eye))
        for t, val in zip(times, traj.series("sx")):
            rho_t = (expm(lsup * t) @ plus.as_density_matrix().reshape(-1)).reshape(2, 2)
            oracle = np.real(np.trace(pauli("x").matrix @ rho_t))
            assert val == pytest.approx(oracle, abs=1e-8)
        # the analytic decay constant is 2 gamma
        assert traj.series("sx")[-1] == pytest.approx(math.exp(-2 * gamma * times[-1]), abs=1e-7)

    def test_trace_and_hermiticity_preserved(self):
        p = ModelParams.from_squeezing(r=1.0, delta_m=1.0, n_max=10, gamma_nv=0.1, gamma_m_s=0.1)
        from spinmech.models import build_squeezed_rabi

        h = build_squeezed_rabi(p)
        sig = p.signature()
        ch = [
            CollapseChannel(embed(fock_annihilation(10), 0, sig), p.gamma_m_s),
            CollapseChannel(embed(pauli("z"), 1, sig), p.gamma_nv[0]),
        ]
        traj = evolve_lindblad(h, ch, boson_spin_state(10, "d"), np.linspace(0, 3, 13))
        assert traj.diagnostics.trace_drift < 1e-8
        assert traj.diagnostics.min_eigenvalue > -1e-6
        rho = traj.final_state.data
        assert np.max(np.abs(rho - rho.conj().T)) < 1e-10

    def test_matches_unitary_when_dissipation_free(self):
        p = ModelParams(delta_m=1.0, delta_dg=0.5, n_max=5)
        h = build_total_hamiltonian(p)
        psi0 = boson_spin_state(5, "d")
        times = np.linspace(0, 6, 25)
        obs = {"sz": embed(pauli("z"), 1, p.signature()), "n": number_op(5, p.signature())}
        tu = evolve_unitary(h, psi0, times, obs)
        tl = evolve_lindblad(h, [], psi0, times, obs)
        for name in obs:
            assert np.max(np.abs(tu.series(name) - tl.series(name))) < 1e-7

    def test_negative_rate_rejected(self):
        with pytest.raises(InvalidDimensionError):
            CollapseChannel(pauli("z"), -0.1)

    def test_fixed_step_convergence_order(self):
        # halving the step at the default must move observables by < 1e-6
        p = ModelParams(delta_m=1.0, delta_dg=1.0, n_max=4, gamma_nv=0.05)
        from spinmech.models import build_squeezed_rabi

        h = build_squeezed_rabi(p)
        sig = p.signature()
        ch = [CollapseChannel(embed(pauli("z"), 1, sig), 0.05)]
        times = np.linspace(0, 5, 11)
        obs = {"sz": embed(pauli("z"), 1, sig)}
        coarse = evolve_lindblad(
            h, ch, boson_spin_state(4, "d"), times, obs,
            options=IntegratorOptions(mode="fixed", fixed_step=0.01),
        )
        fine = evolve_lindblad(
            h, ch, boson_spin_state(4, "d"), times, obs,
            options=IntegratorOptions(mode="fixed", fixed_step=0.005),
        )
        assert np.max(np.abs(coarse.series("sz") - fine.series("sz"))) < 1e-6

    def test_fixed_step_bit_reproducible(self):
        p = ModelParams(delta_m=1.0, n_max=4, gamma_m_s=0.1)
        h = build_total_hamiltonian(p)
        sig = p.signature()
        ch = [CollapseChannel(embed(fock_annihilation(4), 0, sig), 0.1)]
        times = np.linspace(0, 2, 9)
        opts = IntegratorOptions(mode="fixed", fixed_step=0.02)
        t1 = evolve_lindblad(h, ch, boson_spin_state(4, "d"), times, {"h": h}, options=opts)
        t2 = evolve_lindblad(h, ch, boson_spin_state(4, "d"), times, {"h": h}, options=opts)
        assert np.array_equal(t1.series("h"), t2.series("h"))


class TestChooseTruncation:
    def make_factory(self, drive):
        # boson driven toward a coherent state of amplitude ~drive
        def factory(n_max):
            sig = SpaceSignature((n_max + 1,))
            a = fock_annihilation(n_max)
            h = Operator(sig, 1j * drive * (a.dagger().matrix - a.matrix))
            psi0 = basis_state(sig, [0])
            times = np.linspace(0, 1.0, 21)
            return evolve_unitary(h, psi0, times, {"n": fock_number(n_max)})

        return factory

    def test_vacuum_accepts_minimal(self):
        def factory(n_max):
            sig = SpaceSignature((n_max + 1,))
            h = Operator(sig, fock_number(n_max).matrix)
            return evolve_unitary(h, basis_state(sig, [0]), np.linspace(0, 1, 5))

        assert choose_truncation(factory, 2, 1e-6) == 2

    def test_coherent_drive_needs_poisson_capacity(self):
        # displacement to alpha = 2 (mean 4); Poisson tail oracle says the
        # population above ~14 levels is below 1e-6
        from scipy.stats import poisson

        accepted = choose_truncation(self.make_factory(2.0), 4, 1e-6)
        assert accepted >= 14
        assert poisson.sf(accepted - 2, 4.0) < 1e-3  # top-two window is deep in the tail

    def test_unitary_vector_tail_matches_poisson(self):
        traj = self.make_factory(2.0)(32)
        # final state is |alpha = 2>; top-two population from the Poisson pmf
        from scipy.stats import poisson

        tail = traj.diagnostics.max_tail_population
        assert tail < poisson.sf(28, 4.0) * 10 + 1e-12

    def test_cap_reached_raises(self):
        with pytest.raises(TruncationError):
            choose_truncation(self.make_factory(20.0), 4, 1e-8, cap=16)
