import math

import numpy as np
import pytest
from scipy.linalg import expm

from spinmech.errors import InvalidDimensionError, TruncationError, UnsupportedConfigurationError
from spinmech.hilbert import (
    boson_spin_state,
    embed,
    fock_annihilation,
    fock_number,
    pauli,
    partial_trace,
    spin_basis_state,
)
from spinmech.models import (
    ModelParams,
    SqueezeParams,
    build_correction,
    build_squeezed_rabi,
    build_time_dependent,
    build_total_hamiltonian,
    derive_squeeze_params,
)
from spinmech.transforms import (
    cat_alpha,
    coherent_state,
    conjugate,
    ghz_target,
    polaron_transform,
    schrieffer_wolff_check,
    squeeze_operator,
    target_cat_state,
)


class TestSqueezeOperator:
    def test_r_zero_is_identity(self):
        u = squeeze_operator(0.0, 8).unitary.matrix
        assert np.allclose(u, np.eye(9))

    def test_expm_matches_hermitian_eigendecomposition(self):
        # scaling-and-squaring vs eigendecomposition of the Hermitian i*gen
        r, n_max = 0.6, 30
        a = fock_annihilation(n_max).matrix
        gen = 0.5 * r * (a @ a - a.conj().T @ a.conj().T)
        w, v = np.linalg.eigh(1j * gen)
        via_eig = v @ np.diag(np.exp(-1j * w)) @ v.conj().T
        assert np.max(np.abs(squeeze_operator(r, n_max).unitary.matrix - via_eig)) < 1e-10

    def test_bogoliubov_relation_interior(self):
        # U+ a U = a cosh r - a+ sinh r; valid only where squeezed levels fit,
        # so compare on the bottom fifth of the ladder
        r, n_max = 0.5, 60
        u = squeeze_operator(r, n_max).unitary.matrix
        a = fock_annihilation(n_max).matrix
        lhs = u.conj().T @ a @ u
        rhs = math.cosh(r) * a - math.sinh(r) * a.conj().T
        k = (n_max + 1) // 5
        assert np.max(np.abs((lhs - rhs)[:k, :k])) < 1e-6

    def test_squeezed_vacuum_statistics(self):
        r, n_max = 0.8, 40
        u = squeeze_operator(r, n_max).unitary.matrix
        vac = np.zeros(n_max + 1)
        vac[0] = 1.0
        sq_vac = u @ vac
        # even-only amplitudes
        assert np.max(np.abs(sq_vac[1::2])) < 1e-12
        n_mean = np.real(sq_vac.conj() @ fock_number(n_max).matrix @ sq_vac)
        assert n_mean == pytest.approx(math.sinh(r) ** 2, abs=1e-6)

    def test_inverse_composition(self):
        r, n_max = 0.5, 60
        u1 = squeeze_operator(r, n_max).unitary.matrix
        u2 = squeeze_operator(-r, n_max).unitary.matrix
        k = (n_max + 1) // 2
        assert np.max(np.abs((u1 @ u2 - np.eye(n_max + 1))[:k, :k])) < 1e-8

    def test_truncation_guard(self):
        with pytest.raises(TruncationError):
            squeeze_operator(3.0, 10)


class TestConjugate:
    def test_identity_transform(self):
        p = ModelParams(delta_m=2.0, n_max=4)
        h = build_total_hamiltonian(p)
        frame = squeeze_operator(0.0, 4, p.signature())
        assert np.allclose(conjugate(h, frame).matrix, h.matrix)

    def test_spectrum_invariant(self):
        p = ModelParams.from_squeezing(r=0.4, delta_m=3.0, n_max=12)
        h = build_total_hamiltonian(p)
        frame = squeeze_operator(0.4, 12, p.signature())
        before = np.sort(np.linalg.eigvalsh(h.matrix))
        after = np.sort(np.linalg.eigvalsh(conjugate(h, frame).matrix))
        assert np.max(np.abs(before - after)) < 1e-8

    def test_squeeze_frame_equivalence(self):
        # U H_total U+ = H_rabi + H_corr + (Delta_m - delta_m)/2, checked on the
        # interior block where truncation has not corrupted the transform
        r, n_max, win = 0.4, 60, 10
        p = ModelParams.from_squeezing(r=r, delta_m=10.0, n_max=n_max)
        sq = derive_squeeze_params(p)
        frame = squeeze_operator(sq.r, n_max, p.signature())
        lhs = conjugate(build_total_hamiltonian(p), frame).matrix
        rhs = build_squeezed_rabi(p, sq).matrix + build_correction(p, sq).matrix
        shift = (sq.delta_m_eff - p.delta_m) / 2.0
        w = 2 * win
        dev = lhs[:w, :w] - rhs[:w, :w] - shift * np.eye(w)
        assert np.max(np.abs(dev)) < 1e-6

    def test_r0_relates_total_and_rabi_forms(self):
        # at r = 0 the squeezed Rabi plus correction equals the bare Hamiltonian
        p = ModelParams(delta_m=5.0, n_max=8)
        sq = derive_squeeze_params(p)
        lhs = build_squeezed_rabi(p, sq).matrix + build_correction(p, sq).matrix
        assert np.allclose(lhs, build_total_hamiltonian(p).matrix, atol=1e-12)


class TestSchriefferWolff:
    def test_zero_coupling_zero_residual(self):
        p = ModelParams(delta_m=20.0, lambda_j=0.0, n_spins=2, n_max=6)
        sq = SqueezeParams(r=0.0, delta_m_eff=20.0, lambda_eff=(0.0, 0.0))
        rep = schrieffer_wolff_check(p, sq)
        assert rep.residual < 1e-12

    def test_extracted_coupling_matches_exact_reduction(self):
        # coefficient-projection oracle: the conjugated Hamiltonian carries
        # sx sx with per-pair weight -lambda_eff^2/Delta_m (opposite sign to
        # the printed effective model; the reduction itself is exact)
        p = ModelParams.from_squeezing(r=0.5, delta_m=40.0, n_spins=2, n_max=14)
        sq = derive_squeeze_params(p)
        rep = schrieffer_wolff_check(p, sq)
        expected = -sq.lambda_eff[0] * sq.lambda_eff[1] / sq.delta_m_eff
        assert rep.sigma_xx_coefficient == pytest.approx(expected, rel=1e-6)

    def test_residual_ratio_is_quadratic_not_cubic(self):
        # the polaron series terminates at second order, so the only residual
        # against the printed model is the sign-mismatched 2 Lambda sx sx term,
        # which scales as eta^2: halving eta divides the residual by 4 exactly
        p = ModelParams.from_squeezing(r=0.3, delta_m=30.0, n_spins=2, n_max=12)
        rep = schrieffer_wolff_check(p)
        assert rep.ratio == pytest.approx(4.0, rel=1e-6)

    def test_large_eta_rejected(self):
        p = ModelParams.from_squeezing(r=1.25, delta_m=12.0, n_spins=2, n_max=8)
        with pytest.raises(UnsupportedConfigurationError):
            schrieffer_wolff_check(p)


class TestCoherentState:
    def test_alpha_zero_is_vacuum(self):
        st = coherent_state(0.0, 6)
        assert st.data[0] == pytest.approx(1.0)
        assert np.max(np.abs(st.data[1:])) == 0.0

    @pytest.mark.parametrize("alpha", [0.5, 1.5 + 0.5j, -2.0j])
    def test_expectation_oracles(self, alpha):
        n_max = 40
        st = coherent_state(alpha, n_max)
        a = fock_annihilation(n_max).matrix
        mean_a = np.vdot(st.data, a @ st.data)
        mean_n = np.real(np.vdot(st.data, fock_number(n_max).matrix @ st.data))
        assert mean_a == pytest.approx(alpha, abs=1e-8)
        assert mean_n == pytest.approx(abs(alpha) ** 2, abs=1e-8)

    def test_truncation_error(self):
        with pytest.raises(TruncationError):
            coherent_state(4.0, 10)


class TestCatAlpha:
    def test_zero_time(self):
        p = ModelParams(delta_m=10.0)
        assert cat_alpha(p, lambda t: 1.25 * math.tanh(t / 2), 0.0) == 0.0

    def test_constant_schedule_closed_form(self):
        r, delta_m = 0.9, 10.0
        p = ModelParams.from_squeezing(r=r, delta_m=delta_m)
        dm = delta_m / math.cosh(2 * r)
        for t in (0.3, 1.7, 4.0):
            closed = (math.exp(r) / 2j) * (1 - np.exp(-1j * dm * t)) / (1j * dm)
            assert cat_alpha(p, lambda _t: r, t) == pytest.approx(closed, abs=1e-8)

    def test_matches_full_evolution_displacement(self):
        # full-integration oracle: evolve the ideal ramped Hamiltonian and read
        # the branch displacement through <sx a>, exact for the cat solution
        from spinmech.dynamics import evolve_unitary

        n_max = 24
        p = ModelParams(delta_m=10.0, n_max=n_max)
        sched = lambda t: 1.25 * math.tanh(t / 2)
        h = build_time_dependent(p, sched, mode="ideal")
        psi0 = boson_spin_state(n_max, "g")
        t_f = 6.0
        sig = p.signature()
        sxa = embed(fock_annihilation(n_max), 0, sig) @ embed(pauli("x"), 1, sig)
        traj = evolve_unitary(h, psi0, np.linspace(0, t_f, 13), {"sxa": sxa})
        alpha_num = complex(traj.series("sxa")[-1])
        alpha_quad = cat_alpha(p, sched, t_f)
        assert abs(alpha_num - alpha_quad) / abs(alpha_quad) < 0.02


class TestTargetStates:
    def test_cat_alpha_zero_collapses_to_ground(self):
        st = target_cat_state(0.0, 8)
        # |0>(|+x> - |-x>)/norm points along |0>|g>
        expected = boson_spin_state(8, "g").data
        overlap = abs(np.vdot(expected, st.data))
        assert overlap == pytest.approx(1.0, abs=1e-12)

    def test_large_alpha_branch_overlap(self):
        st = target_cat_state(3.2, 40)
        plus = coherent_state(3.2, 40).data
        minus = coherent_state(-3.2, 40).data
        assert abs(np.vdot(plus, minus)) < 1e-7
        assert np.linalg.norm(st.data) == pytest.approx(1.0, abs=1e-12)

    def test_ghz_form(self):
        st = ghz_target(2)
        gg = spin_basis_state("gg").data
        dd = spin_basis_state("dd").data
        expected = (np.exp(-1j * math.pi / 4) * gg + np.exp(1j * math.pi / 4) * dd) / math.sqrt(2)
        assert np.allclose(st.data, expected)
        from spinmech.metrics import concurrence

        assert concurrence(st.to_density()) == pytest.approx(1.0, abs=1e-10)

    def test_ghz_marginal_maximally_mixed(self):
        st = ghz_target(3)
        red = partial_trace(st, [1])
        assert np.allclose(red.data, np.eye(2) / 2, atol=1e-12)

    def test_ghz_needs_two(self):
        with pytest.raises(InvalidDimensionError):
            ghz_target(1)
