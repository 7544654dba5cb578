import numpy as np
import pytest

from conftest import FIG2_F, FIG2_STABLE, random_symmetric
from gausslift import (
    QuadraticHamiltonian,
    alpha_beta,
    build_fock,
    gqh_overlap_analytic,
    ig_multiply,
    lift_from_gqh,
    mat_exp,
    phi1_entire,
    sigma_map,
    vacuum_amplitude_gqh,
    vacuum_phase_stable,
    vacuum_phase_tracked,
    wrap_angle,
    z_from_hf,
)
from gausslift.errors import (
    InputError,
    ResolventSingularError,
    SpectrumOnCutError,
)

ROT = np.array([[0.0, 1.0], [-1.0, 0.0]])


class TestQuadraticHamiltonian:
    def test_symmetry_enforced(self):
        with pytest.raises(InputError):
            QuadraticHamiltonian(h=np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_fermion_antisymmetry(self):
        from gausslift import Species

        QuadraticHamiltonian(h=0.3 * ROT, species=Species.FERMION)
        with pytest.raises(InputError):
            QuadraticHamiltonian(h=np.eye(2), species=Species.FERMION)

    def test_fermion_rejects_linear_term(self):
        from gausslift import Species

        with pytest.raises(InputError):
            QuadraticHamiltonian(h=0.3 * ROT, f=np.array([1.0, 0.0]), species=Species.FERMION)

    def test_scaled(self):
        ham = QuadraticHamiltonian(h=np.eye(2), f=np.array([1.0, 2.0]), c=0.5)
        s = ham.scaled(2.0)
        np.testing.assert_allclose(s.h, 2.0 * np.eye(2), atol=0)
        np.testing.assert_allclose(s.f, [2.0, 4.0], atol=0)
        assert s.c == 1.0


class TestAlphaBeta:
    def test_at_zero(self):
        a, b = alpha_beta(np.zeros((2, 2)))
        np.testing.assert_allclose(a, np.eye(2), atol=1e-14)
        np.testing.assert_allclose(b, np.zeros((2, 2)), atol=1e-14)

    def test_alpha_scalar_formula(self):
        a, _ = alpha_beta(np.diag([1.0, -1.0]))
        expected = np.diag([1.0 / (np.e - 1.0), -1.0 / (np.exp(-1.0) - 1.0)])
        np.testing.assert_allclose(a, expected, atol=1e-12)

    def test_alpha_inverts_phi1(self, rng):
        k = random_symmetric(rng, 4, scale=2.0)
        a, _ = alpha_beta(k)
        np.testing.assert_allclose(a @ phi1_entire(k), np.eye(4), atol=1e-10)

    def test_beta_nilpotent_truncates(self):
        # series of (K - sinh K)/(4(I - cosh K)) starts at +K/12; a nilpotent
        # argument truncates it exactly
        k = np.array([[0.0, 1.0], [0.0, 0.0]])
        _, b = alpha_beta(k)
        np.testing.assert_allclose(b, k / 12.0, atol=1e-15)

    def test_beta_scalar_against_direct_evaluation(self):
        for x in (0.3, 1.5, 3.5):
            _, b = alpha_beta(np.diag([x, -x]))
            direct = 0.25 * (x - np.sinh(x)) / (1.0 - np.cosh(x))
            np.testing.assert_allclose(b, np.diag([direct, -direct]), atol=1e-12)

    def test_beta_large_spectrum_direct_branch(self):
        x = 5.0  # beyond the series switch radius, still off the poles
        _, b = alpha_beta(np.diag([x, -x]))
        direct = 0.25 * (x - np.sinh(x)) / (1.0 - np.cosh(x))
        np.testing.assert_allclose(b, np.diag([direct, -direct]), atol=1e-10)

    def test_alpha_branch_error_at_resonance(self):
        with pytest.raises(ResolventSingularError):
            alpha_beta(2.0 * np.pi * ROT)


class TestZFromHF:
    def test_zero_force(self, rng, k1):
        h = random_symmetric(rng, 2)
        np.testing.assert_allclose(z_from_hf(h, np.zeros(2), k1), np.zeros(2), atol=0)

    def test_pure_displacement_limit(self, k1):
        # h = 0: z = Omega f (the entire form at K = 0)
        f = np.array([1.0, 0.0])
        np.testing.assert_allclose(z_from_hf(np.zeros((2, 2)), f, k1), [0.0, -1.0], atol=1e-15)

    def test_pure_displacement_oracle_direction(self, k1):
        # e^{-i q} shifts p by -1: frozen from the canonical commutator
        rep = build_fock(1, 30)
        ham = QuadraticHamiltonian(h=np.zeros((2, 2)), f=np.array([1.0, 0.0]))
        st = rep._evolution(ham).state(1.0)
        q, p = rep.quadratures
        assert np.real(np.vdot(st, p @ st)) == pytest.approx(-1.0, abs=1e-10)

    def test_entire_form_matches_inverse_form(self, rng, k2):
        for _ in range(10):
            h = random_symmetric(rng, 4, scale=1.0)
            if np.linalg.cond(h) > 1e6:
                continue
            f = rng.standard_normal(4)
            z = z_from_hf(h, f, k2)
            direct = np.linalg.inv(h) @ (mat_exp(-k2.omega @ h) - np.eye(4)).T @ f
            np.testing.assert_allclose(z, direct, atol=1e-10)

    def test_fig2_oracle_displacement(self, k1):
        rep = build_fock(1, 80)
        ham = QuadraticHamiltonian(h=FIG2_STABLE[0], f=FIG2_F)
        st = rep._evolution(ham).state(1.0)
        q, p = rep.quadratures
        oracle = np.array(
            [np.real(np.vdot(st, q @ st)), np.real(np.vdot(st, p @ st))]
        )
        np.testing.assert_allclose(z_from_hf(FIG2_STABLE[0], FIG2_F, k1), oracle, atol=1e-6)


class TestSigmaMap:
    def test_zero_generator(self, k1):
        np.testing.assert_allclose(sigma_map(np.zeros((2, 2)), k1), np.zeros((2, 2)), atol=1e-14)

    def test_small_squeeze_matches_oracle_phase_difference(self, k1):
        # finite-size check of arg<0|e^{K+f}|0> - arg<0|e^K|0> = z omega Sigma z / 4
        rep = build_fock(1, 60)
        eps = 0.05
        h = k1.omega_inv @ (eps * np.diag([1.0, -1.0]))
        f = np.array([0.8, 0.3])
        with_f = vacuum_amplitude_gqh(QuadraticHamiltonian(h=h, f=f), 1.0, rep)
        without = vacuum_amplitude_gqh(QuadraticHamiltonian(h=h), 1.0, rep)
        kgen = k1.omega @ h
        z = z_from_hf(h, f, k1)
        predicted = 0.25 * z @ k1.omega_inv @ (sigma_map(kgen, k1) @ z)
        measured = wrap_angle(np.angle(with_f) - np.angle(without))
        assert measured == pytest.approx(predicted, abs=1e-8)

    def test_fig2_oracle_phase_difference(self, k1):
        rep = build_fock(1, 80)
        h = FIG2_STABLE[0]
        with_f = vacuum_amplitude_gqh(QuadraticHamiltonian(h=h, f=FIG2_F), 1.0, rep)
        without = vacuum_amplitude_gqh(QuadraticHamiltonian(h=h), 1.0, rep)
        kgen = k1.omega @ h
        z = z_from_hf(h, FIG2_F, k1)
        predicted = 0.25 * z @ k1.omega_inv @ (sigma_map(kgen, k1) @ z)
        assert wrap_angle(np.angle(with_f) - np.angle(without)) == pytest.approx(
            predicted, abs=1e-6
        )

    def test_first_term_gram_form_at_standard_point(self, rng, k2):
        # 2 (I + e^K e^{K^T})^{-1} - I agrees with the J-conjugation form of
        # the resolvent term at the standard structure
        from conftest import random_symmetric
        from gausslift.generator import _beta_function

        h = random_symmetric(rng, 4, scale=1.2)
        kgen = k2.omega @ h
        m = mat_exp(kgen)
        gram_form = 2.0 * np.linalg.inv(np.eye(4) + m @ m.T) - np.eye(4)
        sigma = sigma_map(kgen, k2)
        np.testing.assert_allclose(sigma - 4.0 * _beta_function(kgen), gram_form, atol=1e-10)


class TestTrackedPhase:
    def test_zero(self, k1):
        assert vacuum_phase_tracked(np.zeros((2, 2)), k1) == 1.0

    def test_full_turn_gives_minus_one(self, k1):
        assert vacuum_phase_tracked(2 * np.pi * ROT, k1) == pytest.approx(-1.0, abs=1e-10)

    def test_double_turn_gives_plus_one(self, k1):
        assert vacuum_phase_tracked(4 * np.pi * ROT, k1) == pytest.approx(1.0, abs=1e-10)

    def test_step_doubling_converged(self, k1, rng):
        h = random_symmetric(rng, 2, scale=1.0)
        kgen = np.asarray(k1.omega) @ h
        a = vacuum_phase_tracked(kgen, k1, steps=64)
        b = vacuum_phase_tracked(kgen, k1, steps=128)
        assert abs(a - b) < 1e-10

    def test_fig2_oracle(self, k1):
        rep = build_fock(1, 80)
        amp = vacuum_amplitude_gqh(QuadraticHamiltonian(h=FIG2_STABLE[0]), 1.0, rep)
        tracked = vacuum_phase_tracked(k1.omega @ FIG2_STABLE[0], k1)
        assert tracked == pytest.approx(amp / abs(amp), abs=1e-7)


class TestStablePhase:
    def test_rotation_generator(self, k1):
        for t in (0.4, 1.0, 2.9):
            assert vacuum_phase_stable(t * np.asarray(k1.j), k1) == pytest.approx(
                np.exp(-0.5j * t), abs=1e-12
            )

    def test_zero_rejected(self, k1):
        with pytest.raises(SpectrumOnCutError):
            vacuum_phase_stable(np.zeros((2, 2)), k1)

    def test_real_spectrum_rejected(self, k1):
        with pytest.raises(SpectrumOnCutError):
            vacuum_phase_stable(np.diag([1.0, -1.0]), k1)

    def test_matches_tracked_on_stable_generators(self, rng, k2):
        for sign in (1.0, -1.0):
            for _ in range(5):
                a = rng.standard_normal((4, 4))
                h = sign * (a @ a.T / 4.0 + 0.3 * np.eye(4))
                kgen = k2.omega @ h
                stable = vacuum_phase_stable(kgen, k2)
                tracked = vacuum_phase_tracked(kgen, k2)
                assert abs(stable - tracked) < 1e-8


class TestLiftFromGQH:
    def test_scalar_only(self, k1):
        lifted = lift_from_gqh(QuadraticHamiltonian(h=np.zeros((2, 2)), c=np.pi), k1)
        np.testing.assert_allclose(lifted.m, np.eye(2), atol=0)
        np.testing.assert_allclose(lifted.z, np.zeros(2), atol=0)
        assert lifted.psi == pytest.approx(-1.0, abs=1e-12)

    def test_full_rotation_deck_phase(self, k1):
        # h = t I at t = 2 pi: the represented operator is -identity
        lifted = lift_from_gqh(QuadraticHamiltonian(h=2 * np.pi * np.eye(2)), k1)
        np.testing.assert_allclose(lifted.m, np.eye(2), atol=1e-10)
        assert lifted.psi == pytest.approx(-1.0, abs=1e-9)

    def test_pure_quadratic_reduces_to_conjugated_tracked_phase(self, rng, k1):
        h = random_symmetric(rng, 2)
        lifted = lift_from_gqh(QuadraticHamiltonian(h=h), k1)
        np.testing.assert_allclose(lifted.z, np.zeros(2), atol=0)
        tracked = vacuum_phase_tracked(k1.omega @ h, k1)
        assert lifted.psi == pytest.approx(np.conj(tracked), abs=1e-12)

    def test_fig2_phase_and_modulus_against_oracle(self, k1):
        rep = build_fock(1, 80)
        ham = QuadraticHamiltonian(h=FIG2_STABLE[0], f=FIG2_F)
        amp = vacuum_amplitude_gqh(ham, 1.0, rep)
        lifted = lift_from_gqh(ham, k1)
        assert np.conj(lifted.psi) == pytest.approx(amp / abs(amp), abs=1e-6)
        analytic = gqh_overlap_analytic(ham, k1)
        assert analytic == pytest.approx(amp, abs=1e-6)

    def test_auto_method(self, k1):
        ham = QuadraticHamiltonian(h=0.8 * np.eye(2))
        a = lift_from_gqh(ham, k1, method="auto")
        b = lift_from_gqh(ham, k1, method="tracked")
        assert a.psi == pytest.approx(b.psi, abs=1e-9)

    def test_unknown_method_rejected(self, k1):
        with pytest.raises(InputError):
            lift_from_gqh(QuadraticHamiltonian(h=np.eye(2)), k1, method="guess")

    def test_representation_property(self, rng, k1):
        # the lift is a homomorphism: lift(H1) lift(H2) realizes U1 U2 in all
        # three slots (matrix, displacement, phase)
        rep = build_fock(1, 60)
        q, p = rep.quadratures
        for _ in range(5):
            from conftest import random_gqh

            h1 = random_gqh(rng, 1, h_scale=0.8)
            h2 = random_gqh(rng, 1, h_scale=0.8)
            prod = ig_multiply(lift_from_gqh(h1, k1), lift_from_gqh(h2, k1))
            ev1 = rep._evolution(h1)
            st = ev1._v @ (np.exp(-1j * ev1._w) * (ev1._v.conj().T
                                                   @ rep._evolution(h2).state(1.0)))
            amp12 = np.vdot(rep.vacuum, st)
            m_oracle = mat_exp(k1.omega @ h1.h) @ mat_exp(k1.omega @ h2.h)
            z_oracle = np.array(
                [np.real(np.vdot(st, q @ st)), np.real(np.vdot(st, p @ st))]
            )
            np.testing.assert_allclose(prod.m, m_oracle, atol=1e-8)
            np.testing.assert_allclose(prod.z, z_oracle, atol=1e-8)
            assert np.conj(prod.psi) == pytest.approx(amp12 / abs(amp12), abs=1e-6)
