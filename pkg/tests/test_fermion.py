import numpy as np
import pytest
import scipy.linalg

from conftest import random_antisymmetric
from gausslift import (
    ReflectionVector,
    build_majorana,
    cocycle_eta,
    complex_det,
    fermion_vacuum_amplitude,
    mat_exp,
    mw_reflection,
    pin_component_phase,
    reference_reflection,
    so_generator,
    split_cd,
    validate_group_element,
    wrap_angle,
)
from gausslift.errors import InputError
from gausslift.fermion import normalize_reflection

ROT = np.array([[0.0, 1.0], [-1.0, 0.0]])


def random_so(rng, n2, scale=1.0):
    return mat_exp(random_antisymmetric(rng, n2, scale=scale))


class TestMwReflection:
    def test_first_axis_single_mode(self, kf1):
        w = ReflectionVector(w=np.array([np.sqrt(2.0), 0.0]))
        np.testing.assert_allclose(mw_reflection(w, kf1), np.diag([1.0, -1.0]), atol=1e-15)

    def test_invariants_random_sweep(self, rng):
        from gausslift import Species, standard_kahler

        for n in (1, 2, 3):
            k = standard_kahler(n, Species.FERMION)
            for _ in range(30):
                w = normalize_reflection(rng.standard_normal(2 * n), k)
                m = mw_reflection(w, k)
                assert np.linalg.det(m) == pytest.approx(-1.0, abs=1e-12)
                np.testing.assert_allclose(m @ m, np.eye(2 * n), atol=1e-12)
                np.testing.assert_allclose(m @ k.metric @ m.T, k.metric, atol=1e-12)

    def test_zero_vector_rejected(self, kf1):
        with pytest.raises(InputError):
            mw_reflection(np.zeros(2), kf1)

    def test_unnormalized_rejected_unless_rescaled(self, kf1):
        with pytest.raises(InputError):
            mw_reflection(np.array([1.0, 0.0]), kf1)
        m = mw_reflection(np.array([1.0, 0.0]), kf1, rescale=True)
        np.testing.assert_allclose(m @ m, np.eye(2), atol=1e-14)

    def test_bosonic_structure_rejected(self, k1):
        with pytest.raises(InputError):
            mw_reflection(np.array([np.sqrt(2.0), 0.0]), k1)


class TestSoGenerator:
    def test_round_trip(self, rng):
        for n2 in (2, 4, 6):
            m = random_so(rng, n2, scale=2.0)
            gen = so_generator(m)
            np.testing.assert_allclose(gen, -gen.T, atol=1e-12)
            np.testing.assert_allclose(mat_exp(gen), m, atol=1e-9)

    def test_half_turn_pairing(self):
        m = np.diag([-1.0, -1.0, 1.0, 1.0])
        gen = so_generator(m)
        np.testing.assert_allclose(mat_exp(gen), m, atol=1e-10)

    def test_reflection_rejected(self):
        with pytest.raises(InputError):
            so_generator(np.diag([1.0, -1.0]))


class TestVacuumAmplitude:
    def test_zero_generator(self):
        assert fermion_vacuum_amplitude(np.zeros((2, 2))) == pytest.approx(1.0)

    def test_full_turn_gives_minus_one(self):
        assert fermion_vacuum_amplitude(2 * np.pi * ROT) == pytest.approx(-1.0, abs=1e-12)

    def test_squared_amplitude_identity(self, rng, kf2):
        rep = build_majorana(2)
        for _ in range(10):
            h = random_antisymmetric(rng, 4, scale=1.0)
            amp = fermion_vacuum_amplitude(h, rep)
            c, _ = split_cd(mat_exp(h), kf2)
            assert amp**2 == pytest.approx(complex_det(c, kf2.j), abs=1e-8)

    def test_anticommutator_guard(self):
        rep = build_majorana(3)
        assert rep.anticommutator_residual() < 1e-10

    def test_mode_count_guard(self):
        with pytest.raises(InputError):
            build_majorana(6)


class TestPinComponentPhase:
    def test_identity(self, kf2):
        w = reference_reflection(kf2)
        assert pin_component_phase(np.eye(4), w, kf2) == pytest.approx(1.0)

    def test_reflection_itself(self, kf2):
        w = reference_reflection(kf2)
        m = mw_reflection(w, kf2)
        assert pin_component_phase(m, w, kf2) == pytest.approx(1.0, abs=1e-12)

    def test_special_orthogonal_vs_oracle(self, rng):
        from gausslift import Species, standard_kahler

        for n in (1, 2, 3):
            k = standard_kahler(n, Species.FERMION)
            rep = build_majorana(n)
            w = reference_reflection(k)
            for _ in range(5):
                m = random_so(rng, 2 * n)
                phase = pin_component_phase(m, w, k)
                amp = fermion_vacuum_amplitude(so_generator(m), rep)
                assert phase == pytest.approx(amp / abs(amp), abs=1e-8)

    def test_other_component_vs_oracle(self, rng, kf2):
        rep = build_majorana(2)
        w = reference_reflection(kf2)
        mw = mw_reflection(w, kf2)
        for _ in range(10):
            m = mw @ random_so(rng, 4)
            assert np.linalg.det(m) == pytest.approx(-1.0, abs=1e-10)
            phase = pin_component_phase(m, w, kf2)
            amp = fermion_vacuum_amplitude(so_generator(mw @ m), rep)
            assert phase == pytest.approx(amp / abs(amp), abs=1e-8)

    def test_product_of_reflected_elements_closes(self, rng, kf2):
        # operator product of two det = -1 chains lands over det = +1 and its
        # measured phase squares to the circle phase of the product matrix
        rep = build_majorana(2)
        w = reference_reflection(kf2)
        mw = mw_reflection(w, kf2)
        w_op = rep.linear_operator(w.w)
        for _ in range(5):
            m1 = mw @ random_so(rng, 4, scale=0.8)
            m2 = mw @ random_so(rng, 4, scale=0.8)
            assert np.linalg.det(m1 @ m2) == pytest.approx(1.0, abs=1e-10)
            op1 = w_op @ scipy.linalg.expm(rep.quadratic_operator(so_generator(mw @ m1)))
            op2 = w_op @ scipy.linalg.expm(rep.quadratic_operator(so_generator(mw @ m2)))
            amp = np.vdot(rep.vacuum, op1 @ (op2 @ rep.vacuum))
            assert abs(amp) > 1e-12
            phase = amp / abs(amp)
            c, _ = split_cd(m1 @ m2, kf2)
            circle = complex_det(c, kf2.j)
            assert phase**2 == pytest.approx(circle / abs(circle), abs=1e-8)
            # the chain also realizes the product matrix on the quadratures
            prod = op1 @ op2
            for a in range(4):
                moved = prod.conj().T @ rep.xi[a] @ prod
                target = sum((m1 @ m2)[a, b] * rep.xi[b] for b in range(4))
                assert np.max(np.abs(moved - target)) < 1e-9

    def test_near_zero_determinant_margin_guard(self, kf2):
        w = reference_reflection(kf2)
        with pytest.raises(InputError):
            pin_component_phase(0.5 * np.eye(4), w, kf2)


class TestFermionCocyclePaths:
    def test_eta_reproduces_oracle_ratio(self, rng):
        from gausslift import Species, standard_kahler

        for n in (1, 2, 3):
            k = standard_kahler(n, Species.FERMION)
            rep = build_majorana(n)
            for _ in range(4):
                h1 = random_antisymmetric(rng, 2 * n, scale=0.8)
                h2 = random_antisymmetric(rng, 2 * n, scale=0.8)
                op1 = scipy.linalg.expm(rep.quadratic_operator(h1))
                op2 = scipy.linalg.expm(rep.quadratic_operator(h2))
                a1 = np.vdot(rep.vacuum, op1 @ rep.vacuum)
                a2 = np.vdot(rep.vacuum, op2 @ rep.vacuum)
                a12 = np.vdot(rep.vacuum, op1 @ (op2 @ rep.vacuum))
                eta = cocycle_eta(mat_exp(h1), mat_exp(h2), k)
                ratio = (a12 / abs(a12)) / ((a1 / abs(a1)) * (a2 / abs(a2)))
                assert wrap_angle(np.angle(ratio) - eta / 2.0) == pytest.approx(
                    0.0, abs=1e-8
                )

    def test_reflected_times_so_is_orthogonal(self, rng, kf2):
        w = reference_reflection(kf2)
        mw = mw_reflection(w, kf2)
        m = mw @ random_so(rng, 4)
        ok, _ = validate_group_element(m, kf2, tol=1e-10)
        assert ok
