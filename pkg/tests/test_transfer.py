import math

import numpy as np
import pytest

from perichain.linalg2 import IDENTITY2, SIGMA_Y, Mat2, eig2, power_scaled
from perichain.transfer import (
    SYMMETRY_UNITARY,
    InBandError,
    PeriodicPotential,
    SpectralClass,
    classify,
    localization_length,
    lyapunov,
    site_transfer,
    symmetry_conjugate,
    symmetry_conjugate_via_rotation,
    unit_cell_transfer,
    unit_cell_transfer_with_derivative,
)

TWO_SITE = PeriodicPotential([-0.5, 0.5])
UNIFORM = PeriodicPotential([0.0])


def random_potential(rng, max_q=5):
    q = int(rng.integers(1, max_q + 1))
    return PeriodicPotential(rng.uniform(-1.0, 1.0, q).tolist())


def random_energy(rng, pot):
    return float(rng.uniform(min(pot.eps) - 2.5, max(pot.eps) + 2.5))


class TestPeriodicPotential:
    def test_basic_fields(self):
        assert TWO_SITE.q == 2
        assert TWO_SITE.eps == (-0.5, 0.5)

    def test_rejects_empty_and_non_finite(self):
        with pytest.raises(ValueError):
            PeriodicPotential([])
        with pytest.raises(ValueError):
            PeriodicPotential([0.0, float("nan")])

    def test_shifted(self):
        assert PeriodicPotential([1.0, 2.0]).shifted(-1.0).eps == (0.0, 1.0)


class TestSiteTransfer:
    def test_on_site_resonance_is_rotation(self):
        for eps in (-1.3, 0.0, 2.7):
            m = site_transfer(eps, eps)
            assert (m - Mat2(0.0, -1.0, 1.0, 0.0)).max_abs() == 0.0

    def test_site_level_degeneracy_at_offset_two(self):
        m = site_transfer(2.5, 0.5)
        assert (m - Mat2(2.0, -1.0, 1.0, 0.0)).max_abs() == 0.0
        assert eig2(m).defective

    def test_determinant_exactly_one(self):
        rng = np.random.default_rng(10)
        for _ in range(100):
            x, y = rng.normal(size=2) * 3
            assert site_transfer(float(x), float(y)).det() == 1.0


class TestUnitCellTransfer:
    def test_single_site_cell(self):
        for energy in (-0.4, 1.9):
            m = unit_cell_transfer(UNIFORM, energy)
            assert (m - Mat2(energy, -1.0, 1.0, 0.0)).max_abs() == 0.0

    def test_two_site_hand_product(self):
        m = unit_cell_transfer(TWO_SITE, 0.0)
        assert (m - Mat2(-1.25, 0.5, 0.5, -1.0)).max_abs() < 1e-15
        assert m.trace() == -2.25

    def test_two_site_trace_formula(self):
        # trace = (e - eps1)(e - eps2) - 2 for the two-site cell
        for energy in np.linspace(-3.0, 3.0, 13):
            tr = unit_cell_transfer(TWO_SITE, float(energy)).trace().real
            expected = (energy + 0.5) * (energy - 0.5) - 2.0
            assert abs(tr - expected) < 1e-13

    def test_determinant_one_for_random_cells(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            pot = random_potential(rng)
            cell = unit_cell_transfer(pot, random_energy(rng, pot))
            assert abs(cell.det() - 1.0) <= 1e-12 * max(1.0, cell.max_abs() ** 2)

    def test_energy_derivative_matches_finite_difference(self):
        rng = np.random.default_rng(12)
        step = 1e-6
        for _ in range(20):
            pot = random_potential(rng)
            energy = random_energy(rng, pot)
            _, deriv = unit_cell_transfer_with_derivative(pot, energy)
            upper = unit_cell_transfer(pot, energy + step)
            lower = unit_cell_transfer(pot, energy - step)
            fd = (upper - lower) * (0.5 / step)
            assert (deriv - fd).max_abs() < 1e-6 * max(1.0, deriv.max_abs())


class TestSymmetry:
    def test_rotation_is_unitary_and_diagonalizes_sigma_y(self):
        u = SYMMETRY_UNITARY
        assert (u @ u.dagger() - IDENTITY2).max_abs() < 1e-14
        rotated = u.dagger() @ SIGMA_Y @ u
        assert abs(rotated.a12) < 1e-15 and abs(rotated.a21) < 1e-15

    def test_collapsed_form_matches_rotation_sandwich(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            entries = rng.normal(size=4) + 1j * rng.normal(size=4)
            m = Mat2(*[complex(z) for z in entries])
            direct = symmetry_conjugate(m)
            sandwich = symmetry_conjugate_via_rotation(m)
            assert (direct - sandwich).max_abs() < 1e-14

    def test_fixes_transfer_matrices(self):
        m = site_transfer(0.7, 0.0)
        assert (symmetry_conjugate(m) - m).max_abs() == 0.0
        rng = np.random.default_rng(14)
        for _ in range(200):
            pot = random_potential(rng)
            cell = unit_cell_transfer(pot, random_energy(rng, pot))
            assert (symmetry_conjugate(cell) - cell).max_abs() == 0.0

    def test_flips_imaginary_scalar(self):
        m = Mat2(1j, 0.0, 0.0, 1j)
        flipped = symmetry_conjugate(m)
        assert (flipped - Mat2(-1j, 0.0, 0.0, -1j)).max_abs() < 1e-15
        assert (flipped - m).max_abs() > 1.0


class TestClassify:
    def test_inside_band_is_broken(self):
        verdict = classify(TWO_SITE, 1.0)
        assert verdict.tag is SpectralClass.S_BROKEN
        assert verdict.discriminant == pytest.approx(-0.609375, abs=1e-14)

    def test_inside_band_eigenvalues(self):
        # trace -1.25, unit determinant: -0.625 +- i sqrt(0.609375)
        pair = eig2(unit_cell_transfer(TWO_SITE, 1.0))
        assert pair.lambda_plus == pytest.approx(
            -0.625 + 0.7806247497997998j, abs=1e-14
        )
        assert pair.lambda_minus == pytest.approx(
            -0.625 - 0.7806247497997998j, abs=1e-14
        )
        assert abs(pair.lambda_plus) == pytest.approx(1.0, abs=1e-14)

    def test_edge_is_exceptional(self):
        verdict = classify(TWO_SITE, 0.5)
        assert verdict.tag is SpectralClass.EXCEPTIONAL_POINT
        assert abs(verdict.discriminant) < 1e-14

    def test_gap_is_symmetric(self):
        verdict = classify(TWO_SITE, 0.0)
        assert verdict.tag is SpectralClass.S_SYMMETRIC
        assert verdict.discriminant == pytest.approx(0.265625, abs=1e-14)

    def test_band_touching_is_degenerate_not_exceptional(self):
        # doubled uniform cell: the unit-cell matrix at the touching is -I
        doubled = PeriodicPotential([0.0, 0.0])
        cell = unit_cell_transfer(doubled, 0.0)
        assert (cell - (-1.0 * IDENTITY2)).max_abs() == 0.0
        assert classify(doubled, 0.0).tag is SpectralClass.DEGENERATE_DIAGONALIZABLE

    def test_eigenvalue_dichotomy(self):
        rng = np.random.default_rng(15)
        for _ in range(500):
            pot = random_potential(rng)
            pair = eig2(unit_cell_transfer(pot, random_energy(rng, pot)))
            real_defect = max(abs(pair.lambda_plus.imag), abs(pair.lambda_minus.imag))
            conj_defect = abs(pair.lambda_plus - pair.lambda_minus.conjugate())
            assert min(real_defect, conj_defect) < 1e-10

    def test_broken_regime_unimodular_symmetric_regime_reciprocal(self):
        rng = np.random.default_rng(16)
        seen_broken = seen_symmetric = 0
        while seen_broken < 50 or seen_symmetric < 50:
            pot = random_potential(rng)
            energy = random_energy(rng, pot)
            verdict = classify(pot, energy)
            pair = eig2(unit_cell_transfer(pot, energy))
            if verdict.tag is SpectralClass.S_BROKEN:
                seen_broken += 1
                assert abs(abs(pair.lambda_plus) - 1.0) < 1e-10
                assert abs(abs(pair.lambda_minus) - 1.0) < 1e-10
            elif verdict.tag is SpectralClass.S_SYMMETRIC:
                seen_symmetric += 1
                assert abs(pair.lambda_plus.imag) < 1e-10
                assert abs(pair.lambda_plus * pair.lambda_minus - 1.0) < 1e-10

    def test_symmetry_action_on_eigenvectors(self):
        # the antilinear symmetry acts on vectors as conjugation: it fixes
        # eigenvectors (up to phase) in the symmetric regime and swaps the
        # pair in the broken regime
        rng = np.random.default_rng(17)
        checked = 0
        while checked < 100:
            pot = random_potential(rng)
            energy = random_energy(rng, pot)
            verdict = classify(pot, energy)
            pair = eig2(unit_cell_transfer(pot, energy))
            if pair.defective:
                continue

            def cross(u, v):
                return abs(u[0] * v[1] - u[1] * v[0])

            s_plus = (pair.v_plus[0].conjugate(), pair.v_plus[1].conjugate())
            if verdict.tag is SpectralClass.S_SYMMETRIC:
                assert cross(s_plus, pair.v_plus) < 1e-8
                checked += 1
            elif verdict.tag is SpectralClass.S_BROKEN:
                assert cross(s_plus, pair.v_minus) < 1e-8
                checked += 1


class TestLocalizationLength:
    def test_uniform_chain_closed_form(self):
        # trace 3: xi = 1 / (2 acosh(1.5))
        expected = 1.0 / (2.0 * math.acosh(1.5))
        assert localization_length(UNIFORM, 3.0) == pytest.approx(expected, rel=1e-14)

    def test_two_site_gap_value(self):
        # |tr|/2 = 1.125 at mu = 0
        expected = 2.0 / (2.0 * math.log(1.125 + math.sqrt(1.125**2 - 1.0)))
        got = localization_length(TWO_SITE, 0.0)
        assert got == pytest.approx(expected, rel=1e-14)
        assert got == pytest.approx(2.02047581265676, rel=1e-12)

    def test_inside_band_raises(self):
        with pytest.raises(InBandError):
            localization_length(UNIFORM, 1.0)
        with pytest.raises(InBandError):
            localization_length(UNIFORM, 2.0)  # exactly at the edge


class TestLyapunov:
    def test_uniform_chain_outside_band(self):
        assert abs(lyapunov(UNIFORM, 3.0, 10**6) - math.acosh(1.5)) < 1e-6

    def test_uniform_chain_inside_band(self):
        assert abs(lyapunov(UNIFORM, 0.0, 10**6)) < 1e-5

    def test_matches_localization_length(self):
        rng = np.random.default_rng(18)
        checked = 0
        while checked < 10:
            pot = random_potential(rng, max_q=3)
            mu = max(pot.eps) + float(rng.uniform(0.7, 2.0)) + 2.0
            try:
                xi = localization_length(pot, mu)
            except InBandError:
                continue
            rate = lyapunov(pot, mu, 10**6)
            assert abs(rate - pot.q / (2.0 * xi)) < 1e-6
            checked += 1

    def test_n_must_be_positive(self):
        with pytest.raises(ValueError):
            lyapunov(UNIFORM, 3.0, 0)


class TestExceptionalPointStructure:
    def test_linear_growth_at_band_edges(self):
        # at an edge the n-th power is (+-1)^n (I + n K) for a fixed nilpotent
        # direction K, so the normalized deviation is n-independent
        for edge in (-math.sqrt(4.25), -0.5, 0.5, math.sqrt(4.25)):
            cell = unit_cell_transfer(TWO_SITE, edge)
            sign = 1.0 if cell.trace().real > 0 else -1.0
            deviations = []
            for n in (16, 32):
                powered = power_scaled(cell, n).reconstruct()
                ident = (sign**n) * IDENTITY2
                deviations.append((powered - ident) * (1.0 / n))
            assert (deviations[0] - deviations[1]).max_abs() < 1e-6

    def test_edge_matrices_are_defective_with_unit_eigenvalue(self):
        for edge, sign in ((0.5, -1.0), (math.sqrt(4.25), 1.0)):
            pair = eig2(unit_cell_transfer(TWO_SITE, edge))
            assert pair.defective
            assert abs(pair.lambda_plus - sign) < 1e-8
