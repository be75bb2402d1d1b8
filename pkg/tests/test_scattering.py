import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st

from larmor_clock.core import kinematics
from larmor_clock.errors import Overflow
from larmor_clock.oracle import ode_oracle
from larmor_clock.profiles import PiecewiseBarrier, discretize, gaussian, rectangular
from larmor_clock.scattering import (
    TransferMatrix,
    barrier_matrix,
    interior_field,
    scatter_channel,
    scatter_spin,
    segment_matrix,
)
from larmor_clock.schrodinger import schrodinger_amplitudes


class TestSegmentMatrix:
    def test_free_phases(self):
        kin = kinematics(math.sqrt(2.0), 1.0, 0.0)
        matrix = segment_matrix(kin, math.pi).matrix()

        assert matrix[0, 0] == pytest.approx(cmath.exp(1j * math.pi))
        assert matrix[1, 1] == pytest.approx(cmath.exp(-1j * math.pi))
        assert matrix[0, 1] == 0

    def test_evanescent_factors(self):
        kin = kinematics(1.2, 1.0, 1.0)
        matrix = segment_matrix(kin, 1.0).matrix()

        assert matrix[0, 0] == pytest.approx(math.exp(-1.6))
        assert matrix[1, 1] == pytest.approx(math.exp(1.6))

    def test_semigroup(self):
        kin = kinematics(1.2, 1.0, 1.0)
        combined = segment_matrix(kin, 0.7).then(segment_matrix(kin, 0.5)).matrix()
        single = segment_matrix(kin, 1.2).matrix()

        np.testing.assert_allclose(combined, single, rtol = 1e-13)

    def test_overflow(self):
        kin = kinematics(1.2, 1.0, 1.0)

        with pytest.raises(Overflow):
            segment_matrix(kin, 500.0)

    def test_unimodular_in_same_medium(self, two_step_barrier):
        assert barrier_matrix(two_step_barrier, 1.3).determinant() == pytest.approx(1.0, abs = 1e-12)

    def test_identity(self):
        assert TransferMatrix.identity(0.3).determinant() == pytest.approx(1.0)


class TestScatterChannel:
    def test_zero_barrier(self, free_barrier):
        E = math.sqrt(2.0)
        result = scatter_channel(free_barrier, E)
        f0 = math.sqrt(2.0) - 1.0

        assert result.T == pytest.approx(1.0 / math.sqrt(1.0 + f0 ** 2), abs = 1e-14)
        assert abs(result.R) < 1e-14

    def test_unitarity_rectangular(self, rect_barrier):
        result = scatter_channel(rect_barrier, 1.2)

        assert abs(result.unitarity_residual) < 1e-12
        assert -math.pi < result.alpha <= math.pi
        assert -math.pi < result.beta <= math.pi

    def test_unitarity_family(self, barrier_family):
        for barrier, E in barrier_family:
            for shift in (0.0, 1e-3, -1e-3):
                assert abs(scatter_channel(barrier, E, shift).unitarity_residual) < 1e-12

    @given(
        E = st.floats(1.01, 5.0),
        heights = st.lists(st.floats(0.0, 3.0), min_size = 1, max_size = 6),
    )
    @hypothesis_settings(max_examples = 60, deadline = None)
    def test_unitarity_property(self, E, heights):
        if any(abs(E - 1.0 - h) < 1e-3 for h in heights):
            return
        barrier = PiecewiseBarrier(tuple((0.5, h) for h in heights))

        assert abs(scatter_channel(barrier, E).unitarity_residual) < 1e-10

    def test_opaque_barrier_is_finite(self):
        barrier = rectangular(1.0, 40.0).as_piecewise()
        result = scatter_channel(barrier, 1.2)

        assert 0 < abs(result.T) < 1e-50
        assert abs(result.unitarity_residual) < 1e-12

    def test_transmission_log_survives_underflow(self):
        # 2 d kappa = 800: T itself underflows to zero
        barrier = rectangular(1.0, 250.0).as_piecewise()
        result = scatter_channel(barrier, 1.2)

        assert result.T == 0
        assert result.log_T.real == pytest.approx(-800.0, rel = 1e-2)
        assert -math.pi < result.alpha <= math.pi
        assert abs(result.unitarity_residual) < 1e-12

    def test_transmission_log_matches_amplitude(self, two_step_barrier):
        result = scatter_channel(two_step_barrier, 1.3)

        assert cmath.exp(result.log_T) == pytest.approx(result.T, rel = 1e-12)
        assert result.alpha == pytest.approx(cmath.phase(result.T), abs = 1e-12)

    def test_reversal_keeps_transmission(self, barrier_family):
        for barrier, E in barrier_family:
            forward = scatter_channel(barrier, E)
            backward = scatter_channel(barrier.reversed(), E)

            assert abs(forward.T) == pytest.approx(abs(backward.T), rel = 1e-12)

    def test_split_segment_consistency(self, two_step_barrier):
        whole = scatter_channel(two_step_barrier, 1.3)
        split = scatter_channel(two_step_barrier.split(0, 0.3), 1.3)

        assert split.T == pytest.approx(whole.T, abs = 1e-13)
        assert split.R == pytest.approx(whole.R, abs = 1e-13)

    def test_gaussian_refinement_converges(self, gaussian_profile):
        sizes = [128, 256, 512, 1024, 2048]
        amplitudes = [scatter_channel(discretize(gaussian_profile, n), 1.6).T for n in sizes]
        differences = [abs(a - b) for a, b in zip(amplitudes, amplitudes[1:])]

        # second-order midpoint rule: each doubling should cut the change about fourfold
        assert all(later < 0.5 * earlier for earlier, later in zip(differences, differences[1:]))
        assert differences[-1] < 1e-3

    def test_differs_from_schrodinger_matrix(self, rect_barrier):
        dirac = scatter_channel(rect_barrier, 2.5)
        T, _ = schrodinger_amplitudes(rect_barrier, 1.5)

        assert abs(abs(dirac.T) ** 2 * (1 + dirac.f0 ** 2) - abs(T) ** 2) > 1e-3


class TestScatterSpin:
    def test_degenerate_at_zero_field(self, rect_barrier):
        minus, plus = scatter_spin(rect_barrier, 1.2, 0.0)

        assert minus.T == plus.T
        assert minus.R == plus.R

    def test_lower_channel_transmits_more(self, rect_barrier):
        minus, plus = scatter_spin(rect_barrier, 1.2, 1e-6)

        assert minus.channel == "+"
        assert plus.channel == "-"
        assert abs(minus.T) > abs(plus.T)

    def test_modulus_is_even_to_first_order(self, rect_barrier):
        # |T_{U-V}|^2 + |T_{U+V}|^2 - 2|T_U|^2 is second order in V
        base = abs(scatter_channel(rect_barrier, 1.2).T) ** 2
        deviations = []
        for V in (1e-3, 5e-4):
            minus, plus = scatter_spin(rect_barrier, 1.2, V)
            deviations.append(abs(abs(minus.T) ** 2 + abs(plus.T) ** 2 - 2 * base))

        assert deviations[1] / deviations[0] == pytest.approx(0.25, rel = 0.05)


class TestInteriorField:
    def test_zero_barrier_density(self, free_barrier):
        field = interior_field(free_barrier, math.sqrt(2.0))
        xs = np.linspace(-1.0, 1.0, 11)

        np.testing.assert_allclose(field.density(xs), 1.0, atol = 1e-13)

    def test_continuity(self, barrier_family):
        for barrier, E in barrier_family:
            assert interior_field(barrier, E).continuity_residual() < 1e-12

    def test_opaque_decay(self):
        barrier = rectangular(1.0, 5.0).as_piecewise()
        field = interior_field(barrier, 1.2)
        xs = np.linspace(-3.0, 5.0, 200)
        density = field.density(xs)

        assert np.all(np.diff(density) < 0)

    def test_tails_match_amplitudes(self, rect_barrier):
        field = interior_field(rect_barrier, 1.2)
        result = scatter_channel(rect_barrier, 1.2)

        assert field.T == result.T
        assert field.R == result.R
        assert field.incident == pytest.approx(1.0 / math.sqrt(1.0 + result.f0 ** 2), abs = 1e-12)

    def test_integrated_density_against_quadrature(self, two_step_barrier):
        field = interior_field(two_step_barrier, 1.3)
        xs = np.linspace(field.a, field.b, 20001)

        assert field.integrated_density() == pytest.approx(np.trapezoid(field.density(xs), xs), rel = 1e-6)

    def test_opaque_field_keeps_incident_wave(self):
        barrier = rectangular(1.0, 250.0).as_piecewise()
        field = interior_field(barrier, 1.2)
        thinner = rectangular(1.0, 20.0).as_piecewise()
        edge = interior_field(thinner, 1.2).density(np.array([thinner.a]))[0]

        assert field.incident == pytest.approx(1.0 / math.sqrt(1.0 + field.f0 ** 2), abs = 1e-12)
        assert field.density(np.array([barrier.a]))[0] == pytest.approx(edge, rel = 1e-9)
        assert field.density(np.array([barrier.b]))[0] < 1e-300


class TestOracle:
    def test_rectangular_agreement(self, rect_barrier):
        matrix = scatter_channel(rect_barrier, 1.2)
        oracle = ode_oracle(rect_barrier, 1.2)

        assert abs(matrix.T - oracle.T) < 1e-6
        assert abs(matrix.R - oracle.R) < 1e-6

    def test_zero_potential(self, free_barrier):
        oracle = ode_oracle(free_barrier, math.sqrt(2.0))
        f0 = math.sqrt(2.0) - 1.0

        assert oracle.T == pytest.approx(1.0 / math.sqrt(1.0 + f0 ** 2), abs = 1e-8)
        assert abs(oracle.R) < 1e-8

    def test_random_family(self, barrier_family):
        for barrier, E in barrier_family[:6]:
            for shift in (0.0, 1e-3):
                matrix = scatter_channel(barrier, E, shift)
                oracle = ode_oracle(barrier, E, shift)

                assert abs(matrix.T - oracle.T) < 1e-6
                assert abs(matrix.R - oracle.R) < 1e-6

    def test_profile_input(self):
        profile = rectangular(1.0, 1.0)

        assert abs(ode_oracle(profile, 1.2).T - scatter_channel(profile.as_piecewise(), 1.2).T) < 1e-6

    def test_smooth_profile_refinement(self):
        profile = gaussian(1.0, 1.0)
        oracle = ode_oracle(profile, 1.6)
        errors = [abs(scatter_channel(discretize(profile, n), 1.6).T - oracle.T) for n in (64, 256, 1024)]

        assert errors[0] > errors[1] > errors[2]
