import math

import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st

from larmor_clock.core import (
    FieldParams,
    ParticleState,
    SpinOrientation,
    Units,
    free_momentum,
    kinematics,
    spin_coherent_spinor,
)
from larmor_clock.errors import InvalidParameter, MalformedProfile, SubRestEnergy, ThresholdEnergy
from larmor_clock.profiles import (
    PiecewiseBarrier,
    discretize,
    gaussian,
    make_profile,
    piecewise,
    rectangular,
    to_piecewise,
)


class TestKinematics:
    def test_free_segment(self):
        kin = kinematics(math.sqrt(2.0), 1.0, 0.0)

        assert kin.p == pytest.approx(1.0)
        assert kin.f == pytest.approx(math.sqrt(2.0) - 1.0)
        assert not kin.evanescent

    def test_evanescent_segment(self):
        kin = kinematics(1.2, 1.0, 1.0)

        assert kin.p.real == 0.0
        assert kin.p.imag == pytest.approx(1.6)
        assert kin.f == pytest.approx(0.5j)
        assert kin.kappa == pytest.approx(1.6)

    def test_threshold_energy(self):
        with pytest.raises(ThresholdEnergy):
            kinematics(1.0, 1.0, 0.0)

    def test_below_rest_energy(self):
        with pytest.raises(SubRestEnergy):
            kinematics(0.5, 1.0, 0.0)

    def test_shift_acts_as_energy_offset(self):
        shifted = kinematics(1.2, 1.0, 1.0, shift = 0.1)
        lowered = kinematics(1.1, 1.0, 1.0)

        assert shifted.p == pytest.approx(lowered.p)
        assert shifted.f == pytest.approx(lowered.f)

    def test_free_region_matches_particle_state(self):
        state = ParticleState(1.7)
        k0, f0 = free_momentum(1.7)

        assert state.k0 == pytest.approx(k0)
        assert state.f0 == pytest.approx(f0)
        assert state.f0 == pytest.approx(state.k0 / (1.0 + 1.7))

    @given(
        E = st.floats(1.001, 5.0),
        W = st.floats(-0.5, 4.0),
    )
    @hypothesis_settings(max_examples = 200)
    def test_branch_convention(self, E, W):
        if abs(E * E - (1.0 + W) ** 2) < 1e-10:
            return
        kin = kinematics(E, 1.0, W)

        assert kin.p.imag >= 0
        assert kin.p.real * kin.p.imag == 0
        assert kin.p * kin.p == pytest.approx(E * E - (1.0 + W) ** 2, abs = 1e-12)
        if kin.p.imag == 0:
            assert kin.p.real > 0

    def test_f0_increases_with_energy(self):
        energies = np.linspace(1.0001, 50.0, 400)
        ratios = [free_momentum(E)[1] for E in energies]

        assert np.all(np.diff(ratios) > 0)
        assert ratios[0] < 0.02
        assert ratios[-1] > 0.95
        assert all(0 < f < 1 for f in ratios)


class TestParameters:
    def test_units_require_positive_mass(self):
        with pytest.raises(InvalidParameter):
            Units(m = 0.0)

    def test_particle_state_below_rest(self):
        with pytest.raises(SubRestEnergy):
            ParticleState(1.0)

    def test_field_params(self):
        field = FieldParams(V = 0.25, a = -1.0, b = 1.0)

        assert field.omega_L == 0.5
        assert field.region == (-1.0, 1.0)

        with pytest.raises(InvalidParameter):
            FieldParams(V = -1.0, a = -1.0, b = 1.0)

    def test_orientation_ranges(self):
        with pytest.raises(InvalidParameter):
            SpinOrientation(theta = 4.0)
        with pytest.raises(InvalidParameter):
            SpinOrientation(theta = 1.0, phi = 2 * math.pi)


class TestSpinCoherentSpinor:
    def test_spin_up(self):
        psi = spin_coherent_spinor(SpinOrientation(0.0, 0.0), 0.5)

        np.testing.assert_allclose(psi, np.array([1, 0, 0, 0.5]) / math.sqrt(1.25), atol = 1e-15)

    def test_spin_down(self):
        psi = spin_coherent_spinor(SpinOrientation(math.pi, 0.0), 0.5)

        np.testing.assert_allclose(psi, np.array([0, 1, 0.5, 0]) / math.sqrt(1.25), atol = 1e-15)

    @given(
        theta = st.floats(0.0, math.pi),
        phi = st.floats(0.0, 6.28),
        f0 = st.floats(1e-6, 0.999999),
    )
    def test_unit_norm(self, theta, phi, f0):
        psi = spin_coherent_spinor(SpinOrientation(theta, phi), f0)

        assert np.linalg.norm(psi) == pytest.approx(1.0, abs = 1e-14)

    def test_ratio_out_of_range(self):
        with pytest.raises(InvalidParameter):
            spin_coherent_spinor(SpinOrientation(1.0), 1.0)


class TestProfiles:
    def test_rectangular(self):
        profile = rectangular(1.0, 1.0)

        assert (profile.a, profile.b) == (-1.0, 1.0)
        assert profile.potential(0.3) == 1.0
        assert profile.potential(1.5) == 0.0

    def test_gaussian_support(self):
        profile = gaussian(2.0, 0.5)

        assert profile.a == pytest.approx(-2.0)
        assert profile.b == pytest.approx(2.0)
        assert profile.potential(0.0) == pytest.approx(2.0)
        assert profile.potential(3.0) == 0.0

    def test_piecewise_two_step(self):
        profile = piecewise([(1, 0.5), (1, 1.0)])
        barrier = profile.as_piecewise()

        assert profile.length == pytest.approx(2.0)
        assert barrier.segments == ((1.0, 0.5), (1.0, 1.0))
        assert not barrier.is_symmetric()
        assert barrier.midpoint == pytest.approx(0.0)

    def test_sampled_profile(self):
        profile = make_profile({"kind": "sampled", "points": [[0, 0], [1, 2], [2, 0]]})

        assert profile.potential(0.5) == pytest.approx(1.0)
        assert profile.potential(-1.0) == 0.0
        with pytest.raises(MalformedProfile):
            profile.as_piecewise()

    @pytest.mark.parametrize("data", [
        {"kind": "rectangular", "U0": 1.0, "d": 0.0},
        {"kind": "rectangular", "U0": 1.0, "d": -1.0},
        {"kind": "piecewise", "segments": [[0.0, 1.0]]},
        {"kind": "piecewise", "segments": [[1.0, float("nan")]]},
        {"kind": "sampled", "points": [[0, 0], [0, 1]]},
        {"kind": "triangle"},
    ])
    def test_malformed(self, data):
        with pytest.raises(MalformedProfile):
            make_profile(data)

    def test_discretize_rectangular(self):
        barrier = discretize(rectangular(1.0, 1.0), 5)

        assert len(barrier.segments) == 5
        assert all(height == 1.0 for height in barrier.heights)
        assert barrier.length == pytest.approx(2.0)

    def test_discretize_aligned_steps(self):
        profile = piecewise([(1, 0.5), (1, 1.0)])
        barrier = discretize(profile, 2)

        assert barrier.heights.tolist() == [0.5, 1.0]

    def test_to_piecewise(self, gaussian_profile):
        assert len(to_piecewise(rectangular(1.0, 2.0)).segments) == 1
        assert len(to_piecewise(gaussian_profile, 128).segments) == 128

    def test_split_and_reverse(self, two_step_barrier):
        split = two_step_barrier.split(1, 0.25)

        assert len(split.segments) == 3
        assert split.length == pytest.approx(two_step_barrier.length)
        assert two_step_barrier.reversed().segments == ((1.0, 1.0), (1.0, 0.5))

    def test_empty_barrier(self):
        with pytest.raises(MalformedProfile):
            PiecewiseBarrier(())
