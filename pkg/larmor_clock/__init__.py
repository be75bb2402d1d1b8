"""Larmor-clock tunneling times for a neutral spin-1/2 Dirac-Pauli particle."""

from larmor_clock.clock import (
    ClockTimes,
    analytic_rect_tau_T,
    clock_times,
    dwell_time,
    free_traversal_time,
    hartman_sweep,
    larmor_time,
    phase_times,
)
from larmor_clock.core import ParticleState, SpinOrientation, kinematics, spin_coherent_spinor
from larmor_clock.profiles import PiecewiseBarrier, discretize, gaussian, make_profile, piecewise, rectangular
from larmor_clock.scattering import interior_field, scatter_channel, scatter_spin
from larmor_clock.spin import extract_precession_time, summed_spin

__version__ = "1.0.0"
