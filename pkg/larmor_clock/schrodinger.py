"""
Nonrelativistic reference: the same barrier solved with the 1D Schrodinger
equation (hbar = 1), with Larmor times from the same spin-channel
construction. Only the wavefunction value and slope are matched at interfaces,
which in the local-amplitude form means the admittance of a segment is its
wavenumber.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from larmor_clock.config import get_settings
from larmor_clock.errors import InvalidParameter, SubRestEnergy, ThresholdEnergy
from larmor_clock.profiles import PiecewiseBarrier, to_piecewise
from larmor_clock.scattering import (
    InteriorField,
    Layer,
    compose_layers,
    interior_amplitudes,
    layer_amplitudes,
    split_layers,
    transmission_log,
)

logger = logging.getLogger(__name__)
settings = get_settings()


@dataclass(frozen=True)
class SchrodingerTimes:
    tau_T: float
    tau_R: float
    tau_D: float
    T: complex
    R: complex

    @property
    def tau_L(self) -> float:
        return abs(self.T) ** 2 * self.tau_T + abs(self.R) ** 2 * self.tau_R


def _wavenumber(kinetic_energy: float, m: float) -> complex:
    twice = 2.0 * m * kinetic_energy
    if abs(twice) < settings.THRESHOLD_TOL:
        raise ThresholdEnergy(f"zero wavenumber at kinetic energy {kinetic_energy}")
    return complex(math.sqrt(twice), 0.0) if twice > 0 else complex(0.0, math.sqrt(-twice))


def _layers(barrier: PiecewiseBarrier, kinetic_energy: float, shift: float, m: float) -> List[Layer]:
    layers = []
    for length, height in barrier.segments:
        k = _wavenumber(kinetic_energy - height - shift, m)
        layers.append((k, k, length))
    return split_layers(layers)


def _solve(barrier: PiecewiseBarrier, kinetic_energy: float, shift: float, m: float) -> Tuple[complex, complex]:
    """(log T, R) for unit incident amplitude."""
    if not kinetic_energy > 0:
        raise SubRestEnergy(f"kinetic energy must be positive, got {kinetic_energy}")
    k0 = _wavenumber(kinetic_energy, m).real
    total = compose_layers(_layers(barrier, kinetic_energy, shift, m), k0)
    _, r = layer_amplitudes(total, k0, barrier.length)
    return transmission_log(total, k0, barrier.length), r


def schrodinger_amplitudes(barrier: PiecewiseBarrier, kinetic_energy: float, shift: float = 0.0,
                           m: float = 1.0) -> Tuple[complex, complex]:
    """(T, R) for unit incident amplitude, origin at the barrier midpoint."""
    log_T, R = _solve(barrier, kinetic_energy, shift, m)
    return cmath.exp(log_T), R


def schrodinger_field(barrier: PiecewiseBarrier, kinetic_energy: float, m: float = 1.0) -> InteriorField:
    """Interior wave; the field's f0 slot holds the free wavenumber (the free admittance)."""
    k0 = _wavenumber(kinetic_energy, m).real
    layers = _layers(barrier, kinetic_energy, 0.0, m)
    total = compose_layers(layers, k0)
    t, r = layer_amplitudes(total, k0, barrier.length)
    amplitudes, incident, _ = interior_amplitudes(layers, k0, k0, transmission_log(total, k0, barrier.length))
    edges = barrier.a + np.concatenate(([0.0], np.cumsum([layer[2] for layer in layers])))
    edges[-1] = barrier.b
    return InteriorField(
        edges=edges,
        momenta=np.array([layer[0] for layer in layers], dtype=np.complex128),
        admittances=np.array([layer[1] for layer in layers], dtype=np.complex128),
        amplitudes=amplitudes,
        origin=barrier.midpoint,
        k0=k0,
        f0=k0,
        T=t,
        R=r,
        incident=incident * cmath.exp(0.5j * k0 * barrier.length),
        lower_component=False,
    )


def schrodinger_reference(barrier, kinetic_energy: float, m: float = 1.0, h: Optional[float] = None,
                          n_segments: Optional[int] = None) -> SchrodingerTimes:
    h = h or settings.FD_STEP
    if not h > 0:
        raise InvalidParameter(f"finite-difference step must be positive, got {h}")
    barrier = to_piecewise(barrier, n_segments)

    log_T, R = _solve(barrier, kinetic_energy, 0.0, m)
    log_T_up, R_up = _solve(barrier, kinetic_energy, h, m)
    log_T_down, R_down = _solve(barrier, kinetic_energy, -h, m)

    tau_T = -math.remainder(log_T_up.imag - log_T_down.imag, 2.0 * math.pi) / (2.0 * h)
    if abs(R) ** 2 < settings.RESONANCE_THRESHOLD:
        logger.warning(f"Schrodinger reference at a transmission resonance (E_kin={kinetic_energy})")
        tau_R = math.nan
    else:
        tau_R = -cmath.phase(R_up * R_down.conjugate()) / (2.0 * h)

    field = schrodinger_field(barrier, kinetic_energy, m)
    velocity = field.k0 / m
    tau_D = field.integrated_density() / velocity

    return SchrodingerTimes(tau_T=tau_T, tau_R=tau_R, tau_D=tau_D, T=cmath.exp(log_T), R=R)
