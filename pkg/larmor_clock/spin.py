"""
Spin expectation values of the outgoing waves and the precession read-out.

Spin is S_i = (1/2) Sigma_i in units of hbar, with Sigma_i = diag(sigma_i,
sigma_i) in the Pauli representation. Outgoing spinors are assembled from
the channel pair (U-V, U+V): the U-V channel carries the u1 components and
the U+V channel the u2 components.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from larmor_clock.clock import ChannelDerivatives
from larmor_clock.config import get_settings
from larmor_clock.core import FourSpinor, SpinOrientation, spin_coherent_spinor
from larmor_clock.errors import InvalidParameter, PoleOrientation, UltraRelativisticDegeneracy
from larmor_clock.scattering import ScatteringResult

logger = logging.getLogger(__name__)
settings = get_settings()

ChannelPair = Tuple[ScatteringResult, ScatteringResult]

SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)
SPIN_MATRICES = tuple(np.kron(np.eye(2), sigma) for sigma in SIGMA)
BETA = np.diag([1.0, 1.0, -1.0, -1.0]).astype(np.complex128)
ALPHA_1 = np.kron(SIGMA[0], SIGMA[0])

for _matrix in (*SIGMA, *SPIN_MATRICES, BETA, ALPHA_1):
    _matrix.setflags(write=False)


def pauli_algebra_residual() -> float:
    """Largest deviation from Sigma_i Sigma_j = delta_ij + i eps_ijk Sigma_k over all nine pairs."""
    identity = np.eye(4)
    worst = 0.0
    for i in range(3):
        for j in range(3):
            expected = identity * (i == j)
            for k in range(3):
                epsilon = (i - j) * (j - k) * (k - i) / 2
                expected = expected + 1j * epsilon * SPIN_MATRICES[k]
            worst = max(worst, float(np.max(np.abs(SPIN_MATRICES[i] @ SPIN_MATRICES[j] - expected))))
    return worst


@dataclass(frozen=True)
class SpinVector:
    s1: float
    s2: float
    s3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.s1, self.s2, self.s3])

    def __add__(self, other: "SpinVector") -> "SpinVector":
        return SpinVector(self.s1 + other.s1, self.s2 + other.s2, self.s3 + other.s3)

    def distance(self, other: "SpinVector") -> float:
        return float(np.linalg.norm(self.as_array() - other.as_array()))

    def to_dict(self):
        return {"s1": self.s1, "s2": self.s2, "s3": self.s3}


@dataclass(frozen=True)
class PrecessionReading:
    angle: float
    time: float
    conditioning: float


def spin_expect_exact(psi: FourSpinor) -> SpinVector:
    psi = np.asarray(psi, dtype=np.complex128)
    values = [0.5 * float(np.real(np.vdot(psi, matrix @ psi))) for matrix in SPIN_MATRICES]
    return SpinVector(*values)


def _pair_f0(results: ChannelPair, f0: Optional[float]) -> float:
    return results[0].f0 if f0 is None else f0


def transmitted_spin(results: ChannelPair, orientation: SpinOrientation, f0: Optional[float] = None) -> SpinVector:
    minus, plus = results
    f0 = _pair_f0(results, f0)
    u1, u2 = orientation.u1, orientation.u2
    psi = np.array([minus.T * u1, plus.T * u2, f0 * plus.T * u2, f0 * minus.T * u1])
    return spin_expect_exact(psi)


def reflected_spin(results: ChannelPair, orientation: SpinOrientation, f0: Optional[float] = None) -> SpinVector:
    minus, plus = results
    f0 = _pair_f0(results, f0)
    u1, u2 = orientation.u1, orientation.u2
    psi = np.array([minus.R * u1, plus.R * u2, -f0 * plus.R * u2, -f0 * minus.R * u1])
    return spin_expect_exact(psi)


def summed_spin(results: ChannelPair, orientation: SpinOrientation, f0: Optional[float] = None) -> SpinVector:
    return transmitted_spin(results, orientation, f0) + reflected_spin(results, orientation, f0)


def free_precession(orientation: SpinOrientation, f0: float, omega_L: float, t: float) -> SpinVector:
    """Spin of the coherent state after time t in a uniform field along z, no barrier."""
    if t < 0:
        raise InvalidParameter(f"precession time must be non-negative, got {t}")
    squeeze = (1.0 - f0 * f0) / (1.0 + f0 * f0)
    st = math.sin(orientation.theta)
    azimuth = orientation.phi - omega_L * t
    return SpinVector(
        0.5 * st * math.cos(azimuth),
        0.5 * squeeze * st * math.sin(azimuth),
        0.5 * squeeze * math.cos(orientation.theta),
    )


def incident_spin(orientation: SpinOrientation, f0: float) -> SpinVector:
    return spin_expect_exact(spin_coherent_spinor(orientation, f0))


def extract_precession_time(sv: SpinVector, orientation: SpinOrientation, f0: float,
                            omega_L: float) -> PrecessionReading:
    """Undo the (1 - f0^2)/(1 + f0^2) squeeze of s2 and read the azimuthal lag as a time."""
    if math.sin(orientation.theta) < settings.POLE_THRESHOLD:
        raise PoleOrientation(f"theta = {orientation.theta} leaves no transverse spin to read")
    conditioning = 1.0 - f0 * f0
    if conditioning < settings.DEGENERACY_THRESHOLD:
        raise UltraRelativisticDegeneracy(f"f0 = {f0} too close to 1; s2 carries no azimuth")
    if not omega_L > 0:
        raise InvalidParameter(f"Larmor frequency must be positive, got {omega_L}")

    azimuth = math.atan2(sv.s2 * (1.0 + f0 * f0) / conditioning, sv.s1)
    angle = math.remainder(orientation.phi - azimuth, 2.0 * math.pi)
    return PrecessionReading(angle=angle, time=angle / omega_L, conditioning=conditioning)


def first_order_transmitted(deriv: ChannelDerivatives, orientation: SpinOrientation, V: float) -> SpinVector:
    """Small-V expansion of the transmitted spin."""
    f0, T2 = deriv.f0, abs(deriv.T) ** 2
    azimuth = 2.0 * V * deriv.dalpha + orientation.phi
    st = math.sin(orientation.theta)
    return SpinVector(
        0.5 * (1.0 + f0 * f0) * T2 * st * math.cos(azimuth),
        0.5 * (1.0 - f0 * f0) * T2 * st * math.sin(azimuth),
        0.5 * (1.0 - f0 * f0) * (T2 * math.cos(orientation.theta) - V * deriv.dT2),
    )


def first_order_reflected(deriv: ChannelDerivatives, orientation: SpinOrientation, V: float) -> SpinVector:
    f0, R2 = deriv.f0, abs(deriv.R) ** 2
    azimuth = 2.0 * V * deriv.dbeta + orientation.phi
    st = math.sin(orientation.theta)
    return SpinVector(
        0.5 * (1.0 + f0 * f0) * R2 * st * math.cos(azimuth),
        0.5 * (1.0 - f0 * f0) * R2 * st * math.sin(azimuth),
        0.5 * (1.0 - f0 * f0) * (R2 * math.cos(orientation.theta) - V * deriv.dR2),
    )


def resummed_spin(deriv: ChannelDerivatives, orientation: SpinOrientation, V: float) -> SpinVector:
    """Total outgoing spin with both channels folded into one precession angle."""
    f0 = deriv.f0
    squeeze = (1.0 - f0 * f0) / (1.0 + f0 * f0)
    lag = 2.0 * V * (deriv.transmission_weight * deriv.dalpha + deriv.reflection_weight * deriv.dbeta)
    azimuth = lag + orientation.phi
    st = math.sin(orientation.theta)
    return SpinVector(
        0.5 * st * math.cos(azimuth),
        0.5 * squeeze * st * math.sin(azimuth),
        0.5 * squeeze * math.cos(orientation.theta),
    )
