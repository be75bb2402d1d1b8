"""
Unit conventions, particle and field parameters, spin coherent states and
per-segment channel kinematics.

Natural units throughout: hbar = c = 1, energies in units of m c^2, lengths in
hbar/(m c), times in hbar/(m c^2).
"""

import cmath
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
import numpy.typing as npt

from larmor_clock.config import get_settings
from larmor_clock.errors import InvalidParameter, SubRestEnergy, ThresholdEnergy

settings = get_settings()

HBAR = 1.0

FourSpinor = npt.NDArray[np.complex128]


@dataclass(frozen=True)
class Units:
    convention: str = "natural"
    m: float = 1.0

    def __post_init__(self):
        if not self.m > 0:
            raise InvalidParameter(f"rest mass must be positive, got {self.m}")


@dataclass(frozen=True)
class ParticleState:
    E: float
    m: float = 1.0
    k0: float = field(init=False)
    f0: float = field(init=False)

    def __post_init__(self):
        if not self.E > self.m:
            raise SubRestEnergy(f"E = {self.E} must exceed the rest energy m = {self.m}")
        free = kinematics(self.E, self.m)
        object.__setattr__(self, "k0", free.p.real)
        object.__setattr__(self, "f0", free.f.real)


@dataclass(frozen=True)
class FieldParams:
    V: float
    a: float
    b: float

    def __post_init__(self):
        if self.V < 0:
            raise InvalidParameter(f"spin-field energy V must be non-negative, got {self.V}")
        if not self.b > self.a:
            raise InvalidParameter(f"field region [{self.a}, {self.b}] is empty")

    @property
    def omega_L(self) -> float:
        return 2.0 * self.V / HBAR

    @property
    def region(self) -> Tuple[float, float]:
        return (self.a, self.b)


@dataclass(frozen=True)
class SpinOrientation:
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise InvalidParameter(f"theta = {self.theta} outside [0, pi]")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise InvalidParameter(f"phi = {self.phi} outside [0, 2 pi)")

    @property
    def u1(self) -> complex:
        return math.cos(self.theta / 2) * cmath.exp(-0.5j * self.phi)

    @property
    def u2(self) -> complex:
        return math.sin(self.theta / 2) * cmath.exp(0.5j * self.phi)


@dataclass(frozen=True)
class ChannelKinematics:
    """
    Plane-wave data of one spin channel inside one constant segment.

    W is the scalar barrier height (enters beside the mass), shift the
    channel potential offset +-V which acts as an energy offset of the channel,
    so the segment sees epsilon = E - shift and mass m + W.
    """
    E: float
    m: float
    W: float
    shift: float
    p: complex
    f: complex

    @property
    def evanescent(self) -> bool:
        return self.p.imag > 0

    @property
    def kappa(self) -> float:
        return self.p.imag


def kinematics(E: float, m: float = 1.0, W: float = 0.0, shift: float = 0.0) -> ChannelKinematics:
    if not (math.isfinite(E) and math.isfinite(W) and math.isfinite(shift)):
        raise InvalidParameter(f"non-finite kinematics input E={E}, W={W}, shift={shift}")
    if not m > 0:
        raise InvalidParameter(f"rest mass must be positive, got {m}")

    eps = E - shift
    mass = m + W
    disc = eps * eps - mass * mass

    if abs(disc) < settings.THRESHOLD_TOL:
        raise ThresholdEnergy(f"degenerate momentum at E={E}, m={m}, W={W}, shift={shift}")
    if W == 0.0 and shift == 0.0 and E <= m:
        raise SubRestEnergy(f"E = {E} is below the rest energy m = {m}")

    if disc > 0:
        p = complex(math.sqrt(disc), 0.0)
    else:
        p = complex(0.0, math.sqrt(-disc))
    f = p / (eps + mass)

    return ChannelKinematics(E=E, m=m, W=W, shift=shift, p=p, f=f)


def free_momentum(E: float, m: float = 1.0) -> Tuple[float, float]:
    """(k0, f0) of the field-free asymptotic region."""
    free = kinematics(E, m)
    return free.p.real, free.f.real


def spin_coherent_spinor(orientation: SpinOrientation, f0: float) -> FourSpinor:
    if not 0.0 < f0 < 1.0:
        raise InvalidParameter(f"component ratio f0 = {f0} outside (0, 1)")
    u1, u2 = orientation.u1, orientation.u2
    psi = np.array([u1, u2, f0 * u2, f0 * u1], dtype=np.complex128)
    return psi / math.sqrt(1.0 + f0 * f0)
