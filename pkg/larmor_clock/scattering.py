"""
Stationary 1D scattering per spin channel with complex 2x2 transfer matrices.

Amplitudes are tracked as local (right-mover, left-mover) pairs at a point:
inside a segment with momentum p the upper component is a e^{ipx} + b e^{-ipx}
and the lower one is y (a e^{ipx} - b e^{-ipx}), where y is the segment's
admittance (the Dirac component ratio f; the wavenumber k for the
Schrodinger reference). Continuity of both components at an interface is the
only matching condition, so interface matrices depend on the admittance ratio
alone.

T and R are the coefficients of the asymptotic forms with the incident upper
component normalised to 1/sqrt(1 + f0^2) and the coordinate origin at the
midpoint of [a, b].
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from larmor_clock.config import get_settings
from larmor_clock.core import ChannelKinematics, free_momentum, kinematics
from larmor_clock.errors import InvalidParameter, Overflow
from larmor_clock.profiles import PiecewiseBarrier

logger = logging.getLogger(__name__)
settings = get_settings()

# (momentum, admittance, length)
Layer = Tuple[complex, complex, float]


@dataclass(frozen=True)
class TransferMatrix:
    """
    Forward map of local amplitudes from the left end to the right end.

    ``entries`` is kept normalised (largest modulus 1) and the dropped factor
    is carried as ``log_scale``, so opaque barriers never overflow.
    """
    entries: np.ndarray
    log_scale: float
    admittance_in: complex
    admittance_out: complex

    @classmethod
    def identity(cls, admittance: complex) -> "TransferMatrix":
        return cls(_frozen(np.eye(2, dtype=np.complex128)), 0.0, admittance, admittance)

    def then(self, other: "TransferMatrix") -> "TransferMatrix":
        """Propagate through ``self`` and continue through ``other``."""
        product = other.entries @ interface_matrix(self.admittance_out, other.admittance_in) @ self.entries
        scale = float(np.max(np.abs(product)))
        return TransferMatrix(
            _frozen(product / scale),
            self.log_scale + other.log_scale + math.log(scale),
            self.admittance_in,
            other.admittance_out,
        )

    def matrix(self) -> np.ndarray:
        if self.log_scale > settings.OVERFLOW_EXPONENT:
            raise Overflow(f"transfer matrix scale e^{self.log_scale:.1f} exceeds the exponent range")
        return self.entries * math.exp(self.log_scale)

    def determinant(self) -> complex:
        return complex(np.linalg.det(self.matrix()))


@dataclass(frozen=True)
class ScatteringResult:
    T: complex
    R: complex
    channel: str
    E: float
    m: float
    shift: float
    k0: float
    f0: float
    log_T: Optional[complex] = None

    def __post_init__(self):
        # log T stays finite after T itself underflows behind an opaque barrier
        if self.log_T is None:
            object.__setattr__(self, "log_T", cmath.log(self.T))

    @property
    def alpha(self) -> float:
        return _principal(math.remainder(self.log_T.imag, 2.0 * math.pi))

    @property
    def beta(self) -> float:
        return _principal(cmath.phase(self.R))

    @property
    def transmission_probability(self) -> float:
        return (1.0 + self.f0 ** 2) * abs(self.T) ** 2

    @property
    def reflection_probability(self) -> float:
        return (1.0 + self.f0 ** 2) * abs(self.R) ** 2

    @property
    def unitarity_residual(self) -> float:
        return self.transmission_probability + self.reflection_probability - 1.0

    def to_dict(self):
        return {
            "T_re": self.T.real,
            "T_im": self.T.imag,
            "R_re": self.R.real,
            "R_im": self.R.imag,
            "alpha": self.alpha,
            "beta": self.beta,
            "unitarity_residual": self.unitarity_residual,
        }


@dataclass(frozen=True)
class InteriorField:
    """
    The global stationary solution inside [a, b], one entry per (split) segment.

    ``amplitudes[j]`` holds the local (right, left) amplitudes at the left edge
    of segment j. ``lower_component`` is False for the one-component
    Schrodinger wave.
    """
    edges: np.ndarray
    momenta: np.ndarray
    admittances: np.ndarray
    amplitudes: np.ndarray
    origin: float
    k0: float
    f0: float
    T: complex
    R: complex
    incident: complex
    lower_component: bool = True

    @property
    def a(self) -> float:
        return float(self.edges[0])

    @property
    def b(self) -> float:
        return float(self.edges[-1])

    def spinor(self, x) -> Tuple[np.ndarray, np.ndarray]:
        """Upper and lower components at positions x (free regions included)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        upper = np.zeros(x.shape, dtype=np.complex128)
        lower = np.zeros(x.shape, dtype=np.complex128)
        k0, y0 = self.k0, self.f0

        left = x < self.a
        xs = x[left] - self.origin
        upper[left] = self.incident * np.exp(1j * k0 * xs) + self.R * np.exp(-1j * k0 * xs)
        lower[left] = y0 * (self.incident * np.exp(1j * k0 * xs) - self.R * np.exp(-1j * k0 * xs))

        right = x > self.b
        xs = x[right] - self.origin
        upper[right] = self.T * np.exp(1j * k0 * xs)
        lower[right] = y0 * self.T * np.exp(1j * k0 * xs)

        inside = ~(left | right)
        index = np.clip(np.searchsorted(self.edges, x[inside], side="right") - 1, 0, len(self.momenta) - 1)
        local = x[inside] - self.edges[index]
        p = self.momenta[index]
        forward = self.amplitudes[index, 0] * np.exp(1j * p * local)
        backward = self.amplitudes[index, 1] * np.exp(-1j * p * local)
        upper[inside] = forward + backward
        lower[inside] = self.admittances[index] * (forward - backward)

        if not self.lower_component:
            lower[:] = 0.0
        return upper, lower

    def density(self, x) -> np.ndarray:
        upper, lower = self.spinor(x)
        return np.abs(upper) ** 2 + np.abs(lower) ** 2

    def integrated_density(self) -> float:
        """Closed-form integral of the density over [a, b]."""
        total = 0.0
        for j, length in enumerate(np.diff(self.edges)):
            p = complex(self.momenta[j])
            y = complex(self.admittances[j])
            A, B = self.amplitudes[j]
            weight = abs(y) ** 2 if self.lower_component else 0.0
            direct = abs(A) ** 2 * _exp_integral(-2.0 * p.imag, length) \
                + abs(B) ** 2 * _exp_integral(2.0 * p.imag, length)
            cross = A * B.conjugate() * _exp_integral(2j * p.real, length)
            total += (1.0 + weight) * direct.real + 2.0 * (1.0 - weight) * cross.real
        return total

    def continuity_residual(self) -> float:
        """Largest jump of either component across any interface, free ends included."""
        lengths = np.diff(self.edges)
        right_edge = np.column_stack((
            self.amplitudes[:, 0] * np.exp(1j * self.momenta * lengths),
            self.amplitudes[:, 1] * np.exp(-1j * self.momenta * lengths),
        ))
        upper_right = right_edge[:, 0] + right_edge[:, 1]
        lower_right = self.admittances * (right_edge[:, 0] - right_edge[:, 1])
        upper_left = self.amplitudes[:, 0] + self.amplitudes[:, 1]
        lower_left = self.admittances * (self.amplitudes[:, 0] - self.amplitudes[:, 1])

        outer_upper, outer_lower = self.spinor(np.array([np.nextafter(self.a, -np.inf), np.nextafter(self.b, np.inf)]))
        jumps = [
            np.abs(upper_right[:-1] - upper_left[1:]),
            np.abs(lower_right[:-1] - lower_left[1:]),
            [abs(outer_upper[0] - upper_left[0]), abs(outer_upper[1] - upper_right[-1])],
        ]
        if self.lower_component:
            jumps.append([abs(outer_lower[0] - lower_left[0]), abs(outer_lower[1] - lower_right[-1])])
        return float(max(np.max(j) if len(j) else 0.0 for j in jumps))


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _principal(angle: float) -> float:
    return angle + 2.0 * math.pi if angle <= -math.pi else angle


def _exp_integral(c: complex, length: float) -> complex:
    """Integral of e^{c x} over [0, length]."""
    z = c * length
    if z == 0:
        return complex(length)
    if abs(z) < 1e-8:
        return length * (1.0 + 0.5 * z)
    if isinstance(c, complex) and c.imag != 0:
        return (cmath.exp(z) - 1.0) / c
    c = float(c.real) if isinstance(c, complex) else float(c)
    return complex(math.expm1(c * length) / c)


def interface_matrix(admittance_left: complex, admittance_right: complex) -> np.ndarray:
    rho = admittance_left / admittance_right
    return 0.5 * np.array([[1.0 + rho, 1.0 - rho], [1.0 - rho, 1.0 + rho]], dtype=np.complex128)


def _layer_matrix(p: complex, admittance: complex, length: float) -> TransferMatrix:
    if not length > 0:
        raise InvalidParameter(f"segment length must be positive, got {length}")
    growth = abs(p.imag) * length
    if growth > settings.OVERFLOW_EXPONENT:
        raise Overflow(f"|Im p| L = {growth:.1f} exceeds the exponent range; split the segment")
    entries = np.array([
        [cmath.exp(1j * p * length - growth), 0.0],
        [0.0, cmath.exp(-1j * p * length - growth)],
    ], dtype=np.complex128)
    return TransferMatrix(_frozen(entries), growth, admittance, admittance)


def segment_matrix(kin: ChannelKinematics, length: float) -> TransferMatrix:
    """Propagation across one segment in its own mode basis: diag(e^{ipL}, e^{-ipL})."""
    return _layer_matrix(kin.p, kin.f, length)


def split_layers(layers: Sequence[Layer], max_exponent: Optional[float] = None) -> List[Layer]:
    """Cut evanescent layers so no single layer grows by more than e^max_exponent."""
    max_exponent = max_exponent or settings.SPLIT_EXPONENT
    result = []
    for p, admittance, length in layers:
        pieces = max(1, math.ceil(abs(p.imag) * length / max_exponent))
        if pieces > 1:
            logger.debug(f"Splitting layer of growth {abs(p.imag) * length:.1f} into {pieces} pieces")
        result.extend([(p, admittance, length / pieces)] * pieces)
    return result


def compose_layers(layers: Sequence[Layer], admittance0: complex) -> TransferMatrix:
    """Free medium -> layers -> free medium, with interface matching at every boundary."""
    total = TransferMatrix.identity(admittance0)
    for p, admittance, length in layers:
        total = total.then(_layer_matrix(p, admittance, length))
    return total.then(TransferMatrix.identity(admittance0))


def transmission_log(total: TransferMatrix, k0: float, length: float) -> complex:
    """
    Natural log of t for unit incident amplitude; finite even where t underflows.

    The free phase k0 L is reduced before it meets arg M22, so channels that
    share k0 and L difference to the full precision of arg M22.
    """
    free_phase = math.remainder(k0 * length, 2.0 * math.pi)
    return complex(-total.log_scale, -free_phase) - cmath.log(complex(total.entries[1, 1]))


def layer_amplitudes(total: TransferMatrix, k0: float, length: float) -> Tuple[complex, complex]:
    """(t, r) for unit incident amplitude, origin at the midpoint of the layer stack."""
    M = total.entries
    t = cmath.exp(transmission_log(total, k0, length))
    r = -cmath.exp(-1j * k0 * length) * M[1, 0] / M[1, 1]
    return t, r


def interior_amplitudes(layers: Sequence[Layer], admittance0: complex, k0: float,
                        log_transmitted: complex) -> Tuple[np.ndarray, complex, complex]:
    """
    Back-propagate from the transmitted wave to the left end.

    Returns the left-edge local amplitudes of every layer plus the local
    (incident, reflected) amplitudes just left of the stack. Leftward
    propagation is the stable direction for evanescent layers. The wave is
    carried with unit peak modulus and a running log scale, so layers deep
    inside an opaque barrier underflow to zero on their own while the rest
    of the field keeps its true size.
    """
    length = math.fsum(layer[2] for layer in layers)
    local = np.array([1.0, 0.0], dtype=np.complex128)
    log_scale = log_transmitted + 0.5j * k0 * length
    admittance_right = admittance0
    amplitudes = np.empty((len(layers), 2), dtype=np.complex128)
    logs = np.empty(len(layers), dtype=np.complex128)

    for j in range(len(layers) - 1, -1, -1):
        p, admittance, width = layers[j]
        local = interface_matrix(admittance_right, admittance) @ local
        local = np.array([local[0] * cmath.exp(-1j * p * width), local[1] * cmath.exp(1j * p * width)])
        peak = float(np.max(np.abs(local)))
        local = local / peak
        log_scale += math.log(peak)
        amplitudes[j] = local
        logs[j] = log_scale
        admittance_right = admittance

    outside = interface_matrix(admittance_right, admittance0) @ local * cmath.exp(log_scale)
    amplitudes *= np.exp(logs)[:, None]
    return amplitudes, complex(outside[0]), complex(outside[1])


def channel_layers(barrier: PiecewiseBarrier, E: float, shift: float, m: float) -> List[Layer]:
    layers = []
    for length, height in barrier.segments:
        kin = kinematics(E, m, height, shift)
        layers.append((kin.p, kin.f, length))
    return split_layers(layers)


def _channel_label(shift: float) -> str:
    if shift < 0:
        return "+"
    if shift > 0:
        return "-"
    return "0"


def barrier_matrix(barrier: PiecewiseBarrier, E: float, shift: float = 0.0, m: float = 1.0) -> TransferMatrix:
    _, f0 = free_momentum(E, m)
    return compose_layers(channel_layers(barrier, E, shift, m), f0)


def scatter_channel(barrier: PiecewiseBarrier, E: float, shift: float = 0.0, m: float = 1.0,
                    channel: Optional[str] = None) -> ScatteringResult:
    """
    Solve one spin channel. ``shift`` is the channel potential offset (+V for
    the U+V channel) applied on [a, b] only.
    """
    k0, f0 = free_momentum(E, m)
    total = compose_layers(channel_layers(barrier, E, shift, m), f0)
    t, r = layer_amplitudes(total, k0, barrier.length)
    norm = math.sqrt(1.0 + f0 * f0)
    return ScatteringResult(
        T=t / norm,
        R=r / norm,
        channel=channel or _channel_label(shift),
        E=E,
        m=m,
        shift=shift,
        k0=k0,
        f0=f0,
        log_T=transmission_log(total, k0, barrier.length) - math.log(norm),
    )


def scatter_spin(barrier: PiecewiseBarrier, E: float, V: float,
                 m: float = 1.0) -> Tuple[ScatteringResult, ScatteringResult]:
    """(U-V channel paired with u1, U+V channel paired with u2)."""
    if V < 0:
        raise InvalidParameter(f"spin-field energy V must be non-negative, got {V}")
    return (
        scatter_channel(barrier, E, -V, m, channel="+"),
        scatter_channel(barrier, E, V, m, channel="-"),
    )


def interior_field(barrier: PiecewiseBarrier, E: float, shift: float = 0.0, m: float = 1.0) -> InteriorField:
    k0, f0 = free_momentum(E, m)
    layers = channel_layers(barrier, E, shift, m)
    total = compose_layers(layers, f0)
    t, r = layer_amplitudes(total, k0, barrier.length)
    norm = math.sqrt(1.0 + f0 * f0)

    log_T = transmission_log(total, k0, barrier.length) - math.log(norm)
    amplitudes, incident_local, _ = interior_amplitudes(layers, f0, k0, log_T)
    widths = np.array([layer[2] for layer in layers])
    edges = barrier.a + np.concatenate(([0.0], np.cumsum(widths)))
    edges[-1] = barrier.b

    return InteriorField(
        edges=_frozen(edges),
        momenta=_frozen(np.array([layer[0] for layer in layers], dtype=np.complex128)),
        admittances=_frozen(np.array([layer[1] for layer in layers], dtype=np.complex128)),
        amplitudes=_frozen(amplitudes),
        origin=barrier.midpoint,
        k0=k0,
        f0=f0,
        T=t / norm,
        R=r / norm,
        incident=incident_local * cmath.exp(0.5j * k0 * barrier.length),
    )
