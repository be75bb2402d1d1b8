"""
Larmor-clock times.

The spin-field energy V shifts the two spin channels to U +- V, so every clock
time is a V-derivative at V = 0 of one channel's amplitudes. Derivatives are
central differences of the U+V channel. The transmission phase difference is
taken from log T reduced modulo 2 pi, which stays finite after T underflows,
and the reflection one through arg(R(+h) conj R(-h)); no wrapped phases are
ever subtracted.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from larmor_clock.config import get_settings
from larmor_clock.core import free_momentum
from larmor_clock.errors import InvalidParameter, NotEvanescent, ReflectionVanishes, StepTooLarge
from larmor_clock.profiles import PiecewiseBarrier, rectangular, to_piecewise
from larmor_clock.scattering import interior_field, scatter_channel

logger = logging.getLogger(__name__)
settings = get_settings()

# large enough that the h^2 truncation term dominates roundoff
ORDER_STEP = 4e-3


@dataclass(frozen=True)
class ChannelDerivatives:
    """V-derivatives of the U+V channel at V = 0."""
    T: complex
    R: complex
    f0: float
    dalpha: float
    dbeta: float
    dT2: float
    dR2: float
    dlog_T: float
    step: float

    @property
    def resonance(self) -> bool:
        return abs(self.R) ** 2 < settings.RESONANCE_THRESHOLD

    @property
    def transmission_weight(self) -> float:
        return (1.0 + self.f0 ** 2) * abs(self.T) ** 2

    @property
    def reflection_weight(self) -> float:
        return (1.0 + self.f0 ** 2) * abs(self.R) ** 2

    def combine(self, other: "ChannelDerivatives", a: float, b: float) -> "ChannelDerivatives":
        """Linear combination a*self + b*other of the derivative fields."""
        return ChannelDerivatives(
            T=self.T,
            R=self.R,
            f0=self.f0,
            dalpha=a * self.dalpha + b * other.dalpha,
            dbeta=a * self.dbeta + b * other.dbeta,
            dT2=a * self.dT2 + b * other.dT2,
            dR2=a * self.dR2 + b * other.dR2,
            dlog_T=a * self.dlog_T + b * other.dlog_T,
            step=min(self.step, other.step),
        )


@dataclass(frozen=True)
class ClockTimes:
    tau_T: float
    tau_R: float
    tau_L: float
    tau_D: float
    fd_step: float
    converged: bool
    resonance: bool
    T: complex
    R: complex
    f0: float

    @property
    def transmission_probability(self) -> float:
        return (1.0 + self.f0 ** 2) * abs(self.T) ** 2

    @property
    def reflection_probability(self) -> float:
        return (1.0 + self.f0 ** 2) * abs(self.R) ** 2

    def to_dict(self):
        return {
            "tau_T": self.tau_T,
            "tau_R": self.tau_R,
            "tau_L": self.tau_L,
            "tau_D": self.tau_D,
        }


@dataclass(frozen=True)
class RectangularKinematics:
    E: float
    m: float
    U0: float
    d: float
    k0: float
    f0: float
    xi: float
    kappa: float


@dataclass(frozen=True)
class HartmanPoint:
    d: float
    tau_T: float
    tau_free: float

    @property
    def ratio(self) -> float:
        return self.tau_T / self.tau_free if self.tau_free > 0 else math.nan


def channel_derivatives(barrier, E: float, h: Optional[float] = None, m: float = 1.0,
                        n_segments: Optional[int] = None) -> ChannelDerivatives:
    """One central difference of the U+V channel with step h."""
    h = h or settings.FD_STEP
    if not h > 0:
        raise InvalidParameter(f"finite-difference step must be positive, got {h}")
    barrier = to_piecewise(barrier, n_segments)

    base = scatter_channel(barrier, E, 0.0, m)
    up = scatter_channel(barrier, E, h, m)
    down = scatter_channel(barrier, E, -h, m)

    return ChannelDerivatives(
        T=base.T,
        R=base.R,
        f0=base.f0,
        dalpha=math.remainder(up.log_T.imag - down.log_T.imag, 2.0 * math.pi) / (2.0 * h),
        dbeta=cmath.phase(up.R * down.R.conjugate()) / (2.0 * h),
        dT2=(abs(up.T) ** 2 - abs(down.T) ** 2) / (2.0 * h),
        dR2=(abs(up.R) ** 2 - abs(down.R) ** 2) / (2.0 * h),
        dlog_T=(up.log_T.real - down.log_T.real) / (2.0 * h),
        step=h,
    )


def _halved_derivatives(barrier: PiecewiseBarrier, E: float, h: float, m: float, richardson: bool,
                        rtol: float, atol: float) -> Tuple[ChannelDerivatives, bool]:
    coarse = channel_derivatives(barrier, E, h, m)
    fine = channel_derivatives(barrier, E, 0.5 * h, m)

    checks = [(coarse.dalpha, fine.dalpha)]
    if not fine.resonance:
        checks.append((coarse.dbeta, fine.dbeta))
    converged = all(abs(c - f) <= rtol * abs(f) + atol for c, f in checks)

    if richardson:
        fine = fine.combine(coarse, 4.0 / 3.0, -1.0 / 3.0)
    return fine, converged


def clock_times(barrier, E: float, m: float = 1.0, h: Optional[float] = None, richardson: bool = False,
                n_segments: Optional[int] = None, rtol: Optional[float] = None,
                atol: Optional[float] = None) -> ClockTimes:
    """tau_T, tau_R, tau_L and tau_D in one pass, with a step-halving diagnostic."""
    h = h or settings.FD_STEP
    rtol = rtol or settings.STEP_HALVING_RTOL
    atol = atol or settings.STEP_HALVING_ATOL
    barrier = to_piecewise(barrier, n_segments)

    deriv, converged = _halved_derivatives(barrier, E, h, m, richardson, rtol, atol)
    if not converged:
        logger.warning(f"Step halving from h={h:g} moved the clock times beyond rtol={rtol:g} at E={E}")

    tau_T = -deriv.dalpha
    if deriv.resonance:
        logger.warning(f"Transmission resonance at E={E}: |R|^2 = {abs(deriv.R) ** 2:.3e}, tau_R undefined")
        tau_R = math.nan
        tau_L = deriv.transmission_weight * tau_T
    else:
        tau_R = -deriv.dbeta
        tau_L = deriv.transmission_weight * tau_T + deriv.reflection_weight * tau_R

    return ClockTimes(
        tau_T=tau_T,
        tau_R=tau_R,
        tau_L=tau_L,
        tau_D=dwell_time(barrier, E, m),
        fd_step=deriv.step,
        converged=converged,
        resonance=deriv.resonance,
        T=deriv.T,
        R=deriv.R,
        f0=deriv.f0,
    )


def phase_times(barrier, E: float, h: Optional[float] = None, m: float = 1.0,
                n_segments: Optional[int] = None) -> Tuple[float, float]:
    """(tau_T, tau_R) as minus the V-derivatives of the transmission and reflection phases."""
    h = h or settings.FD_STEP
    rtol, atol = settings.STEP_HALVING_RTOL, settings.STEP_HALVING_ATOL
    barrier = to_piecewise(barrier, n_segments)

    deriv, converged = _halved_derivatives(barrier, E, h, m, False, rtol, atol)
    if deriv.resonance:
        raise ReflectionVanishes(f"|R|^2 = {abs(deriv.R) ** 2:.3e} at E={E}; the reflection phase is undefined")
    if not converged:
        raise StepTooLarge(f"halving h={h:g} changed the phase times by more than rtol={rtol:g}")
    return -deriv.dalpha, -deriv.dbeta


class LarmorReading(NamedTuple):
    tau_L: float
    resonance: bool


def larmor_time(barrier, E: float, h: Optional[float] = None, m: float = 1.0,
                n_segments: Optional[int] = None) -> LarmorReading:
    """tau_L and whether it was taken at a transmission resonance (reflection term dropped)."""
    times = clock_times(barrier, E, m=m, h=h, n_segments=n_segments)
    if not times.converged:
        raise StepTooLarge(f"halving h={times.fd_step:g} did not settle the Larmor time at E={E}")
    return LarmorReading(times.tau_L, times.resonance)


def step_halving_order(barrier, E: float, h: Optional[float] = None, m: float = 1.0,
                       n_segments: Optional[int] = None) -> float:
    """Observed order of the tau_T central difference from the steps h, h/2 and h/4."""
    h = h or ORDER_STEP
    barrier = to_piecewise(barrier, n_segments)
    taus = [-channel_derivatives(barrier, E, h / 2 ** j, m).dalpha for j in range(3)]
    coarse, fine = abs(taus[0] - taus[1]), abs(taus[1] - taus[2])
    if coarse == 0.0 or fine == 0.0:
        return math.nan
    return math.log2(coarse / fine)


def dwell_time(barrier, E: float, m: float = 1.0, n_segments: Optional[int] = None) -> float:
    """Integrated density over [a, b] divided by the incident flux 2 f0 / (1 + f0^2)."""
    field = interior_field(to_piecewise(barrier, n_segments), E, 0.0, m)
    flux = 2.0 * field.f0 / (1.0 + field.f0 ** 2)
    return field.integrated_density() / flux


def alignment_times(barrier, E: float, h: Optional[float] = None, m: float = 1.0,
                    n_segments: Optional[int] = None) -> Tuple[float, float]:
    """
    (-d ln|T|/dV, -d ln|R|/dV): how fast the confined field rotates the
    transmitted and reflected spins towards the z axis.
    """
    deriv = channel_derivatives(barrier, E, h, m, n_segments)
    tau_z_T = -deriv.dlog_T
    tau_z_R = math.nan if deriv.resonance else -0.5 * deriv.dR2 / abs(deriv.R) ** 2
    return tau_z_T, tau_z_R


def free_traversal_time(E: float, L: float, m: float = 1.0) -> float:
    if not L > 0:
        raise InvalidParameter(f"traversal length must be positive, got {L}")
    k0, _ = free_momentum(E, m)
    return L * E / k0


def rectangular_kinematics(E: float, U0: float, d: float, m: float = 1.0) -> RectangularKinematics:
    if d < 0:
        raise InvalidParameter(f"half width must be non-negative, got {d}")
    k0, f0 = free_momentum(E, m)
    top = m + U0
    if E >= top - settings.EVANESCENT_GUARD:
        raise NotEvanescent(f"E = {E} is not below the barrier top m + U0 = {top} (guard {settings.EVANESCENT_GUARD:g})")
    return RectangularKinematics(
        E=E, m=m, U0=U0, d=d, k0=k0, f0=f0,
        xi=top + E,
        kappa=math.sqrt(top * top - E * E),
    )


def analytic_rect_tau_T(E: float, U0: float, d: float, m: float = 1.0) -> float:
    """Closed-form transmission time of the rectangular barrier of half width d."""
    rk = rectangular_kinematics(E, U0, d, m)
    f0, xi, k = rk.f0, rk.xi, rk.kappa
    y = 2.0 * d * k
    a2 = k * k + f0 * f0 * xi * xi
    linear = 4.0 * d * k * xi * E * (k * k - f0 * f0 * xi * xi)
    hyperbolic = (k * k + E * xi) * a2

    if 2.0 * y <= settings.OVERFLOW_EXPONENT:
        numerator = linear + hyperbolic * math.sinh(2.0 * y)
        denominator = 4.0 * (f0 * xi * k) ** 2 + a2 * a2 * math.sinh(y) ** 2
    else:
        # both sides divided by sinh^2(y); sinh(2y)/sinh^2(y) = 2 coth(y)
        inverse = 0.0 if y > 0.5 * settings.OVERFLOW_EXPONENT else 1.0 / math.sinh(y) ** 2
        numerator = linear * inverse + 2.0 * hyperbolic / math.tanh(y)
        denominator = 4.0 * (f0 * xi * k) ** 2 * inverse + a2 * a2

    if denominator == 0.0:
        return 0.0
    return f0 / k * numerator / denominator


def hartman_limit(E: float, U0: float, m: float = 1.0) -> float:
    """Saturation value of the rectangular transmission time as d grows."""
    rk = rectangular_kinematics(E, U0, 0.0, m)
    f0, xi, k = rk.f0, rk.xi, rk.kappa
    return 2.0 * f0 * (k * k + E * xi) / (k * (k * k + f0 * f0 * xi * xi))


def hartman_sweep(E: float, U0: float, m: float = 1.0, d_list: Sequence[float] = (),
                  numeric: bool = False) -> List[HartmanPoint]:
    """tau_T(d) against the free flight time over 2d for each half width."""
    points = []
    for d in d_list:
        if not numeric:
            tau_T = analytic_rect_tau_T(E, U0, d, m)
        elif d == 0:
            tau_T = 0.0
        else:
            tau_T, _ = phase_times(rectangular(U0, d), E, m=m)
        tau_free = free_traversal_time(E, 2.0 * d, m) if d > 0 else 0.0
        points.append(HartmanPoint(d=float(d), tau_T=tau_T, tau_free=tau_free))
    return points


def superluminal_width(E: float, U0: float, m: float = 1.0, d_max: Optional[float] = None,
                       samples: int = 200) -> float:
    """Half width beyond which tau_T(d) < tau_free(2d) everywhere on the scan up to d_max."""
    kappa = rectangular_kinematics(E, U0, 0.0, m).kappa
    d_max = d_max or 20.0 / kappa
    grid = np.geomspace(1e-3 * d_max, d_max, samples)

    def excess(d):
        return analytic_rect_tau_T(E, U0, d, m) - free_traversal_time(E, 2.0 * d, m)

    values = np.array([excess(d) for d in grid])
    slower = np.nonzero(values >= 0.0)[0]
    if len(slower) == 0:
        logger.debug(f"tau_T < tau_free over the whole scan at E={E}, U0={U0}")
        return float(grid[0])
    last = slower[-1]
    if last == len(grid) - 1:
        raise InvalidParameter(f"no superluminal crossover below d_max = {d_max:g}")
    if values[last] == 0.0:
        return float(grid[last])
    return float(brentq(excess, grid[last], grid[last + 1], xtol=1e-12))
