"""
Independent check of the transfer-matrix solver: integrate the first-order
channel equations across the barrier with an adaptive Runge-Kutta scheme.

    phi' = i (eps + M(x)) chi,    chi' = i (eps - M(x)) phi

with M(x) = m + U(x) and eps = E - shift inside [a, b]. Integration runs from b
to a starting from a pure transmitted wave, so no boundary-value problem has to
be solved.
"""

import cmath
import logging
import math
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp

from larmor_clock.config import get_settings
from larmor_clock.core import free_momentum
from larmor_clock.errors import IntegratorFailure, Overflow
from larmor_clock.profiles import PIECEWISE, RECTANGULAR, BarrierProfile, PiecewiseBarrier
from larmor_clock.scattering import ScatteringResult

logger = logging.getLogger(__name__)
settings = get_settings()

Target = Union[BarrierProfile, PiecewiseBarrier]
# (x_start, x_end, potential on the piece)
Piece = Tuple[float, float, Callable[[float], float]]


def _constant(height: float) -> Callable[[float], float]:
    return lambda x: height


def _pieces(target: Target) -> List[Piece]:
    """Intervals without potential discontinuities, ordered left to right."""
    if isinstance(target, PiecewiseBarrier):
        edges = target.edges()
        return [(edges[j], edges[j + 1], _constant(h)) for j, h in enumerate(target.heights)]

    if target.kind in (RECTANGULAR, PIECEWISE):
        return _pieces(target.as_piecewise())

    xs = np.asarray(target.xs)
    us = np.asarray(target.us)
    return [(target.a, target.b, lambda x: float(np.interp(x, xs, us)))]


def ode_oracle(target: Target, E: float, shift: float = 0.0, m: float = 1.0,
               rtol: Optional[float] = None, atol: Optional[float] = None) -> ScatteringResult:
    rtol = rtol or settings.ODE_RTOL
    atol = atol or settings.ODE_ATOL
    k0, f0 = free_momentum(E, m)
    eps = E - shift

    a, b = float(target.a), float(target.b)
    half = 0.5 * (b - a)

    y = np.array([cmath.exp(1j * k0 * half), f0 * cmath.exp(1j * k0 * half)], dtype=np.complex128)
    evaluations = 0

    for start, end, potential in reversed(_pieces(target)):
        def rhs(x, state, potential=potential):
            mass = m + potential(x)
            return np.array([1j * (eps + mass) * state[1], 1j * (eps - mass) * state[0]])

        sol = solve_ivp(rhs, (end, start), y, method="DOP853", rtol=rtol, atol=atol)
        if not sol.success:
            raise IntegratorFailure(f"integration over [{start:.6g}, {end:.6g}] failed: {sol.message}")
        evaluations += sol.nfev
        y = sol.y[:, -1]
        if not np.all(np.isfinite(y)):
            raise Overflow(f"oracle state overflowed on [{start:.6g}, {end:.6g}]")

    logger.debug(f"ODE oracle used {evaluations} right-hand side evaluations")

    phi, chi = y
    incident = 0.5 * (phi + chi / f0) * cmath.exp(1j * k0 * half)
    reflected = 0.5 * (phi - chi / f0) * cmath.exp(-1j * k0 * half)
    norm = math.sqrt(1.0 + f0 * f0)

    return ScatteringResult(
        T=complex(1.0 / incident) / norm,
        R=complex(reflected / incident) / norm,
        channel="+" if shift < 0 else "-" if shift > 0 else "0",
        E=E,
        m=m,
        shift=shift,
        k0=k0,
        f0=f0,
    )
