"""
Invariant suite run by ``python -m larmor_clock.main validate``.

Each suite measures a worst-case error over its cases and compares it with a
tolerance; a single override tolerance replaces every suite's default.
"""

import logging
import math
import time
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, computed_field

from larmor_clock.clock import (
    analytic_rect_tau_T,
    channel_derivatives,
    clock_times,
    hartman_limit,
    hartman_sweep,
    phase_times,
    step_halving_order,
)
from larmor_clock.core import SpinOrientation
from larmor_clock.errors import LarmorError
from larmor_clock.oracle import ode_oracle
from larmor_clock.profiles import PiecewiseBarrier, discretize, gaussian, rectangular
from larmor_clock.schrodinger import schrodinger_reference
from larmor_clock.scattering import scatter_channel, scatter_spin
from larmor_clock.spin import (
    extract_precession_time,
    first_order_transmitted,
    pauli_algebra_residual,
    resummed_spin,
    summed_spin,
    transmitted_spin,
)

logger = logging.getLogger(__name__)

THRESHOLD_GAP = 0.05
RELATIVISTIC_GAP = 0.05


class SuiteResult(BaseModel):
    name: str
    cases: int
    max_error: float
    tolerance: float
    passed: bool
    message: str = ""


class ValidationReport(BaseModel):
    seed: int
    duration: float
    suites: List[SuiteResult]

    @computed_field
    @property
    def passed(self) -> bool:
        return all(suite.passed for suite in self.suites)

    def failures(self) -> List[SuiteResult]:
        return [suite for suite in self.suites if not suite.passed]


def random_barrier_family(count: int, seed: int = 0, max_segments: int = 10, symmetric: bool = False,
                          m: float = 1.0) -> List[Tuple[PiecewiseBarrier, float]]:
    """
    Random (barrier, E) pairs: up to max_segments steps, heights in [0, 2m],
    lengths in [0.1, 1], E in (1.05m, 3m). Draws with E within 0.05m of any
    segment threshold m + W are rejected.
    """
    rng = np.random.default_rng(seed)
    family = []
    while len(family) < count:
        n = int(rng.integers(1, max_segments + 1))
        lengths = rng.uniform(0.1, 1.0, n)
        heights = rng.uniform(0.0, 2.0 * m, n)
        if symmetric:
            lengths = np.concatenate((lengths, lengths[::-1]))
            heights = np.concatenate((heights, heights[::-1]))
        E = float(rng.uniform(1.05 * m, 3.0 * m))
        if np.any(np.abs(E - m - heights) < THRESHOLD_GAP * m):
            continue
        family.append((PiecewiseBarrier(tuple(zip(lengths.tolist(), heights.tolist()))), E))
    return family


def _relative(value: float, reference: float) -> float:
    return abs(value - reference) / abs(reference)


def _suite(name: str, errors: List[float], tolerance: float, message: str = "") -> SuiteResult:
    worst = float(max(errors)) if errors else math.inf
    passed = bool(errors) and worst <= tolerance
    level = logging.INFO if passed else logging.ERROR
    logger.log(level, f"Suite {name}: {len(errors)} cases, max error {worst:.3e} (tol {tolerance:.1e})")
    return SuiteResult(name=name, cases=len(errors), max_error=worst, tolerance=tolerance, passed=passed,
                       message=message)


def unitarity_suite(seed: int, tol: Optional[float]) -> SuiteResult:
    errors = []
    for barrier, E in random_barrier_family(50, seed):
        for shift in (0.0, 1e-3, -1e-3):
            errors.append(abs(scatter_channel(barrier, E, shift).unitarity_residual))
    return _suite("unitarity", errors, tol or 1e-12)


def smooth_unitarity_suite(seed: int, tol: Optional[float]) -> SuiteResult:
    errors = []
    profile = gaussian(1.0, 1.0)
    for n in (1024, 4096):
        barrier = discretize(profile, n)
        for E in (1.2, 1.6, 2.4):
            errors.append(abs(scatter_channel(barrier, E).unitarity_residual))
    return _suite("smooth_unitarity", errors, tol or 1e-8)


def central_identity_suite(seed: int, tol: Optional[float]) -> SuiteResult:
    errors = []
    for barrier, E in random_barrier_family(50, seed + 1):
        times = clock_times(barrier, E)
        errors.append(_relative(times.tau_L, times.tau_D) if times.converged else math.inf)
    return _suite("larmor_equals_dwell", errors, tol or 1e-6)


def step_order_suite(seed: int, tol: Optional[float]) -> SuiteResult:
    """Median observed order of the central difference over the identity family."""
    orders = [step_halving_order(barrier, E) for barrier, E in random_barrier_family(50, seed + 1)]
    orders = [order for order in orders if math.isfinite(order)]
    median = float(np.median(orders)) if orders else math.nan
    errors = [abs(median - 2.0)] if orders else []
    return _suite("step_halving_order", errors, tol or 0.1, message=f"median observed order {median:.3f}")


def symmetric_suite(seed: int, tol: Optional[float]) -> SuiteResult:
    errors = []
    cases = random_barrier_family(10, seed + 2, max_segments=5, symmetric=True)
    cases.append((rectangular(1.0, 1.0).as_piecewise(), 1.2))
    for barrier, E in cases:
        result = scatter_channel(barrier, E)
        errors.append(abs(math.remainder(result.alpha - result.beta - 0.5 * math.pi, math.pi)))
        times = clock_times(barrier, E)
        errors.append(_relative(times.tau_R, times.tau_T))
        errors.append(_relative(times.tau_L, times.tau_D))
        errors.append(_relative(times.tau_T, times.tau_D))
    return _suite("symmetric_barriers", errors, tol or 1e-6)


def closed_form_suite(seed: int, tol: Optional[float]) -> SuiteResult:
    errors = []
    U0 = 1.0
    for E in np.linspace(1.02, 1.9, 20):
        for d in np.geomspace(0.1, 5.0, 10):
            tau_T, _ = phase_times(rectangular(U0, d), E)
            errors.append(_relative(tau_T, analytic_rect_tau_T(E, U0, d)))
    return _suite("rectangular_closed_form", errors, tol or 1e-8)


def hartman_suite(seed: int, tol: Optional[float]) -> SuiteResult:
    errors = []
    for E, U0 in ((1.2, 1.0), (1.5, 1.0), (2.0, 3.0)):
        limit = hartman_limit(E, U0)
        kappa = math.sqrt((1.0 + U0) ** 2 - E * E)
        for d in (12.0 / kappa, 20.0 / kappa, 250.0 / kappa):
            errors.append(abs(analytic_rect_tau_T(E, U0, d) - limit))
            tau_T, _ = phase_times(rectangular(U0, d), E)
            errors.append(abs(tau_T - limit))

    # apparent superluminality: tau_T below the free flight time once 2d > 1
    for point in hartman_sweep(1.2, 1.0, d_list=np.geomspace(0.5, 5.0, 30)):
        errors.append(max(0.0, point.tau_T - point.tau_free))
    return _suite("hartman_saturation", errors, tol or 1e-8)


def oracle_suite(seed: int, tol: Optional[float]) -> SuiteResult:
    errors = []
    for barrier, E in random_barrier_family(10, seed + 3, max_segments=10):
        for shift in (0.0, 1e-3):
            matrix = scatter_channel(barrier, E, shift)
            oracle = ode_oracle(barrier, E, shift)
            errors.append(abs(matrix.T - oracle.T))
            errors.append(abs(matrix.R - oracle.R))
    return _suite("ode_oracle", errors, tol or 1e-6)


def nonrelativistic_suite(seed: int, tol: Optional[float]) -> SuiteResult:
    """Dirac and Schrodinger transmission times agree near rest and differ far from it."""
    U0, d = 0.02, 20.0
    errors = []
    for kinetic in (0.005, 0.01):
        barrier = rectangular(U0, d)
        dirac, _ = phase_times(barrier, 1.0 + kinetic)
        reference = schrodinger_reference(barrier, kinetic)
        errors.append(_relative(dirac, reference.tau_T))

    barrier = rectangular(2.0, 5.0)
    dirac, _ = phase_times(barrier, 2.0)
    gap = _relative(dirac, schrodinger_reference(barrier, 1.0).tau_T)
    result = _suite("nonrelativistic_limit", errors, tol or 1e-2)
    if gap <= RELATIVISTIC_GAP:
        result.passed = False
        result.message = f"relativistic control gap {gap:.3f} not above {RELATIVISTIC_GAP}"
    else:
        result.message = f"relativistic control gap {gap:.3f}"
    return result


def spin_first_order_suite(seed: int, tol: Optional[float]) -> SuiteResult:
    """Exact spin minus first-order expansion must shrink as V^2."""
    orientation = SpinOrientation(math.pi / 2, 0.3)
    fields = np.array([1e-4, 5e-5, 2.5e-5])
    cases = [
        (rectangular(1.0, 1.0).as_piecewise(), 1.2),
        (PiecewiseBarrier(((1.0, 0.5), (1.0, 1.0))), 1.3),
    ]
    errors = []
    for barrier, E in cases:
        deriv = channel_derivatives(barrier, E)
        for exact, approximate in ((transmitted_spin, first_order_transmitted), (summed_spin, resummed_spin)):
            deviations = [
                exact(scatter_spin(barrier, E, V), orientation).distance(approximate(deriv, orientation, V))
                for V in fields
            ]
            order = np.polyfit(np.log(fields), np.log(deviations), 1)[0]
            errors.append(abs(order - 2.0))
    return _suite("spin_first_order", errors, tol or 0.1)


def clock_readout_suite(seed: int, tol: Optional[float]) -> SuiteResult:
    V = 1e-6
    orientation = SpinOrientation(math.pi / 2, 0.0)
    cases = [(rectangular(1.0, 1.0).as_piecewise(), 1.2)] + random_barrier_family(9, seed + 4)
    errors = []
    for barrier, E in cases:
        channels = scatter_spin(barrier, E, V)
        reading = extract_precession_time(summed_spin(channels, orientation), orientation, channels[0].f0, 2.0 * V)
        times = clock_times(barrier, E)
        errors.append(_relative(reading.time, times.tau_L))
    return _suite("clock_readout", errors, tol or 1e-5)


def pauli_suite(seed: int, tol: Optional[float]) -> SuiteResult:
    return _suite("pauli_algebra", [pauli_algebra_residual()], tol or 1e-14)


SUITES: List[Callable[[int, Optional[float]], SuiteResult]] = [
    pauli_suite,
    unitarity_suite,
    smooth_unitarity_suite,
    central_identity_suite,
    step_order_suite,
    symmetric_suite,
    closed_form_suite,
    hartman_suite,
    oracle_suite,
    nonrelativistic_suite,
    spin_first_order_suite,
    clock_readout_suite,
]


def run_validation(seed: int = 0, tol: Optional[float] = None) -> ValidationReport:
    logger.info(f"Starting validation (seed={seed}, tolerance override={tol})")
    started = time.perf_counter()
    results = []
    for suite in SUITES:
        try:
            results.append(suite(seed, tol))
        except LarmorError as e:
            logger.error(f"Suite {suite.__name__} raised {type(e).__name__}: {e}")
            results.append(SuiteResult(name=suite.__name__.removesuffix("_suite"), cases=0, max_error=math.inf,
                                       tolerance=tol or math.nan, passed=False, message=f"{type(e).__name__}: {e}"))
    report = ValidationReport(seed=seed, duration=time.perf_counter() - started, suites=results)
    logger.info(f"Validation finished in {report.duration:.1f}s: {len(report.failures())} failing suites")
    return report
