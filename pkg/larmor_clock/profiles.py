"""
Barrier profiles U(x) on a finite support [a, b] and their piecewise-constant
discretization.

Profiles come in three kinds: a centred rectangle, an explicit list of
(length, height) steps laid out centred on the origin, and a sampled grid that
is linearly interpolated (zero outside the samples). A Gaussian is built as a
sampled profile truncated at ``cutoff`` widths.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence, Tuple

import numpy as np

from larmor_clock.config import get_settings
from larmor_clock.errors import InvalidParameter, MalformedProfile

logger = logging.getLogger(__name__)

RECTANGULAR = "rectangular"
PIECEWISE = "piecewise"
SAMPLED = "sampled"
GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class PiecewiseBarrier:
    segments: Tuple[Tuple[float, float], ...]
    a: float = field(default=None)

    def __post_init__(self):
        if not self.segments:
            raise MalformedProfile("a piecewise barrier needs at least one segment")
        segments = tuple((float(length), float(height)) for length, height in self.segments)
        for length, height in segments:
            if not (math.isfinite(length) and length > 0):
                raise MalformedProfile(f"segment length must be positive and finite, got {length}")
            if not math.isfinite(height):
                raise MalformedProfile(f"segment height must be finite, got {height}")
        object.__setattr__(self, "segments", segments)
        if self.a is None:
            object.__setattr__(self, "a", -0.5 * self.length)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([length for length, _ in self.segments])

    @property
    def heights(self) -> np.ndarray:
        return np.array([height for _, height in self.segments])

    @property
    def length(self) -> float:
        return math.fsum(length for length, _ in self.segments)

    @property
    def b(self) -> float:
        return self.a + self.length

    @property
    def midpoint(self) -> float:
        return self.a + 0.5 * self.length

    def edges(self) -> np.ndarray:
        return self.a + np.concatenate(([0.0], np.cumsum(self.lengths)))

    def reversed(self) -> "PiecewiseBarrier":
        return PiecewiseBarrier(tuple(reversed(self.segments)), a=self.a)

    def split(self, index: int, fraction: float = 0.5) -> "PiecewiseBarrier":
        """Same barrier with segment ``index`` cut in two at ``fraction`` of its length."""
        if not 0.0 < fraction < 1.0:
            raise InvalidParameter(f"split fraction must lie in (0, 1), got {fraction}")
        length, height = self.segments[index]
        pieces = ((length * fraction, height), (length * (1.0 - fraction), height))
        segments = self.segments[:index] + pieces + self.segments[index + 1:]
        return PiecewiseBarrier(segments, a=self.a)

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        return all(
            abs(l1 - l2) <= tol and abs(h1 - h2) <= tol
            for (l1, h1), (l2, h2) in zip(self.segments, reversed(self.segments))
        )

    def __repr__(self):
        return f"PiecewiseBarrier({len(self.segments)} segments on [{self.a:.6g}, {self.b:.6g}])"


@dataclass(frozen=True)
class BarrierProfile:
    kind: str
    a: float
    b: float
    U0: Optional[float] = None
    d: Optional[float] = None
    steps: Tuple[Tuple[float, float], ...] = ()
    xs: Tuple[float, ...] = ()
    us: Tuple[float, ...] = ()

    def __post_init__(self):
        if not self.b > self.a:
            raise MalformedProfile(f"empty support [{self.a}, {self.b}]")

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def piecewise_constant(self) -> bool:
        return self.kind in (RECTANGULAR, PIECEWISE)

    def potential(self, x):
        """U(x), vectorised; zero outside [a, b]."""
        x = np.asarray(x, dtype=float)
        inside = (x >= self.a) & (x <= self.b)

        if self.kind == RECTANGULAR:
            values = np.where(inside, self.U0, 0.0)
        elif self.kind == PIECEWISE:
            edges = self.a + np.concatenate(([0.0], np.cumsum([length for length, _ in self.steps])))
            heights = np.array([height for _, height in self.steps])
            index = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, len(heights) - 1)
            values = np.where(inside, heights[index], 0.0)
        else:
            values = np.interp(x, self.xs, self.us, left=0.0, right=0.0)

        return values if values.ndim else float(values)

    def as_piecewise(self) -> PiecewiseBarrier:
        """Exact segmentation of a piecewise-constant profile."""
        if self.kind == RECTANGULAR:
            return PiecewiseBarrier(((self.length, self.U0),), a=self.a)
        if self.kind == PIECEWISE:
            return PiecewiseBarrier(self.steps, a=self.a)
        raise MalformedProfile(f"a {self.kind} profile has no exact segmentation; use discretize()")


def _as_mapping(data: Any) -> Mapping:
    if hasattr(data, "model_dump"):
        return data.model_dump()
    if isinstance(data, Mapping):
        return data
    raise MalformedProfile(f"cannot read a barrier description from {type(data).__name__}")


def _positive(data: Mapping, key: str) -> float:
    try:
        value = float(data[key])
    except (KeyError, TypeError, ValueError):
        raise MalformedProfile(f"barrier field '{key}' is missing or not a number")
    if not (math.isfinite(value) and value > 0):
        raise MalformedProfile(f"barrier field '{key}' must be positive and finite, got {value}")
    return value


def rectangular(U0: float, d: float) -> BarrierProfile:
    return make_profile({"kind": RECTANGULAR, "U0": U0, "d": d})


def gaussian(U0: float, width: float, cutoff: float = 4.0, samples: int = 2001) -> BarrierProfile:
    return make_profile({"kind": GAUSSIAN, "U0": U0, "width": width, "cutoff": cutoff, "samples": samples})


def piecewise(steps: Sequence[Tuple[float, float]]) -> BarrierProfile:
    return make_profile({"kind": PIECEWISE, "segments": steps})


def make_profile(data) -> BarrierProfile:
    data = _as_mapping(data)
    kind = data.get("kind")

    if kind == RECTANGULAR:
        U0 = _positive(data, "U0")
        d = _positive(data, "d")
        return BarrierProfile(kind=RECTANGULAR, a=-d, b=d, U0=U0, d=d)

    if kind == PIECEWISE:
        steps = tuple(tuple(step) for step in data.get("segments") or ())
        if not steps:
            raise MalformedProfile("piecewise barrier needs at least one (length, height) step")
        # PiecewiseBarrier performs the per-step checks
        barrier = PiecewiseBarrier(steps)
        return BarrierProfile(kind=PIECEWISE, a=barrier.a, b=barrier.b, steps=barrier.segments)

    if kind == GAUSSIAN:
        U0 = _positive(data, "U0")
        width = _positive(data, "width")
        cutoff = _positive({"cutoff": data.get("cutoff", 4.0)}, "cutoff")
        samples = int(data.get("samples", 2001))
        if samples < 3:
            raise MalformedProfile(f"a sampled Gaussian needs at least 3 samples, got {samples}")
        half = cutoff * width
        xs = np.linspace(-half, half, samples)
        us = U0 * np.exp(-(xs / width) ** 2)
        return BarrierProfile(kind=SAMPLED, a=-half, b=half, U0=U0, d=width,
                              xs=tuple(xs.tolist()), us=tuple(us.tolist()))

    if kind == SAMPLED:
        points = np.asarray(data.get("points") or (), dtype=float)
        if points.ndim != 2 or points.shape[1] != 2 or len(points) < 2:
            raise MalformedProfile("sampled barrier needs at least two (x, U) points")
        xs, us = points[:, 0], points[:, 1]
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(us))):
            raise MalformedProfile("sampled barrier contains non-finite values")
        if np.any(np.diff(xs) <= 0):
            raise MalformedProfile("sample positions must be strictly increasing")
        return BarrierProfile(kind=SAMPLED, a=float(xs[0]), b=float(xs[-1]),
                              xs=tuple(xs.tolist()), us=tuple(us.tolist()))

    raise MalformedProfile(f"unknown barrier kind {kind!r}")


def discretize(profile: BarrierProfile, n: int) -> PiecewiseBarrier:
    """n equal segments with heights sampled at the segment midpoints."""
    if n < 1:
        raise InvalidParameter(f"segment count must be at least 1, got {n}")
    width = profile.length / n
    midpoints = profile.a + width * (np.arange(n) + 0.5)
    heights = profile.potential(midpoints)
    logger.debug(f"Discretized {profile.kind} profile into {n} segments of width {width:.3e}")
    return PiecewiseBarrier(tuple((width, float(h)) for h in np.atleast_1d(heights)), a=profile.a)


def to_piecewise(target, n: Optional[int] = None) -> PiecewiseBarrier:
    """Segmentation used by the solvers: exact for step profiles, midpoint discretization otherwise."""
    if isinstance(target, PiecewiseBarrier):
        return target
    if target.piecewise_constant:
        return target.as_piecewise()
    return discretize(target, n or get_settings().DEFAULT_SEGMENTS)
