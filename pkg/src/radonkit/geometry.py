"""Line parametrization and the sample grids on which Radon data is measured.

A line is identified by its signed distance ``t`` from the origin and the
angle ``theta`` in [0, pi) of its unit normal (cos(theta), sin(theta)); the
point (t*cos(theta), t*sin(theta)) is the foot of the perpendicular.  Sample
sets are immutable and ordered angle-major, offset ascending, which matches
the column-stacking convention of the algebraic reconstruction system.
"""

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np


class LineParam(NamedTuple):
    """Signed offset and normal angle (radians, in [0, pi)) of a line."""

    t: float
    theta: float


@dataclass(frozen=True)
class ParallelBeam:
    """Parallel-beam layout: N angles l*pi/N, offsets k*d for k = -M..M."""

    n_angles: int
    half_offsets: int
    spacing: float


@dataclass(frozen=True)
class Scattered:
    """Unstructured layout of n independent (t, theta) samples."""

    count: int
    seed: int | None = None


@dataclass(frozen=True)
class SampleSet:
    """Ordered collection of line parameters plus its layout tag.

    ``t`` and ``theta`` are parallel arrays; for a parallel-beam layout the
    ordering is angle-major with offsets ascending within each angle, and
    every angle is stored as the exact double ``l * pi / N`` so that equality
    tests between angles on the grid are exact.
    """

    t: np.ndarray
    theta: np.ndarray
    layout: ParallelBeam | Scattered = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "t", np.asarray(self.t, dtype=float))
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=float))
        if self.t.shape != self.theta.shape or self.t.ndim != 1:
            raise ValueError("t and theta must be 1-D arrays of equal length")
        if self.theta.size and (self.theta.min() < 0.0 or self.theta.max() >= np.pi):
            raise ValueError("angles must lie in [0, pi)")
        self.t.setflags(write=False)
        self.theta.setflags(write=False)

    def __len__(self) -> int:
        return self.t.size

    def __iter__(self) -> Iterator[LineParam]:
        for t, th in zip(self.t, self.theta):
            yield LineParam(float(t), float(th))

    def __getitem__(self, i) -> LineParam:
        return LineParam(float(self.t[i]), float(self.theta[i]))


def line_point(line: LineParam, s: float):
    """Point on the line at arclength ``s`` from the perpendicular foot.

    Returns (t*cos(theta) - s*sin(theta), t*sin(theta) + s*cos(theta)); the
    returned point satisfies x^2 + y^2 = t^2 + s^2.
    """
    t, theta = line
    ct, st = np.cos(theta), np.sin(theta)
    return (t * ct - s * st, t * st + s * ct)


def line_coordinates(point, theta: float):
    """Invert :func:`line_point`: offset/arclength of ``point`` at angle theta.

    Returns (t, s) with t = x*cos(theta) + y*sin(theta) and
    s = -x*sin(theta) + y*cos(theta).
    """
    x, y = point
    ct, st = np.cos(theta), np.sin(theta)
    return (x * ct + y * st, -x * st + y * ct)


def parallel_beam_samples(n_angles: int, half_offsets: int, spacing: float) -> SampleSet:
    """Build the parallel-beam grid of N*(2M+1) line samples.

    Parameters
    ----------
    n_angles : int
        Number of equally spaced angles l*pi/N, l = 0..N-1.  Must be >= 1.
    half_offsets : int
        Offsets run over k*spacing for k = -M..M.  Must be >= 0.
    spacing : float
        Offset spacing d > 0.

    Returns
    -------
    SampleSet
        Angle-major ordering, offsets ascending within each angle.
    """
    if n_angles < 1:
        raise ValueError(f"n_angles must be >= 1, got {n_angles}")
    if half_offsets < 0:
        raise ValueError(f"half_offsets must be >= 0, got {half_offsets}")
    if not spacing > 0:
        raise ValueError(f"spacing must be positive, got {spacing}")
    offsets = spacing * np.arange(-half_offsets, half_offsets + 1)
    angles = np.array([l * np.pi / n_angles for l in range(n_angles)])
    t = np.tile(offsets, n_angles)
    theta = np.repeat(angles, offsets.size)
    return SampleSet(t, theta, ParallelBeam(n_angles, half_offsets, float(spacing)))


def scattered_samples(count: int, seed: int = 0) -> SampleSet:
    """Draw ``count`` lines with t uniform on [-1, 1], theta uniform on [0, pi).

    Uses a counter-based generator so a fixed seed reproduces the same set on
    every platform.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = np.random.Generator(np.random.Philox(seed))
    t = rng.uniform(-1.0, 1.0, size=count)
    theta = rng.uniform(0.0, np.pi, size=count)
    # uniform's half-open upper bound keeps theta < pi, but guard anyway
    theta[theta >= np.pi] = 0.0
    return SampleSet(t, theta, Scattered(count, seed))
