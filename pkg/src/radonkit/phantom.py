"""Analytic test phantoms and their exact Radon transforms.

A phantom is a weighted union of discs and ellipses.  Its Radon transform is
assembled component-wise from the centered-disc chord formula
2*sqrt(r^2 - t^2), the shift rule Rf(. - c) = Rf(t - c.v, theta), the
dilation rule R[f(h.)](t, theta) = Rf(h t, theta)/h and the affine reduction
of an ellipse to a disc, so sampled data carries no discretization error.
"""

from dataclasses import dataclass, field

import numpy as np

from .geometry import LineParam
from .grid import ImageGrid, pixel_center_mesh


@dataclass(frozen=True)
class DiscComponent:
    """Disc of radius r centered at (cx, cy), with a density multiplier."""

    cx: float
    cy: float
    radius: float
    weight: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class EllipseComponent:
    """Rotated ellipse with semi-axes (a, b), rotation phi, center (cx, cy)."""

    cx: float
    cy: float
    semi_a: float
    semi_b: float
    rotation: float = 0.0
    weight: float = 1.0

    def __post_init__(self):
        if not (self.semi_a > 0 and self.semi_b > 0):
            raise ValueError("semi-axes must be positive")


@dataclass(frozen=True)
class Phantom:
    """Named, immutable collection of weighted disc/ellipse components."""

    name: str
    components: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))


def radon_disc(radius: float, t):
    """Chord length 2*sqrt(r^2 - t^2) of the centered disc, 0 for |t| > r."""
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    t = np.asarray(t, dtype=float)
    val = 2.0 * np.sqrt(np.maximum(radius * radius - t * t, 0.0))
    return float(val) if val.ndim == 0 else val


def _component_radon(comp, t, theta):
    """Radon transform of one component at (t, theta); t may be an array."""
    shift = comp.cx * np.cos(theta) + comp.cy * np.sin(theta)
    tt = np.asarray(t, dtype=float) - shift
    if isinstance(comp, DiscComponent):
        return comp.weight * 2.0 * np.sqrt(np.maximum(comp.radius**2 - tt * tt, 0.0))
    # centered ellipse: rho^2 = a^2 cos^2(theta-phi) + b^2 sin^2(theta-phi),
    # R f(t) = (2ab/rho^2) sqrt(rho^2 - t^2) for |t| <= rho
    co = np.cos(theta - comp.rotation)
    si = np.sin(theta - comp.rotation)
    rho2 = comp.semi_a**2 * co * co + comp.semi_b**2 * si * si
    num = np.maximum(rho2 - tt * tt, 0.0)
    return comp.weight * 2.0 * comp.semi_a * comp.semi_b * np.sqrt(num) / rho2


def radon_analytic(ph: Phantom, line: LineParam):
    """Exact Radon transform of the phantom along one line."""
    t, theta = line
    total = 0.0
    for comp in ph.components:
        total += _component_radon(comp, t, theta)
    return float(total)


def radon_analytic_many(ph: Phantom, t, theta):
    """Vectorized :func:`radon_analytic` over parallel arrays t, theta."""
    t = np.asarray(t, dtype=float)
    theta = np.asarray(theta, dtype=float)
    total = np.zeros(np.broadcast(t, theta).shape)
    for comp in ph.components:
        total += _component_radon(comp, t, theta)
    return total


def radon_scaled(ph: Phantom, h: float, line: LineParam):
    """Radon transform of the dilated density f(h x): (1/h) Rf(h t, theta)."""
    if not h > 0:
        raise ValueError(f"scale must be positive, got {h}")
    t, theta = line
    return radon_analytic(ph, LineParam(h * t, theta)) / h


def eval_density(ph: Phantom, point):
    """Phantom density at a point: weighted sum of component indicators.

    Component boundaries are closed (points on the rim count as inside).
    ``point`` may be a pair of scalars or of equally shaped arrays.
    """
    x = np.asarray(point[0], dtype=float)
    y = np.asarray(point[1], dtype=float)
    total = np.zeros(np.broadcast(x, y).shape)
    for comp in ph.components:
        dx = x - comp.cx
        dy = y - comp.cy
        if isinstance(comp, DiscComponent):
            inside = dx * dx + dy * dy <= comp.radius**2
        else:
            co, si = np.cos(comp.rotation), np.sin(comp.rotation)
            u = dx * co + dy * si
            v = -dx * si + dy * co
            inside = (u / comp.semi_a) ** 2 + (v / comp.semi_b) ** 2 <= 1.0
        total += comp.weight * inside
    return float(total) if total.ndim == 0 else total


def rasterize(ph: Phantom, size: int) -> ImageGrid:
    """Sample the density at the pixel centers of a K x K grid."""
    xm, ym = pixel_center_mesh(size)
    return ImageGrid(eval_density(ph, (xm, ym)))


def support_crossings(ph: Phantom, line: LineParam):
    """Arclengths s at which the line crosses any component boundary.

    These are the discontinuity locations of the density along the line,
    useful as split hints when integrating the (piecewise constant) profile
    numerically; the density values themselves are untouched.
    """
    t, theta = line
    ct, st = np.cos(theta), np.sin(theta)
    crossings = []
    for comp in ph.components:
        tc = comp.cx * ct + comp.cy * st
        sc = -comp.cx * st + comp.cy * ct
        if isinstance(comp, DiscComponent):
            gap = comp.radius**2 - (t - tc) ** 2
            if gap > 0:
                crossings.extend((sc - np.sqrt(gap), sc + np.sqrt(gap)))
        else:
            # quadratic in s from the rotated-ellipse indicator
            co, si = np.cos(comp.rotation), np.sin(comp.rotation)
            # point(s) - center in the ellipse frame is linear in s
            px0, py0 = t * ct - comp.cx, t * st - comp.cy
            dxs, dys = -st, ct
            u0, du = px0 * co + py0 * si, dxs * co + dys * si
            v0, dv = -px0 * si + py0 * co, -dxs * si + dys * co
            qa = (du / comp.semi_a) ** 2 + (dv / comp.semi_b) ** 2
            qb = 2.0 * (u0 * du / comp.semi_a**2 + v0 * dv / comp.semi_b**2)
            qc = (u0 / comp.semi_a) ** 2 + (v0 / comp.semi_b) ** 2 - 1.0
            disc = qb * qb - 4.0 * qa * qc
            if disc > 0:
                root = np.sqrt(disc)
                crossings.extend(((-qb - root) / (2 * qa), (-qb + root) / (2 * qa)))
    return sorted(crossings)


# Standard 10-ellipse head phantom table (modified intensity variant):
# (cx, cy, semi-axis x, semi-axis y, rotation, weight)
_SHEPP_LOGAN_TABLE = (
    (0.0, 0.0, 0.69, 0.92, 0.0, 1.0),
    (0.0, -0.0184, 0.6624, 0.874, 0.0, -0.8),
    (0.22, 0.0, 0.11, 0.31, -np.pi / 10.0, -0.2),
    (-0.22, 0.0, 0.16, 0.41, np.pi / 10.0, -0.2),
    (0.0, 0.35, 0.21, 0.25, 0.0, 0.1),
    (0.0, 0.1, 0.046, 0.046, 0.0, 0.1),
    (0.0, -0.1, 0.046, 0.046, 0.0, 0.1),
    (-0.08, -0.605, 0.046, 0.023, 0.0, 0.1),
    (0.0, -0.605, 0.023, 0.023, 0.0, 0.1),
    (0.06, -0.605, 0.023, 0.046, 0.0, 0.1),
)


def builtin(name: str) -> Phantom:
    """Return a predefined phantom: ``crescent``, ``bulls-eye`` or ``shepp-logan``.

    Raises
    ------
    KeyError
        If the name is unknown.
    """
    match name:
        case "crescent":
            components = (
                DiscComponent(0.0, 0.0, 0.5, 1.0),
                DiscComponent(0.125, 0.0, 0.375, -0.5),
            )
        case "bulls-eye":
            # three concentric discs giving alternating rings
            components = (
                DiscComponent(0.0, 0.0, 0.8, 0.5),
                DiscComponent(0.0, 0.0, 0.55, 0.5),
                DiscComponent(0.0, 0.0, 0.3, -0.25),
            )
        case "shepp-logan":
            components = tuple(
                EllipseComponent(cx, cy, a, b, rot, w)
                for cx, cy, a, b, rot, w in _SHEPP_LOGAN_TABLE
            )
        case _:
            raise KeyError(f"unknown phantom: {name!r}")
    return Phantom(name, components)


BUILTIN_NAMES = ("crescent", "bulls-eye", "shepp-logan")
