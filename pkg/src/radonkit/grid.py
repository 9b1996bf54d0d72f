"""Raster geometry shared by every reconstruction backend.

The image is a K x K grid over the unit square with top-down, row-major pixel
enumeration.  With c = floor((K+1)/2), the pixel in (0-based) row r, column s
occupies [x, x + 1/c) x (y - 1/c, y] for x = s/c - 1, y = 1 - r/c; pixels in
the last row/column also include their outer edge.  Reconstructions and
phantom rasterizations are evaluated at pixel centers.
"""

from dataclasses import dataclass

import numpy as np


def half_side(size: int) -> int:
    """Center index c = floor((K+1)/2); the pixel side length is 1/c."""
    if size < 1:
        raise ValueError(f"grid size must be >= 1, got {size}")
    return (size + 1) // 2


def pixel_centers(size: int):
    """Center coordinates (xs, ys) of the grid columns/rows.

    ``xs[s]`` is the x of column s (left to right), ``ys[r]`` the y of row r
    (top to bottom).
    """
    c = half_side(size)
    idx = np.arange(size)
    xs = (idx + 0.5) / c - 1.0
    ys = 1.0 - (idx + 0.5) / c
    return xs, ys


def pixel_center_mesh(size: int):
    """(K, K) meshes of pixel-center x and y, in row-major image order."""
    xs, ys = pixel_centers(size)
    return np.meshgrid(xs, ys)


@dataclass(frozen=True)
class ImageGrid:
    """K x K gray-scale raster over the unit square, top-down row-major."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"image must be square, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def size(self) -> int:
        return self.values.shape[0]


def rmse(a, b) -> float:
    """Root mean square pixel difference between two equally sized images."""
    av = a.values if isinstance(a, ImageGrid) else np.asarray(a, dtype=float)
    bv = b.values if isinstance(b, ImageGrid) else np.asarray(b, dtype=float)
    if av.shape != bv.shape:
        raise ValueError(f"image shapes differ: {av.shape} vs {bv.shape}")
    return float(np.sqrt(np.mean((av - bv) ** 2)))
