"""Algebraic reconstruction: pixel-basis system assembly and iterative solves.

Each row of the system is one measured line; each column is one pixel of the
output raster.  The entry is the length of the line's intersection with the
pixel, computed from the sorted offsets of the four pixel corners, so the
(sparse) matrix is exact.  Solvers: relaxed Kaczmarz sweeps and a damped
normal-equations least-squares path.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .geometry import LineParam, SampleSet
from .grid import ImageGrid, half_side
from .numerics import SingularMatrixError, dense_solve, rcond_1norm
from .sinogram import Sinogram


@dataclass(frozen=True)
class SparseSystem:
    """Row-compressed system matrix with right-hand side.

    For image systems ``matrix`` is J x K^2 in CSR layout (column index +
    value per stored entry) and ``size`` is the image side K; the solvers
    also accept plain systems with ``size=None``.
    """

    matrix: sp.csr_matrix
    rhs: np.ndarray
    size: int | None = None

    def __post_init__(self):
        if self.matrix.shape[0] != self.rhs.shape[0]:
            raise ValueError("rhs length must match the row count")
        if self.size is not None and self.matrix.shape[1] != self.size * self.size:
            raise ValueError("column count must equal size^2")

    @property
    def shape(self):
        return self.matrix.shape


@dataclass(frozen=True)
class KaczmarzConfig:
    """Relaxed Kaczmarz settings: 0 < relaxation < 2."""

    relaxation: float = 1.0
    max_sweeps: int = 100
    tolerance: float = 1e-8
    initial: np.ndarray | None = None

    def __post_init__(self):
        if not 0.0 < self.relaxation < 2.0:
            raise ValueError(f"relaxation must lie in (0, 2), got {self.relaxation}")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")


def _pixel_box(index: int, size: int):
    """Corner coordinates of 1-based pixel ``index`` on a K x K grid."""
    if not 1 <= index <= size * size:
        raise IndexError(f"pixel index {index} out of range 1..{size*size}")
    c = half_side(size)
    row, col = divmod(index - 1, size)
    x0 = col / c - 1.0
    y0 = 1.0 - row / c
    return x0, x0 + 1.0 / c, y0 - 1.0 / c, y0, row, col


def pixel_radon(index: int, size: int, line: LineParam) -> float:
    """Length of the intersection of a line with pixel ``index`` (1-based).

    Pixels are half-open ([x0, x1) x (y1, y0]) except in the last row/column,
    which include their outer edge; for axis-parallel lines this decides
    which pixel a boundary line belongs to.
    """
    x0, x1, y1, y0, row, col = _pixel_box(index, size)
    t, theta = line
    if not 0.0 <= theta < np.pi:
        raise ValueError(f"angle must lie in [0, pi), got {theta}")
    c_inv = x1 - x0

    if theta == 0.0:
        # t is the x coordinate; chord spans the full pixel height
        inside = x0 <= t < x1 or (col == size - 1 and t == x1)
        return c_inv if inside else 0.0
    if theta == np.pi / 2.0:
        inside = y1 < t <= y0 or (row == size - 1 and t == y1)
        return c_inv if inside else 0.0

    ct, st = np.cos(theta), np.sin(theta)
    corners = np.sort([x0 * ct + y0 * st, x0 * ct + y1 * st,
                       x1 * ct + y1 * st, x1 * ct + y0 * st])
    t_min, t_min2, t_max2, t_max = corners
    if not t_min < t < t_max:
        return 0.0
    cross = abs(st * ct)
    if cross < 1e-14:
        # nearly axis-parallel: the sloped end caps have negligible measure
        return c_inv / max(abs(ct), abs(st)) if t_min2 <= t <= t_max2 else 0.0
    if t < t_min2:
        return abs(t - t_min) / cross
    if t <= t_max2:
        return c_inv * min(1.0 / abs(ct), 1.0 / abs(st))
    return abs(t - t_max) / cross


def _column_values(size: int, sample_t: np.ndarray, sample_theta: np.ndarray,
                   x0: float, x1: float, y1: float, y0: float,
                   row: int, col: int) -> np.ndarray:
    """Vectorized pixel_radon of one pixel over all sample lines."""
    t = sample_t
    theta = sample_theta
    c_inv = x1 - x0
    out = np.zeros(t.size)

    at0 = theta == 0.0
    if at0.any():
        inside = (x0 <= t) & (t < x1)
        if col == size - 1:
            inside |= t == x1
        out[at0 & inside] = c_inv
    at90 = theta == np.pi / 2.0
    if at90.any():
        inside = (y1 < t) & (t <= y0)
        if row == size - 1:
            inside |= t == y1
        out[at90 & inside] = c_inv

    gen = ~(at0 | at90)
    if gen.any():
        tg, thg = t[gen], theta[gen]
        ct, st = np.cos(thg), np.sin(thg)
        cs = np.sort(np.stack([x0 * ct + y0 * st, x0 * ct + y1 * st,
                               x1 * ct + y1 * st, x1 * ct + y0 * st]), axis=0)
        t_min, t_min2, t_max2, t_max = cs
        cross = np.abs(st * ct)
        safe = np.maximum(cross, 1e-14)
        val = np.zeros(tg.size)
        mid = (t_min2 <= tg) & (tg <= t_max2)
        val[mid] = c_inv * np.minimum(1.0 / np.abs(ct[mid]), 1.0 / np.abs(st[mid]))
        lowwedge = (t_min < tg) & (tg < t_min2) & (cross >= 1e-14)
        val[lowwedge] = np.abs(tg - t_min)[lowwedge] / safe[lowwedge]
        highwedge = (t_max2 < tg) & (tg < t_max) & (cross >= 1e-14)
        val[highwedge] = np.abs(tg - t_max)[highwedge] / safe[highwedge]
        out[gen] = val
    return out


def assemble_system(samples: SampleSet, size: int,
                    sino: Sinogram | None = None) -> SparseSystem:
    """Assemble the line/pixel chord-length matrix for a sample set.

    The right-hand side is taken from ``sino`` when given (it must be aligned
    with ``samples``), otherwise zero.
    """
    if sino is not None and len(sino) != len(samples):
        raise ValueError("sinogram is not aligned with the sample set")
    data, indices, indptr_cols = [], [], []
    for index in range(1, size * size + 1):
        x0, x1, y1, y0, row, col = _pixel_box(index, size)
        vals = _column_values(size, samples.t, samples.theta, x0, x1, y1, y0, row, col)
        nz = np.nonzero(vals)[0]
        indptr_cols.append(nz.size)
        indices.append(nz)
        data.append(vals[nz])
    indptr = np.concatenate([[0], np.cumsum(indptr_cols)])
    matrix = sp.csc_matrix(
        (np.concatenate(data) if data else np.zeros(0),
         np.concatenate(indices) if indices else np.zeros(0, dtype=int), indptr),
        shape=(len(samples), size * size),
    ).tocsr()
    rhs = sino.values.copy() if sino is not None else np.zeros(len(samples))
    return SparseSystem(matrix, rhs, size)


def affine_project(x: np.ndarray, row: np.ndarray, rhs: float,
                   relaxation: float = 1.0) -> np.ndarray:
    """Relaxed affine projection of x onto the hyperplane row . x = rhs.

    At relaxation 1 this is the orthogonal projection (the projected point
    satisfies the row's equation exactly); at 2 it is the reflection across
    the hyperplane, which leaves the distance to the solution set unchanged.
    """
    row = np.asarray(row, dtype=float)
    norm2 = row @ row
    if norm2 == 0.0:
        return np.array(x, dtype=float)
    return x - relaxation * ((row @ x - rhs) / norm2) * row


def kaczmarz_solve(system: SparseSystem, config: KaczmarzConfig = KaczmarzConfig()):
    """Relaxed Kaczmarz sweeps over the rows of a sparse system.

    Rows are visited in their natural order; zero rows are skipped and each
    update touches only the nonzero coordinates of its row.  Returns the
    solution and the 2-norm residual history (one entry per completed sweep);
    non-convergence is reported through the history, not an error.
    """
    a = system.matrix
    p = system.rhs
    lam = config.relaxation
    x = (np.zeros(a.shape[1]) if config.initial is None
         else np.array(config.initial, dtype=float))
    indptr, cols, vals = a.indptr, a.indices, a.data
    row_norm2 = np.array(a.multiply(a).sum(axis=1)).ravel()
    history = []
    for _ in range(config.max_sweeps):
        for i in range(a.shape[0]):
            if row_norm2[i] == 0.0:
                continue
            lo, hi = indptr[i], indptr[i + 1]
            ci, vi = cols[lo:hi], vals[lo:hi]
            resid = vi @ x[ci] - p[i]
            x[ci] -= lam * (resid / row_norm2[i]) * vi
        history.append(float(np.linalg.norm(a @ x - p)))
        if history[-1] <= config.tolerance:
            break
    return x, np.array(history)


def least_squares_solve(system: SparseSystem):
    """Minimize ||Ax - p||_2 through damped normal equations.

    The normal matrix gets a Tikhonov term 1e-10 * trace(A^T A)/K^2 on the
    diagonal, which keeps rank-deficient systems (typical for limited-angle
    data) solvable.  Returns (solution, residual, rank_deficient_flag).
    """
    a = system.matrix
    p = system.rhs
    n = a.shape[1]
    normal = (a.T @ a).toarray()
    damping = 1e-10 * np.trace(normal) / n
    rhs = a.T @ p
    try:
        x = dense_solve(normal + damping * np.eye(n), rhs)
        flag = _looks_rank_deficient(normal, damping)
    except SingularMatrixError:
        x = np.linalg.lstsq(normal + damping * np.eye(n), rhs, rcond=None)[0]
        flag = True
    residual = float(np.linalg.norm(a @ x - p))
    return x, residual, flag


def _looks_rank_deficient(normal: np.ndarray, damping: float) -> bool:
    rc = rcond_1norm(normal)
    return rc < max(1e3 * damping / max(np.abs(normal).max(), 1e-300),
                    normal.shape[0] * np.finfo(float).eps)


def reconstruct_art(sino: Sinogram, size: int = 32,
                    config: KaczmarzConfig | None = None,
                    method: str = "auto"):
    """Assemble and solve the pixel-basis system, returning the image.

    ``method`` is ``kaczmarz``, ``lsq`` or ``auto`` (Kaczmarz when the system
    is underdetermined, least squares otherwise).  Returns
    (ImageGrid, residual_history).
    """
    system = assemble_system(sino.samples, size, sino)
    rows, cols = system.shape
    if method == "auto":
        method = "kaczmarz" if rows < cols else "lsq"
    if method == "kaczmarz":
        x, history = kaczmarz_solve(system, config or KaczmarzConfig())
    elif method == "lsq":
        x, residual, _ = least_squares_solve(system)
        history = np.array([residual])
    else:
        raise ValueError(f"unknown method: {method!r}")
    return ImageGrid(x.reshape(size, size)), history
