"""radonkit: analytic phantoms, exact Radon transforms, and CT reconstruction.

Reconstruction backends: filtered back-projection (Algorithms I/II), algebraic
reconstruction (relaxed Kaczmarz / damped least squares) and regularized
kernel-based Hermite-Birkhoff interpolation, each with an oracle-backed test
suite and an estimator-style front end.
"""

from .geometry import (LineParam, ParallelBeam, SampleSet, Scattered,
                       line_coordinates, line_point, parallel_beam_samples,
                       scattered_samples)
from .grid import ImageGrid, pixel_centers, rmse
from .phantom import (BUILTIN_NAMES, DiscComponent, EllipseComponent, Phantom,
                      builtin, eval_density, radon_analytic, radon_disc,
                      radon_scaled, rasterize)
from .sinogram import NoiseSpec, Sinogram, add_noise, read_csv, sample, write_csv
from .fbp import (DiscreteSignal, FilterSpec, back_project_discrete,
                  discrete_convolve, filter_sampled_ift, fwhm, interpolate,
                  reconstruct_fbp)
from .art import (KaczmarzConfig, SparseSystem, assemble_system, kaczmarz_solve,
                  least_squares_solve, pixel_radon, reconstruct_art)
from .kernels import (KernelModel, KernelSystem, WindowSpec,
                      assemble_kernel_system, basis_eval, matrix_entry,
                      oracle_entry, solve_and_evaluate)
from .numerics import (QuadratureResult, acosh, adaptive_quadrature, asinh,
                       dense_solve, erf, rcond_1norm)
from .estimators import (AlgebraicReconstruction, FilteredBackProjection,
                         KernelReconstruction)

__version__ = "0.1.0"

__all__ = [
    "LineParam", "ParallelBeam", "SampleSet", "Scattered",
    "line_coordinates", "line_point", "parallel_beam_samples",
    "scattered_samples",
    "ImageGrid", "pixel_centers", "rmse",
    "BUILTIN_NAMES", "DiscComponent", "EllipseComponent", "Phantom",
    "builtin", "eval_density", "radon_analytic", "radon_disc",
    "radon_scaled", "rasterize",
    "NoiseSpec", "Sinogram", "add_noise", "read_csv", "sample", "write_csv",
    "DiscreteSignal", "FilterSpec", "back_project_discrete",
    "discrete_convolve", "filter_sampled_ift", "fwhm", "interpolate",
    "reconstruct_fbp",
    "KaczmarzConfig", "SparseSystem", "assemble_system", "kaczmarz_solve",
    "least_squares_solve", "pixel_radon", "reconstruct_art",
    "KernelModel", "KernelSystem", "WindowSpec", "assemble_kernel_system",
    "basis_eval", "matrix_entry", "oracle_entry", "solve_and_evaluate",
    "QuadratureResult", "acosh", "adaptive_quadrature", "asinh",
    "dense_solve", "erf", "rcond_1norm",
    "AlgebraicReconstruction", "FilteredBackProjection", "KernelReconstruction",
]
