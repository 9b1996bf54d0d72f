"""Estimator-style front ends for the three reconstruction pipelines.

Each reconstructor follows the scikit-learn protocol: constructor arguments
are stored verbatim and introspectable through ``get_params``/``set_params``,
``fit`` consumes a :class:`~radonkit.sinogram.Sinogram` and records fitted
state on trailing-underscore attributes, ``predict`` returns the image and
``transform`` is the stateless fit-then-predict convenience.  This keeps the
pipelines compatible with parameter sweeps and generic model-selection
tooling even though the "X" is a sinogram rather than a feature matrix.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from . import art, fbp, kernels
from .grid import ImageGrid
from .sinogram import Sinogram
from .validation import check_choice, check_positive


class _SinogramReconstructor(BaseEstimator):
    """Shared fit/predict plumbing for sinogram -> image estimators."""

    def _reconstruct(self, sino: Sinogram) -> ImageGrid:
        raise NotImplementedError

    def fit(self, sinogram: Sinogram, y=None):
        if not isinstance(sinogram, Sinogram):
            raise TypeError("fit expects a Sinogram")
        self.image_ = self._reconstruct(sinogram)
        self.n_samples_ = len(sinogram)
        return self

    def predict(self) -> np.ndarray:
        if not hasattr(self, "image_"):
            raise NotFittedError("call fit before predict")
        return self.image_.values

    def transform(self, sinogram: Sinogram) -> np.ndarray:
        return self.fit(sinogram).predict()


class FilteredBackProjection(_SinogramReconstructor):
    """Filtered back-projection on parallel-beam data.

    Parameters
    ----------
    filter_name : str
        Low-pass filter family: ``ram-lak``, ``shepp-logan`` or ``cosine``.
    interpolation : str
        ``nearest``, ``linear`` or ``cubic``.
    size : int
        Output image side K.
    algorithm : str
        ``I`` (convolve, then interpolate the filtered data) or ``II``
        (interpolate the filter, weight the raw samples).
    band_limit : float or None
        Filter band limit; None derives it from the offset spacing d via
        1/(2L) = d.
    """

    def __init__(self, filter_name="shepp-logan", interpolation="linear",
                 size=64, algorithm="I", band_limit=None):
        self.filter_name = filter_name
        self.interpolation = interpolation
        self.size = size
        self.algorithm = algorithm
        self.band_limit = band_limit

    def _reconstruct(self, sino):
        check_choice("filter_name", self.filter_name, fbp.FILTER_FAMILIES)
        check_choice("interpolation", self.interpolation, fbp.INTERP_SCHEMES)
        check_positive("size", self.size)
        return fbp.reconstruct_fbp(
            sino, fbp.FilterSpec(self.filter_name),
            scheme=self.interpolation, size=int(self.size),
            algorithm=self.algorithm, band_limit=self.band_limit)


class AlgebraicReconstruction(_SinogramReconstructor):
    """Pixel-basis algebraic reconstruction (Kaczmarz or least squares).

    After ``fit`` the residual history is available as ``residuals_``.

    Parameters
    ----------
    size : int
        Output image side K.
    method : str
        ``kaczmarz``, ``lsq`` or ``auto`` (Kaczmarz when underdetermined).
    relaxation : float
        Kaczmarz relaxation in (0, 2).
    sweeps : int
        Maximum number of Kaczmarz sweeps.
    tolerance : float
        Residual 2-norm stopping threshold.
    """

    def __init__(self, size=32, method="auto", relaxation=1.0, sweeps=100,
                 tolerance=1e-8):
        self.size = size
        self.method = method
        self.relaxation = relaxation
        self.sweeps = sweeps
        self.tolerance = tolerance

    def _reconstruct(self, sino):
        check_positive("size", self.size)
        config = art.KaczmarzConfig(relaxation=self.relaxation,
                                    max_sweeps=int(self.sweeps),
                                    tolerance=self.tolerance)
        image, history = art.reconstruct_art(sino, int(self.size), config,
                                             method=self.method)
        self.residuals_ = history
        return image


class KernelReconstruction(_SinogramReconstructor):
    """Regularized kernel collocation on Radon samples.

    After ``fit`` the reciprocal condition estimate of the collocation matrix
    is available as ``rcond_`` and the coefficients as ``coefficients_``.

    Parameters
    ----------
    kernel : str
        ``gaussian``, ``imq``, ``mq`` or ``wendland20``.
    window : str or None
        ``truncation``, ``gaussian`` or ``compact``; None picks the family's
        standard pairing.
    mode : str
        ``all`` (window every entry) or ``diag`` (window same-angle entries
        only).
    eps, rho : float
        Kernel shape parameters (rho applies to ``mq``).
    support : float
        Kernel-level truncation L1 (``imq``).
    length : float
        Window truncation radius (L or H).
    nu : float or None
        Gaussian/compact window width; None picks the family default.
    scale : float
        Dilation parameter h of the scaled problem (h = 1: unscaled).
    size : int
        Output image side K.
    """

    def __init__(self, kernel="gaussian", window=None, mode="all", eps=30.0,
                 rho=1.0, support=20.0, length=20.0, nu=None, scale=1.0,
                 size=64):
        self.kernel = kernel
        self.window = window
        self.mode = mode
        self.eps = eps
        self.rho = rho
        self.support = support
        self.length = length
        self.nu = nu
        self.scale = scale
        self.size = size

    def _make_model_window(self):
        model = kernels.KernelModel(self.kernel, eps=self.eps, rho=self.rho,
                                    support=self.support)
        family = self.window or kernels.default_window(self.kernel).family
        nu = self.nu
        if nu is None:
            nu = kernels.default_window(self.kernel).nu
        window = kernels.WindowSpec(family, length=self.length, nu=nu,
                                    mode=self.mode)
        return model, window

    def _reconstruct(self, sino):
        check_positive("size", self.size)
        check_positive("scale", self.scale)
        model, window = self._make_model_window()
        system = kernels.assemble_kernel_system(model, window, sino.samples,
                                                sino, scale=self.scale)
        self.rcond_ = system.rcond
        self.coefficients_ = kernels.solve_coefficients(system)
        return kernels.evaluate_expansion(self.coefficients_, system.scale,
                                          model, sino.samples, int(self.size))
