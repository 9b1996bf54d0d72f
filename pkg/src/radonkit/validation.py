"""Small input-validation helpers shared across the public API."""

import numpy as np


def check_positive(name: str, value) -> float:
    """Require a finite, strictly positive scalar; return it as float."""
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def check_choice(name: str, value, choices):
    """Require ``value`` to be one of ``choices``."""
    if value not in choices:
        raise ValueError(f"{name} must be one of {tuple(choices)}, got {value!r}")
    return value


def check_finite_array(name: str, value, ndim: int | None = None) -> np.ndarray:
    """Require a finite float array, optionally of a fixed dimensionality."""
    arr = np.asarray(value, dtype=float)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    return arr
