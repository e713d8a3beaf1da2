"""Input validation helpers used throughout the package."""

from __future__ import annotations

import numpy as np


def as_float_array(x, name: str, *, ndim: int | None = None,
                   min_length: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a float64 array and check shape and finiteness."""
    arr = np.asarray(x, dtype=float)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got ndim={arr.ndim}")
    if min_length is not None and arr.shape[0] < min_length:
        raise ValueError(f"{name} must have length >= {min_length}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def as_series_matrix(x, name: str, *, min_length: int = 1) -> np.ndarray:
    """Accept a 1-d series or a (length, n_series) matrix; always return 2-d."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 1- or 2-dimensional, got ndim={arr.ndim}")
    if arr.shape[0] < min_length:
        raise ValueError(f"{name} must have length >= {min_length}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_square(c, name: str) -> np.ndarray:
    arr = np.asarray(c, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_symmetric(c, name: str, *, tol: float = 1e-12) -> np.ndarray:
    arr = check_square(c, name)
    asym = np.max(np.abs(arr - arr.T)) if arr.size else 0.0
    if asym > tol:
        raise ValueError(f"{name} is not symmetric (max |C - C^T| = {asym:.3e} > {tol:.0e})")
    return arr


def check_odd(value: int, name: str) -> int:
    value = int(value)
    if value % 2 == 0:
        raise ValueError(f"{name} must be odd, got {value}")
    return value


def check_fraction(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must be strictly between 0 and 1, got {value}")
    return value


def check_positive_int(value: int, name: str, *, minimum: int = 1) -> int:
    value = int(value)
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value
