"""Numerical kernels: discrete Fourier transform, symmetric eigensolver,
seeded RNG streams and descriptive statistics.

Conventions
-----------
The forward transform of a length-L series x is

    x~(omega_k) = (1/sqrt(L)) * sum_j x(t_j) exp(+i omega_k t_j)

with omega_k = 2*pi*k/L, t_j = j months (j = 0..L-1), so that

    x(t_j) = (1/sqrt(L)) * sum_k x~(omega_k) exp(-i omega_k t_j).

Real input implies the conjugate symmetry x~(omega_k)* = x~(omega_{L-k}),
and a zero-mean unit-variance series satisfies sum_k |x~|^2 = L.

Complex arguments are principal values in (-pi, pi].
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._validation import (
    as_float_array,
    as_series_matrix,
    check_fraction,
    check_symmetric,
)
from .errors import NumericalError

__all__ = [
    "dft_forward",
    "dft_inverse",
    "dft_at_frequency",
    "eig_symmetric",
    "SymmetricEigenResult",
    "summary_stats",
    "SummaryStats",
    "RngStream",
]


@lru_cache(maxsize=32)
def _dft_matrix(length: int) -> np.ndarray:
    # E[k, j] = exp(+2i pi k j / L) / sqrt(L); direct O(L^2) transform,
    # exact companion of dft_at_frequency at the grid frequencies.
    k = np.arange(length)
    mat = np.exp((2j * np.pi / length) * np.outer(k, k)) / np.sqrt(length)
    mat.setflags(write=False)
    return mat


def dft_forward(x) -> np.ndarray:
    """Forward DFT of a real series (or of each column of a matrix).

    Parameters
    ----------
    x : array-like, shape (L,) or (L, n_series)
        Real input sampled on a unit monthly grid, L >= 2.

    Returns
    -------
    ndarray of complex, same shape as ``x``
        Coefficients x~(omega_k) for k = 0..L-1.
    """
    arr = np.asarray(x, dtype=float)
    squeeze = arr.ndim == 1
    arr = as_series_matrix(arr, "x", min_length=2)
    out = _dft_matrix(arr.shape[0]) @ arr
    return out[:, 0] if squeeze else out


def dft_inverse(coefficients) -> np.ndarray:
    """Invert :func:`dft_forward`; returns a complex array (real part is the
    reconstructed series when the coefficients came from real input)."""
    arr = np.asarray(coefficients, dtype=complex)
    if arr.shape[0] < 2:
        raise ValueError(f"coefficients must have length >= 2, got {arr.shape[0]}")
    return np.conj(_dft_matrix(arr.shape[0])) @ arr


def dft_at_frequency(x, omega):
    """Evaluate (1/sqrt(L)) * sum_j x(t_j) exp(+i omega t_j) at arbitrary omega.

    Agrees with ``dft_forward(x)[k]`` when ``omega == 2*pi*k/L``.  ``omega``
    may be a scalar or an array; ``x`` may be a series or a matrix of series
    in columns.
    """
    arr = np.asarray(x, dtype=float)
    squeeze_series = arr.ndim == 1
    arr = as_series_matrix(arr, "x", min_length=1)
    om = np.asarray(omega, dtype=float)
    if not np.all(np.isfinite(om)):
        raise ValueError("omega must be finite")
    scalar_omega = om.ndim == 0
    om = np.atleast_1d(om)
    t = np.arange(arr.shape[0])
    basis = np.exp(1j * np.outer(om, t)) / np.sqrt(arr.shape[0])
    out = basis @ arr
    if squeeze_series:
        out = out[:, 0]
    if scalar_omega:
        out = out[0]
    return out


@dataclass(frozen=True)
class SymmetricEigenResult:
    """Eigenvalues sorted descending with matching orthonormal eigenvectors.

    ``eigenvectors[:, n]`` is the unit eigenvector for ``eigenvalues[n]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _fix_signs(vecs: np.ndarray, sign_indices) -> np.ndarray:
    block = vecs if sign_indices is None else vecs[sign_indices]
    means = block.mean(axis=0)
    flip = means < 0
    # tie-break: make the first nonzero component positive
    for n in np.flatnonzero(means == 0):
        nz = np.flatnonzero(vecs[:, n])
        if nz.size:
            flip[n] = vecs[nz[0], n] < 0
    out = vecs.copy()
    out[:, flip] *= -1.0
    return out


def eig_symmetric(c, sign_indices=None) -> SymmetricEigenResult:
    """Eigendecomposition of a real symmetric matrix.

    Parameters
    ----------
    c : array-like, shape (M, M)
        Symmetric to 1e-12 (absolute, entrywise), finite.
    sign_indices : array-like of int, optional
        Component indices over which the eigenvector mean is forced to be
        positive (the canonical sign).  Defaults to all components.  A zero
        mean falls back to making the first nonzero component positive.

    Raises
    ------
    ValueError
        If the input is not symmetric.
    NumericalError
        If the underlying solver fails to converge.
    """
    arr = check_symmetric(c, "c", tol=1e-12)
    sym = 0.5 * (arr + arr.T)
    try:
        vals, vecs = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(
            f"symmetric eigensolver failed to converge for shape {arr.shape}, "
            f"max |C| = {np.max(np.abs(arr)):.3e}: {exc}"
        ) from exc
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = _fix_signs(vecs[:, order], sign_indices)
    return SymmetricEigenResult(eigenvalues=vals, eigenvectors=vecs)


@dataclass(frozen=True)
class SummaryStats:
    """Mean, sample standard deviation and empirical central CI of samples."""

    mean: float
    std: float
    ci_low: float
    ci_high: float
    ci_level: float
    n: int


def summary_stats(samples, ci_level: float = 0.95) -> SummaryStats:
    """Summarize samples with an empirical (quantile) confidence interval.

    The CI endpoints are the ((1-ci_level)/2, 1-(1-ci_level)/2) empirical
    quantiles, not Gaussian approximations.
    """
    arr = as_float_array(samples, "samples", ndim=1, min_length=2)
    check_fraction(ci_level, "ci_level")
    alpha = 1.0 - ci_level
    lo, hi = np.quantile(arr, [alpha / 2.0, 1.0 - alpha / 2.0])
    return SummaryStats(
        mean=float(arr.mean()),
        std=float(arr.std(ddof=1)),
        ci_low=float(lo),
        ci_high=float(hi),
        ci_level=float(ci_level),
        n=arr.shape[0],
    )


@dataclass(frozen=True)
class RngStream:
    """Addressable random stream: (seed, stream_id) -> reproducible draws.

    Streams are backed by numpy's PCG64 keyed through ``SeedSequence(seed,
    spawn_key=(stream_id,))``, which is documented to be stable across
    platforms and numpy releases.  Disjoint ``stream_id`` values (or
    ``substream`` indices) give statistically independent streams, so
    Monte-Carlo trials can run in parallel and still merge deterministically.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if int(self.stream_id) < 0:
            raise ValueError("stream_id must be non-negative")

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed_sequence()))

    def substream(self, index: int) -> np.random.Generator:
        """Generator for the child stream (seed, stream_id, index)."""
        if index < 0:
            raise ValueError("substream index must be non-negative")
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, index))
        return np.random.Generator(np.random.PCG64(ss))
