"""Correlation matrix, Marchenko-Pastur significance bounds and rotation null.

The eigenvalue density of the sample correlation matrix of M uncorrelated
series of length N' converges, with Q = N'/M fixed, to

    rho(lambda) = (Q / (2 pi sigma^2)) * sqrt((l+ - lambda)(lambda - l-)) / lambda

supported on [l-, l+] with l(+/-) = sigma^2 (1 +/- sqrt(Q))^2 / Q.  At Q = 1
this reduces to the square-rooted semicircle form.  Eigenvalues above l+ are
classified significant.  The finite-size behavior is probed by the rotation
null: each series is circularly rotated by an independent uniform offset,
which preserves every series' circular autocorrelation but destroys
cross-series alignment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_positive_int
from .growth import GrowthPanel
from .numerics import RngStream, SummaryStats, SymmetricEigenResult, eig_symmetric, summary_stats
from .panel import GoodDescriptor

__all__ = [
    "RmtParams",
    "mp_density",
    "semicircle_density",
    "CorrelationModel",
    "correlation_matrix",
    "SignificanceReport",
    "NullEigenDistribution",
    "classify_significance",
    "rotation_null",
]

DEFAULT_NULL_BIN_WIDTH = 0.02


@dataclass(frozen=True)
class RmtParams:
    """Marchenko-Pastur parameters for an (N', M) panel."""

    sigma: float
    q: float
    lambda_plus: float
    lambda_minus: float

    @classmethod
    def from_dimensions(cls, n_prime: int, m: int, sigma: float = 1.0) -> "RmtParams":
        if n_prime <= 0 or m <= 0:
            raise ValueError("n_prime and m must be positive")
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        q = n_prime / m
        root = np.sqrt(q)
        return cls(
            sigma=float(sigma),
            q=float(q),
            lambda_plus=float(sigma**2 * (1 + root) ** 2 / q),
            lambda_minus=float(sigma**2 * (1 - root) ** 2 / q),
        )


def mp_density(lam, params: RmtParams):
    """Marchenko-Pastur eigenvalue density; zero outside (lambda-, lambda+)."""
    lam_arr = np.asarray(lam, dtype=float)
    out = np.zeros_like(lam_arr)
    inside = (lam_arr > params.lambda_minus) & (lam_arr < params.lambda_plus)
    lam_in = lam_arr[inside]
    out[inside] = (
        params.q / (2.0 * np.pi * params.sigma**2)
        * np.sqrt((params.lambda_plus - lam_in) * (lam_in - params.lambda_minus))
        / lam_in
    )
    return out if out.ndim else float(out)


def semicircle_density(lam_a, sigma: float = 1.0):
    """Wigner semicircle density on |lambda| <= 2*sigma."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    lam_arr = np.asarray(lam_a, dtype=float)
    out = np.zeros_like(lam_arr)
    inside = np.abs(lam_arr) <= 2.0 * sigma
    out[inside] = np.sqrt(4.0 * sigma**2 - lam_arr[inside] ** 2) / (2.0 * np.pi * sigma**2)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class CorrelationModel:
    """Correlation matrix with its sign-fixed eigendecomposition."""

    c: np.ndarray
    eig: SymmetricEigenResult
    m: int
    n_prime: int
    variables: tuple[str, ...]
    goods: tuple[GoodDescriptor, ...]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eig.eigenvalues

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.eig.eigenvectors

    def rmt_params(self, sigma: float = 1.0) -> RmtParams:
        return RmtParams.from_dimensions(self.n_prime, self.m, sigma)

    def labels_match(self, variables, goods) -> bool:
        return tuple(variables) == self.variables and tuple(g.id for g in goods) == tuple(
            g.id for g in self.goods
        )


def _correlation_of(w: np.ndarray) -> np.ndarray:
    c = w.T @ w / w.shape[0]
    c = 0.5 * (c + c.T)
    np.clip(c, -1.0, 1.0, out=c)
    np.fill_diagonal(c, 1.0)
    return c


def correlation_matrix(gp: GrowthPanel) -> CorrelationModel:
    """Equal-time correlation matrix of the normalized growth rates.

    Eigenvector signs are fixed so the mean over the production block is
    positive (first nonzero component positive on ties).
    """
    if gp.n_prime < 2:
        raise ValueError("need at least 2 growth observations")
    c = _correlation_of(gp.rates_norm)
    production = np.arange(gp.n_goods)  # first block in variable-major order
    eig = eig_symmetric(c, sign_indices=production)
    return CorrelationModel(
        c=c,
        eig=eig,
        m=gp.n_series,
        n_prime=gp.n_prime,
        variables=gp.variables,
        goods=gp.goods,
    )


@dataclass(frozen=True)
class NullEigenDistribution:
    """Pooled eigenvalue histogram and per-rank statistics of a null ensemble."""

    bin_edges: np.ndarray
    density: np.ndarray
    largest: SummaryStats | None
    second: SummaryStats | None
    largest_samples: np.ndarray
    second_samples: np.ndarray
    largest_q999: float
    trials: int


@dataclass(frozen=True)
class SignificanceReport:
    """Modes above the Marchenko-Pastur upper edge, with margins."""

    eigenvalues: np.ndarray
    params: RmtParams
    significant: np.ndarray           # boolean per mode
    margins: np.ndarray               # eigenvalue - lambda_plus
    significant_modes: tuple[int, ...]  # 1-based, sorted by eigenvalue descending
    density_grid: np.ndarray
    density_values: np.ndarray
    null_distribution: NullEigenDistribution | None = None


def classify_significance(model: CorrelationModel, params: RmtParams | None = None,
                          *, density_points: int = 512,
                          null_distribution: NullEigenDistribution | None = None,
                          ) -> SignificanceReport:
    """Mark modes with eigenvalue above lambda_plus as significant."""
    if params is None:
        params = model.rmt_params()
    vals = model.eigenvalues
    significant = vals > params.lambda_plus
    grid = np.linspace(0.0, max(params.lambda_plus * 1.2, vals[0] * 1.05), density_points)
    return SignificanceReport(
        eigenvalues=vals,
        params=params,
        significant=significant,
        margins=vals - params.lambda_plus,
        significant_modes=tuple(int(i) + 1 for i in np.flatnonzero(significant)),
        density_grid=grid,
        density_values=np.asarray(mp_density(grid, params)),
        null_distribution=null_distribution,
    )


def _rotate_columns(w: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    # w(t_j) -> w(t_{(j - tau) mod N'}) per series
    n_prime, m = w.shape
    idx = (np.arange(n_prime)[:, None] - offsets[None, :]) % n_prime
    return w[idx, np.arange(m)[None, :]]


def rotation_null(gp: GrowthPanel, trials: int, rng: RngStream, *,
                  bin_width: float = DEFAULT_NULL_BIN_WIDTH,
                  offset_sampler=None, chunk: int = 512) -> SignificanceReport:
    """Null eigenvalue distribution from independent circular rotations.

    Each trial rotates every series by an independent uniform offset in
    [0, N'-1] and pools the eigenvalues of the rotated panel's correlation
    matrix.  Trial ``i`` draws from the substream (seed, stream_id, i), so
    results are independent of chunking and can be partitioned across
    workers.

    ``offset_sampler(generator, n_series)`` may be supplied to override the
    offset draw (used by tests to force known rotations).
    """
    trials = check_positive_int(trials, "trials")
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    w = gp.rates_norm
    n_prime, m = w.shape
    pooled = np.empty((trials, m))
    draw = offset_sampler or (lambda gen, n: gen.integers(0, n_prime, size=n))
    for start in range(0, trials, chunk):
        batch = min(chunk, trials - start)
        rotated = np.empty((batch, n_prime, m))
        for b in range(batch):
            offsets = np.asarray(draw(rng.substream(start + b), m), dtype=int)
            rotated[b] = _rotate_columns(w, offsets)
        c = rotated.transpose(0, 2, 1) @ rotated / n_prime
        pooled[start:start + batch] = np.linalg.eigvalsh(c)
    largest = pooled[:, -1]
    second = pooled[:, -2] if m >= 2 else largest
    flat = pooled.ravel()
    edges = np.arange(0.0, flat.max() + 2.0 * bin_width, bin_width)
    density, edges = np.histogram(flat, bins=edges, density=True)
    null = NullEigenDistribution(
        bin_edges=edges,
        density=density,
        largest=summary_stats(largest) if trials >= 2 else None,
        second=summary_stats(second) if trials >= 2 else None,
        largest_samples=largest,
        second_samples=second,
        largest_q999=float(np.quantile(largest, 0.999)),
        trials=trials,
    )
    model = correlation_matrix(gp)
    return classify_significance(model, null_distribution=null)
