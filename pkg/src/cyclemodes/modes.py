"""Eigenmode projection, per-mode spectra, binned contributions and cycle
reconstruction.

Projecting the normalized growth panel onto the correlation eigenvectors
gives time coefficients a_n(t_j) with <a_n a_n'> = delta_{nn'} lambda^(n); the
squared magnitude of their Fourier coefficients decomposes the averaged power
spectrum as p(omega_k) = (1/M) sum_n |a~_n(omega_k)|^2.  Restricting the
inverse transform to a set of modes and wavenumbers gives band-limited
reconstructions such as the two-mode, two-period cycle component.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .growth import GrowthPanel
from .panel import GoodDescriptor, variable_block
from .numerics import dft_forward
from .rmt import CorrelationModel
from .spectrum import half_wavenumbers

__all__ = [
    "ModeDecomposition",
    "project_modes",
    "mode_power_spectrum",
    "BinnedContribution",
    "ContributionBin",
    "binned_relative_contribution",
    "CycleReconstruction",
    "reconstruct_cycles",
]


@dataclass(frozen=True)
class ModeDecomposition:
    """Mode coefficients a_n(t_j) with their Fourier transforms.

    ``coefficients``, ``fourier`` and ``mode_power`` all have shape
    (n_prime, M) with column n holding mode n+1.
    """

    coefficients: np.ndarray
    fourier: np.ndarray
    mode_power: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    n_prime: int
    variables: tuple[str, ...]
    goods: tuple[GoodDescriptor, ...]

    @property
    def n_modes(self) -> int:
        return self.coefficients.shape[1]

    @property
    def n_goods(self) -> int:
        return len(self.goods)


def project_modes(gp: GrowthPanel, model: CorrelationModel) -> ModeDecomposition:
    """Orthonormal projection of the growth panel onto the eigenvectors."""
    if not model.labels_match(gp.variables, gp.goods):
        raise ValueError("growth panel labeling does not match the correlation model")
    if gp.n_prime != model.n_prime:
        raise ValueError(
            f"growth panel length {gp.n_prime} != model length {model.n_prime}"
        )
    a = gp.rates_norm @ model.eigenvectors
    fourier = dft_forward(a)
    return ModeDecomposition(
        coefficients=a,
        fourier=fourier,
        mode_power=np.abs(fourier) ** 2,
        eigenvalues=model.eigenvalues,
        eigenvectors=model.eigenvectors,
        n_prime=gp.n_prime,
        variables=gp.variables,
        goods=gp.goods,
    )


def mode_power_spectrum(md: ModeDecomposition) -> dict[int, np.ndarray]:
    """Per-mode spectra keyed by 1-based mode; their (1/M)-weighted sum is p."""
    return {n + 1: md.mode_power[:, n].copy() for n in range(md.n_modes)}


@dataclass(frozen=True)
class ContributionBin:
    t_low: float
    t_high: float
    wavenumbers: tuple[int, ...]
    shares: dict[int, float]
    share_sum: float


@dataclass(frozen=True)
class BinnedContribution:
    bins: tuple[ContributionBin, ...]
    modes: tuple[int, ...]
    rule: str


def _default_period_edges(n_prime: int) -> np.ndarray:
    """One bin per wavenumber for k <= 12, then logarithmic bins (ratio 1.25)."""
    ks = half_wavenumbers(n_prime)
    k_single = int(min(12, ks.max()))
    edges = [float(n_prime) + 0.5]
    for k in range(1, k_single + 1):
        edges.append(n_prime / (k + 0.5))
    t_min = n_prime / ks.max()
    while edges[-1] > t_min:
        edges.append(edges[-1] / 1.25)
    return np.array(edges[::-1])


def binned_relative_contribution(md: ModeDecomposition, bin_edges=None,
                                 modes: tuple[int, ...] = (1, 2)) -> BinnedContribution:
    """Relative contribution of the selected modes per period bin.

    Within each bin the share of mode n is
    sum_{k in bin} |a~_n(omega_k)|^2 / sum_{k in bin} M p(omega_k), computed
    over the display half-range.  Bins with no wavenumbers, or with
    numerically zero total power (the share is then undefined), are omitted:
    absent, not zero.
    """
    n_prime = md.n_prime
    ks = half_wavenumbers(n_prime)
    periods = n_prime / ks
    if bin_edges is None:
        edges = _default_period_edges(n_prime)
        rule = "per-wavenumber bins for k<=12, logarithmic (ratio 1.25) below"
    else:
        edges = np.asarray(bin_edges, dtype=float)
        if edges.ndim != 1 or edges.shape[0] < 2 or np.any(np.diff(edges) <= 0):
            raise ValueError("bin_edges must be strictly increasing with >= 2 entries")
        if edges[0] > periods.min() or edges[-1] < periods.max():
            raise ValueError(
                f"bins must cover periods ({periods.min():.4g}, {periods.max():.4g}]"
            )
        rule = "user-supplied period edges"
    for n in modes:
        if not 1 <= n <= md.n_modes:
            raise ValueError(f"mode {n} out of range 1..{md.n_modes}")
    total = md.mode_power.sum(axis=1)  # M * p(omega_k)
    floor = 1e-12 * float(total.sum())  # zero-power bins have no defined share
    # period intervals (low, high]: searchsorted on the left-open convention
    which = np.searchsorted(edges, periods, side="left") - 1
    bins = []
    for b in range(edges.shape[0] - 1):
        sel = ks[which == b]
        if sel.size == 0:
            continue
        denom = float(total[sel].sum())
        if denom <= floor:
            continue
        shares = {n: float(md.mode_power[sel, n - 1].sum() / denom) for n in modes}
        bins.append(ContributionBin(
            t_low=float(edges[b]),
            t_high=float(edges[b + 1]),
            wavenumbers=tuple(int(k) for k in sel),
            shares=shares,
            share_sum=float(sum(shares.values())),
        ))
    bins.sort(key=lambda cb: cb.t_low)
    return BinnedContribution(bins=tuple(bins), modes=tuple(modes), rule=rule)


@dataclass(frozen=True)
class CycleReconstruction:
    """Band-limited reconstruction restricted to selected modes and wavenumbers.

    ``series`` is the reconstructed panel; ``averaged_sum`` and
    ``averaged_by_mode`` are goods averages per variable.  For each selected
    wavenumber, ``complex_amplitudes[k][alpha] = sum_n a~_n(omega_k)
    Vbar_alpha^(n) = A_alpha exp(i phi_alpha)``, the per-variable amplitude
    and phase of that Fourier component.
    """

    modes: tuple[int, ...]
    wavenumbers: tuple[int, ...]
    series: np.ndarray
    series_by_mode: dict[int, np.ndarray]
    averaged_sum: np.ndarray
    averaged_by_mode: dict[int, np.ndarray]
    mean_components: np.ndarray           # (n_variables, n_selected_modes)
    complex_amplitudes: dict[int, np.ndarray]
    amplitudes: dict[int, np.ndarray]
    phases: dict[int, np.ndarray]
    n_prime: int
    variables: tuple[str, ...]
    goods: tuple[GoodDescriptor, ...]


def _goods_average(series: np.ndarray, variables, n_goods: int) -> np.ndarray:
    return np.stack(
        [series[:, variable_block(variables, n_goods, v)].mean(axis=1) for v in variables],
        axis=1,
    )


def reconstruct_cycles(md: ModeDecomposition, modes: tuple[int, ...] = (1, 2),
                       wavenumbers: tuple[int, ...] = (4, 6)) -> CycleReconstruction:
    """Real-part reconstruction over selected modes and wavenumbers.

    Each wavenumber k < N'/2 contributes
    (2/sqrt(N')) Re(a~_n(omega_k) exp(-i omega_k t_j)) per mode; a Nyquist
    term (even N') is real and counted once.  Selecting all modes and all
    half-range wavenumbers recovers the original panel exactly.
    """
    n_prime = md.n_prime
    valid = set(int(k) for k in half_wavenumbers(n_prime))
    modes = tuple(int(n) for n in modes)
    wavenumbers = tuple(int(k) for k in wavenumbers)
    if not modes:
        raise ValueError("at least one mode is required")
    if len(set(modes)) != len(modes) or len(set(wavenumbers)) != len(wavenumbers):
        raise ValueError("modes and wavenumbers must not repeat")
    for n in modes:
        if not 1 <= n <= md.n_modes:
            raise ValueError(f"mode {n} out of range 1..{md.n_modes}")
    for k in wavenumbers:
        if k == 0:
            raise ValueError("k = 0 is excluded (zero-frequency coefficient vanishes)")
        if k not in valid:
            raise ValueError(f"wavenumber {k} outside the display half-range")
    t = np.arange(n_prime)
    series_by_mode: dict[int, np.ndarray] = {}
    for n in modes:
        wave = np.zeros(n_prime)
        for k in wavenumbers:
            factor = 1.0 if 2 * k == n_prime else 2.0
            osc = md.fourier[k, n - 1] * np.exp(-2j * np.pi * k * t / n_prime)
            wave += factor / np.sqrt(n_prime) * osc.real
        series_by_mode[n] = np.outer(wave, md.eigenvectors[:, n - 1])
    series = sum(series_by_mode.values())

    n_goods = md.n_goods
    vbar = np.stack(
        [md.eigenvectors[variable_block(md.variables, n_goods, v), :][:, [n - 1 for n in modes]]
         .mean(axis=0) for v in md.variables]
    )  # (n_variables, n_selected)
    complex_amplitudes = {}
    amplitudes = {}
    phases = {}
    for k in wavenumbers:
        amp = vbar @ md.fourier[k, [n - 1 for n in modes]]
        complex_amplitudes[k] = amp
        amplitudes[k] = np.abs(amp)
        phases[k] = np.angle(amp)
    return CycleReconstruction(
        modes=modes,
        wavenumbers=wavenumbers,
        series=series,
        series_by_mode=series_by_mode,
        averaged_sum=_goods_average(series, md.variables, n_goods),
        averaged_by_mode={n: _goods_average(s, md.variables, n_goods)
                          for n, s in series_by_mode.items()},
        mean_components=vbar,
        complex_amplitudes=complex_amplitudes,
        amplitudes=amplitudes,
        phases=phases,
        n_prime=n_prime,
        variables=md.variables,
        goods=md.goods,
    )
